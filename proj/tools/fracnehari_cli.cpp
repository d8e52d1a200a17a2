#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fracnehari/runconfig.hpp"
#include "fracnehari/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "fracnehari: fibering-map analysis and two-branch Nehari solver for a "
      "singular critical nonlocal elliptic problem"};

  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int jobs = 0;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "RNG seed (overrides config)")->check(CLI::NonNegativeNumber);
  app.add_option("--jobs", jobs, "worker pool size (overrides config)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are configuration errors
  }

  try {
    fracnehari::RunConfig cfg = fracnehari::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (jobs > 0) cfg.jobs = jobs;
    return fracnehari::run(cfg);
  } catch (const fracnehari::ConfigError& e) {
    std::cerr << "fracnehari: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fracnehari: numerical failure: " << e.what() << "\n";
    return 3;
  }
}
