#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracnehari/grid.hpp"
#include "fracnehari/io.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  double lo{}, hi{};
  int count{};
  bool log = false;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

// Weight a(x): a positive constant or a nodal file matching the grid.
struct WeightSpec {
  bool from_file = false;
  double value = 1.0;
  std::string file;
  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

struct SuiteToggles {
  bool fiber = true, branches = true, gap = true, moser = true;
  friend bool operator==(const SuiteToggles&, const SuiteToggles&) = default;
};

struct RunConfig {
  double s = 0.25, q = 0.5, theta = 1.0;
  Index N = 256;
  double x_lo = -1.0, x_hi = 1.0;
  WeightSpec a{};
  bool has_sweep = false;
  double lambda = 0.0;
  SweepSpec sweep{};
  double delta = 0.24;
  std::vector<double> eps_factors{16.0, 32.0, 64.0};  // gap probe eps = factor * h
  int moser_depth = 10;
  int constants_starts = 5;
  SuiteToggles suites{};
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int jobs = 1;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

inline double as_number(const nlohmann::json& j, const std::string& key) {
  require(j.is_number(), key + " must be a number");
  return j.get<double>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::as_number;
  using detail::require;
  require(j.is_object(), "top level must be a JSON object");

  static const std::set<std::string> known = {
      "s",          "q",           "theta",       "N",
      "x_lo",       "x_hi",        "a",           "lambda",
      "lambda_sweep", "delta",     "eps_factors", "moser_depth",
      "constants_starts", "suites", "seed",       "out_dir",
      "jobs"};
  for (const auto& item : j.items())
    require(known.count(item.key()) > 0, "unknown key '" + item.key() + "'");

  RunConfig c;
  if (j.contains("s")) c.s = as_number(j.at("s"), "s");
  if (j.contains("q")) c.q = as_number(j.at("q"), "q");
  if (j.contains("theta")) c.theta = as_number(j.at("theta"), "theta");
  if (j.contains("N")) {
    require(j.at("N").is_number_integer(), "N must be an integer");
    c.N = j.at("N").get<Index>();
  }
  if (j.contains("x_lo")) c.x_lo = as_number(j.at("x_lo"), "x_lo");
  if (j.contains("x_hi")) c.x_hi = as_number(j.at("x_hi"), "x_hi");

  if (j.contains("a")) {
    const auto& ja = j.at("a");
    if (ja.is_number()) {
      c.a.from_file = false;
      c.a.value = ja.get<double>();
    } else if (ja.is_object() && ja.contains("file") && ja.at("file").is_string() &&
               ja.size() == 1) {
      c.a.from_file = true;
      c.a.file = ja.at("file").get<std::string>();
      require(!c.a.file.empty(), "a.file must be a nonempty path");
    } else {
      throw ConfigError("config: a must be a number or {\"file\": path}");
    }
  }

  const bool has_single = j.contains("lambda");
  const bool has_sweep = j.contains("lambda_sweep");
  require(has_single != has_sweep, "exactly one of lambda / lambda_sweep is required");
  if (has_single) {
    c.has_sweep = false;
    c.lambda = as_number(j.at("lambda"), "lambda");
    require(c.lambda > 0, "lambda must be positive");
  } else {
    const auto& js = j.at("lambda_sweep");
    require(js.is_object(), "lambda_sweep must be an object");
    for (const auto& item : js.items())
      require(item.key() == "lo" || item.key() == "hi" || item.key() == "count" ||
                  item.key() == "log",
              "unknown lambda_sweep key '" + item.key() + "'");
    require(js.contains("lo") && js.contains("hi") && js.contains("count"),
            "lambda_sweep requires lo, hi, count");
    c.has_sweep = true;
    c.sweep.lo = as_number(js.at("lo"), "lambda_sweep.lo");
    c.sweep.hi = as_number(js.at("hi"), "lambda_sweep.hi");
    require(js.at("count").is_number_integer(), "lambda_sweep.count must be an integer");
    c.sweep.count = js.at("count").get<int>();
    if (js.contains("log")) {
      require(js.at("log").is_boolean(), "lambda_sweep.log must be a boolean");
      c.sweep.log = js.at("log").get<bool>();
    }
    require(c.sweep.lo > 0, "lambda_sweep.lo must be positive");
    require(c.sweep.hi >= c.sweep.lo, "lambda_sweep.hi must be >= lo");
    require(c.sweep.count >= 1, "lambda_sweep.count must be >= 1");
  }

  if (j.contains("delta")) c.delta = as_number(j.at("delta"), "delta");
  if (j.contains("eps_factors")) {
    const auto& je = j.at("eps_factors");
    require(je.is_array() && !je.empty(), "eps_factors must be a nonempty array");
    c.eps_factors.clear();
    for (const auto& v : je) {
      require(v.is_number(), "eps_factors entries must be numbers");
      c.eps_factors.push_back(v.get<double>());
      require(c.eps_factors.back() > 0, "eps_factors entries must be positive");
    }
  }
  if (j.contains("moser_depth")) {
    require(j.at("moser_depth").is_number_integer(), "moser_depth must be an integer");
    c.moser_depth = j.at("moser_depth").get<int>();
  }
  if (j.contains("constants_starts")) {
    require(j.at("constants_starts").is_number_integer(),
            "constants_starts must be an integer");
    c.constants_starts = j.at("constants_starts").get<int>();
  }
  if (j.contains("suites")) {
    const auto& js = j.at("suites");
    require(js.is_object(), "suites must be an object");
    for (const auto& item : js.items()) {
      require(item.value().is_boolean(), "suite toggles must be booleans");
      if (item.key() == "fiber")
        c.suites.fiber = item.value().get<bool>();
      else if (item.key() == "branches")
        c.suites.branches = item.value().get<bool>();
      else if (item.key() == "gap")
        c.suites.gap = item.value().get<bool>();
      else if (item.key() == "moser")
        c.suites.moser = item.value().get<bool>();
      else
        throw ConfigError("config: unknown suite '" + item.key() + "'");
    }
  }
  if (j.contains("seed")) {
    require(j.at("seed").is_number_integer() && !j.at("seed").is_number_float(),
            "seed must be an integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("out_dir")) {
    require(j.at("out_dir").is_string(), "out_dir must be a string");
    c.out_dir = j.at("out_dir").get<std::string>();
    require(!c.out_dir.empty(), "out_dir must be nonempty");
  }
  if (j.contains("jobs")) {
    require(j.at("jobs").is_number_integer(), "jobs must be an integer");
    c.jobs = j.at("jobs").get<int>();
  }

  require(c.s > 0 && c.s < 0.5, "s must lie in (0, 1/2)");
  require(c.q > 0 && c.q <= 1, "q must lie in (0, 1]");
  require(c.theta > 0, "theta must be positive");
  require(c.N >= 3, "N must be >= 3");
  require(c.x_lo < c.x_hi, "domain must satisfy x_lo < x_hi");
  require(c.a.from_file || c.a.value >= c.theta, "constant weight must be >= theta");
  require(c.delta > 0, "delta must be positive");
  require(c.moser_depth >= 1, "moser_depth must be >= 1");
  require(c.constants_starts >= 5, "constants_starts must be >= 5");
  require(c.jobs >= 1, "jobs must be >= 1");
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["s"] = c.s;
  j["q"] = c.q;
  j["theta"] = c.theta;
  j["N"] = c.N;
  j["x_lo"] = c.x_lo;
  j["x_hi"] = c.x_hi;
  if (c.a.from_file)
    j["a"] = nlohmann::json{{"file", c.a.file}};
  else
    j["a"] = c.a.value;
  if (c.has_sweep)
    j["lambda_sweep"] = {{"lo", c.sweep.lo},
                         {"hi", c.sweep.hi},
                         {"count", c.sweep.count},
                         {"log", c.sweep.log}};
  else
    j["lambda"] = c.lambda;
  j["delta"] = c.delta;
  j["eps_factors"] = c.eps_factors;
  j["moser_depth"] = c.moser_depth;
  j["constants_starts"] = c.constants_starts;
  j["suites"] = {{"fiber", c.suites.fiber},
                 {"branches", c.suites.branches},
                 {"gap", c.suites.gap},
                 {"moser", c.suites.moser}};
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["jobs"] = c.jobs;
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }
  return parse_config(j);
}

// Expand the lambda specification to the ordered sweep values.
inline std::vector<double> lambda_values(const RunConfig& c) {
  if (!c.has_sweep) return {c.lambda};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(c.sweep.count));
  if (c.sweep.count == 1) {
    out.push_back(c.sweep.lo);
    return out;
  }
  for (int i = 0; i < c.sweep.count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(c.sweep.count - 1);
    if (c.sweep.log)
      out.push_back(c.sweep.lo * std::pow(c.sweep.hi / c.sweep.lo, t));
    else
      out.push_back(c.sweep.lo + (c.sweep.hi - c.sweep.lo) * t);
  }
  return out;
}

// Resolve the nodal weight vector for a grid, loading and validating the file
// form. File problems are configuration errors, not numerical failures.
template <class Scalar>
Vec<Scalar> resolve_weight(const RunConfig& c, const DomainGrid<Scalar>& grid) {
  if (!c.a.from_file)
    return Vec<Scalar>::Constant(grid.N, static_cast<Scalar>(c.a.value));
  FieldFile<Scalar> ff;
  try {
    ff = read_field<Scalar>(c.a.file);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: weight file: ") + e.what());
  }
  if (ff.N != grid.N)
    throw ConfigError("config: weight file length does not match grid N");
  if (!(ff.values.minCoeff() >= static_cast<Scalar>(c.theta)))
    throw ConfigError("config: weight file violates the theta floor");
  return ff.values;
}

}  // namespace fracnehari
