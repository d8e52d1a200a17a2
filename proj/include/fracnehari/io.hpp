#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fracnehari/grid.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Locale-independent, deterministic shortest-faithful decimal rendering at 12
// significant digits. Used for every numeric written to CSV, JSON, and field
// files so identical runs produce identical bytes.
inline std::string format_value(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                           std::chars_format::general, 12);
  if (res.ec != std::errc{}) throw std::runtime_error("format_value: to_chars failed");
  return std::string(buf.data(), res.ptr);
}

// Nodal field files: flat whitespace text, a single header line
//   # N x_lo x_hi s
// then one value per line.
template <class Scalar>
void write_field(const std::string& path, const Vec<Scalar>& u,
                 const DomainGrid<Scalar>& grid, Scalar s) {
  if (u.size() != grid.N)
    throw std::invalid_argument("write_field: field/grid size mismatch");
  std::ofstream f(path, std::ios::binary);  // binary: no newline translation
  if (!f) throw std::runtime_error("write_field: cannot open " + path);
  f << "# " << grid.N << ' ' << format_value(static_cast<double>(grid.x_lo)) << ' '
    << format_value(static_cast<double>(grid.x_hi)) << ' '
    << format_value(static_cast<double>(s)) << '\n';
  for (Index i = 0; i < u.size(); ++i)
    f << format_value(static_cast<double>(u[i])) << '\n';
  if (!f) throw std::runtime_error("write_field: write failed for " + path);
}

template <class Scalar>
struct FieldFile {
  Index N{};
  Scalar x_lo{}, x_hi{}, s{};
  Vec<Scalar> values;
};

template <class Scalar>
FieldFile<Scalar> read_field(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_field: cannot open " + path);
  std::string header;
  if (!std::getline(f, header) || header.size() < 2 || header[0] != '#')
    throw std::runtime_error("read_field: missing header in " + path);
  std::istringstream hs(header.substr(1));
  FieldFile<Scalar> out;
  if (!(hs >> out.N >> out.x_lo >> out.x_hi >> out.s))
    throw std::runtime_error("read_field: malformed header in " + path);
  if (out.N < 1) throw std::runtime_error("read_field: bad size in " + path);
  out.values.resize(out.N);
  for (Index i = 0; i < out.N; ++i)
    if (!(f >> out.values[i]))
      throw std::runtime_error("read_field: truncated data in " + path);
  return out;
}

}  // namespace fracnehari
