#pragma once

// Uniform 1-D grids, solution fields, ghost extension and CSV snapshots.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wenods {

enum class Boundary { Periodic, ZeroGradient };

/// Points x_i = x_min + i*dx, i = 0..n_intervals.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_intervals = 0;
  double dx = 0.0;

  double x(int i) const { return x_min + i * dx; }
};

inline Grid1D make_grid(double x_min, double x_max, int n_intervals) {
  if (n_intervals < 6) throw std::invalid_argument("make_grid: need at least 6 intervals for a WENO stencil");
  if (!(x_max > x_min)) throw std::invalid_argument("make_grid: x_max must exceed x_min");
  return Grid1D{x_min, x_max, n_intervals, (x_max - x_min) / n_intervals};
}

/// Periodic problems identify x_0 with x_N and store N values; others store N+1.
inline int stored_points(const Grid1D& grid, Boundary boundary) {
  return boundary == Boundary::Periodic ? grid.n_intervals : grid.n_intervals + 1;
}

struct SolutionField {
  Grid1D grid;
  std::vector<double> values;
  Boundary boundary = Boundary::Periodic;
};

template <class Fn>
SolutionField sample_field(const Grid1D& grid, Boundary boundary, Fn&& fn) {
  SolutionField field{grid, std::vector<double>(stored_points(grid, boundary)), boundary};
  for (int i = 0; i < static_cast<int>(field.values.size()); ++i) field.values[i] = fn(grid.x(i));
  return field;
}

inline constexpr int kGhostWidth = 3;

/// padded[k] for k in [0, n + 2g): interior values shifted by g, ghosts per boundary policy.
template <class T>
std::vector<T> extend_with_ghosts(std::span<const T> values, Boundary boundary, int ghost = kGhostWidth) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw std::invalid_argument("extend_with_ghosts: empty field");
  std::vector<T> padded(n + 2 * ghost);
  for (int k = 0; k < n + 2 * ghost; ++k) {
    int i = k - ghost;
    if (boundary == Boundary::Periodic) {
      i = ((i % n) + n) % n;
    } else {
      i = i < 0 ? 0 : (i >= n ? n - 1 : i);
    }
    padded[k] = values[i];
  }
  return padded;
}

template <class T>
std::vector<T> strip_ghosts(std::span<const T> padded, int ghost = kGhostWidth) {
  return std::vector<T>(padded.begin() + ghost, padded.end() - ghost);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest round-trip text for labels and names.
inline std::string short_label(double v) {
  char buf[32];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

/// CSV snapshot: header then one row per grid point, 17 significant digits.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_double(columns[c][r]);
    out << '\n';
  }
}

inline void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, header, columns);
}

inline std::vector<double> grid_coordinates(const Grid1D& grid, std::size_t count) {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = grid.x(static_cast<int>(i));
  return xs;
}

inline void write_scalar_csv(std::ostream& out, const Grid1D& grid, std::span<const double> u) {
  write_csv(out, {"x", "u"}, {grid_coordinates(grid, u.size()), {u.begin(), u.end()}});
}

/// Reads a CSV written by write_csv; returns columns and fills `header`.
inline std::vector<std::vector<double>> read_csv(std::istream& in, std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: missing header");
  header.clear();
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::vector<double>> columns(header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= columns.size()) throw std::runtime_error("read_csv: too many cells in row");
      // strtod, unlike stod, accepts subnormal values.
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw std::runtime_error("read_csv: bad number '" + cell + "'");
      columns[c++].push_back(v);
    }
    if (c != columns.size()) throw std::runtime_error("read_csv: short row");
  }
  return columns;
}

}  // namespace wenods
