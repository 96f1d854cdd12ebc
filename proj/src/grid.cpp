#include "fraclp/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraclp {

Grid make_interval_grid(int n, double length) {
  if (n < 2) throw std::invalid_argument("grid: n must be >= 2");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid: length must be positive");
  Grid g;
  g.dim = 1;
  g.n = {n, 0};
  g.length = {length, 0.0};
  g.h = {length / (n + 1), 0.0};
  return g;
}

Grid make_rectangle_grid(int n1, double length1, int n2, double length2) {
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("grid: n must be >= 2 per axis");
  if (!(length1 > 0.0) || !(length2 > 0.0))
    throw std::invalid_argument("grid: lengths must be positive");
  Grid g;
  g.dim = 2;
  g.n = {n1, n2};
  g.length = {length1, length2};
  g.h = {length1 / (n1 + 1), length2 / (n2 + 1)};
  return g;
}

void require_match(const Grid& grid, const GridFunction& f) {
  if (f.size() != grid.size())
    throw std::invalid_argument("grid function has " + std::to_string(f.size()) +
                                " entries, grid has " + std::to_string(grid.size()) +
                                " nodes");
  if (!f.allFinite())
    throw std::invalid_argument("grid function contains non-finite entries");
}

double integrate(const Grid& grid, const GridFunction& f) {
  require_match(grid, f);
  return grid.cell_weight() * f.sum();
}

double lp_pseudonorm(const Grid& grid, const GridFunction& u, double p) {
  require_match(grid, u);
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("lp_pseudonorm: p must lie in (0,1)");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    acc += std::pow(std::abs(u[i]), p);
  return grid.cell_weight() * acc;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_grid_function_csv(const std::string& path, const Grid& grid,
                             const GridFunction& f) {
  require_match(grid, f);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (grid.dim == 1) {
    out << "x,value\n";
    for (int i = 0; i < grid.size(); ++i)
      out << format_double(grid.x(i)) << ',' << format_double(f[i]) << '\n';
  } else {
    out << "x,y,value\n";
    for (int i = 0; i < grid.size(); ++i)
      out << format_double(grid.x1(i)) << ',' << format_double(grid.x2(i)) << ','
          << format_double(f[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

GridFunction read_grid_function_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid function CSV: " + path);
  GridFunction f(grid.size());
  std::string line;
  int row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      // tolerate a header line
      if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos)
        continue;
    }
    if (row >= grid.size())
      throw std::runtime_error(path + ": more rows than grid nodes (" +
                               std::to_string(grid.size()) + ")");
    auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ": malformed CSV row: " + line);
    try {
      f[row] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": cannot parse value in row: " + line);
    }
    ++row;
  }
  if (row != grid.size())
    throw std::runtime_error(path + ": expected " + std::to_string(grid.size()) +
                             " rows, got " + std::to_string(row));
  if (!f.allFinite())
    throw std::runtime_error(path + ": non-finite values");
  return f;
}

}  // namespace fraclp
