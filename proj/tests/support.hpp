#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include "mpjr/afm_ingest.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh per-test scratch directory under the system temp dir.
inline fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mpjr_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline mpjr::ScanGrid make_grid(int nx, int ny, mpjr::FieldKind kind,
                                const std::function<double(int, int)>& f, double dx = 1.0,
                                double dy = 1.0) {
  mpjr::ScanGrid g;
  g.nx = nx;
  g.ny = ny;
  g.dx = dx;
  g.dy = dy;
  g.kind = kind;
  g.unit = "-";
  g.values.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g.at(i, j) = f(i, j);
  return g;
}

inline mpjr::ScanGrid constant_grid(int nx, int ny, mpjr::FieldKind kind, double v) {
  return make_grid(nx, ny, kind, [v](int, int) { return v; });
}

// Relative difference with an absolute floor.
inline double rel(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Adaptive Simpson quadrature, used as an independent oracle.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace testing
