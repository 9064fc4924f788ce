#include "mpjr/afm_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view token, int line) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse number '" +
                         std::string(token) + "'",
                     line);
  }
  return value;
}

bool is_height(const ScanGrid& g) { return g.kind == FieldKind::height; }

}  // namespace

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::height: return "height";
    case FieldKind::peak_force: return "peak_force";
    case FieldKind::dissipation: return "dissipation";
    case FieldKind::modulus: return "modulus";
  }
  return "unknown";
}

FieldKind field_kind_from_string(std::string_view name) {
  for (auto k : {FieldKind::height, FieldKind::peak_force, FieldKind::dissipation,
                 FieldKind::modulus}) {
    if (to_string(k) == name) return k;
  }
  throw DataError("unknown field kind '" + std::string(name) + "'");
}

void ScanGrid::validate() const {
  if (nx < 2 || ny < 1) {
    throw DataError("grid must have nx >= 2 and ny >= 1, got " + std::to_string(nx) +
                    "x" + std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0)) throw DataError("grid spacing must be positive");
  if (values.size() != static_cast<std::size_t>(nx) * ny) {
    throw DataError("grid value count does not match nx*ny");
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = at(i, j);
      const std::string where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (!std::isfinite(v)) throw DataError("non-finite value at " + where);
      if ((kind == FieldKind::peak_force || kind == FieldKind::dissipation) && v < 0.0) {
        throw DataError(std::string(to_string(kind)) + " must be >= 0 at " + where);
      }
      if (kind == FieldKind::modulus && !(v > 0.0)) {
        throw DataError("modulus must be > 0 at " + where);
      }
    }
  }
}

void shift_datum(ScanGrid& grid) {
  if (grid.values.empty()) return;
  const double lo = *std::min_element(grid.values.begin(), grid.values.end());
  for (double& v : grid.values) v -= lo;
}

ScanGrid parse_scan_grid(std::string_view text, FieldKind kind, double unit_scale) {
  if (!(unit_scale > 0.0)) throw DataError("unit_scale must be positive");

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  if (lines.size() < 4) {
    throw ParseError("line " + std::to_string(lines.size() + 1) + ": truncated header",
                     static_cast<int>(lines.size()) + 1);
  }

  ScanGrid g;
  g.kind = kind;
  g.unit_scale = unit_scale;

  auto dims = split_ws(lines[0]);
  if (dims.size() != 2) throw ParseError("line 1: expected 'nx ny'", 1);
  g.nx = parse_number<int>(dims[0], 1);
  g.ny = parse_number<int>(dims[1], 1);
  if (g.nx < 2 || g.ny < 1) throw ParseError("line 1: nx must be >= 2 and ny >= 1", 1);

  auto spacing = split_ws(lines[1]);
  if (spacing.size() != 2) throw ParseError("line 2: expected 'dx dy'", 2);
  g.dx = parse_number<double>(spacing[0], 2);
  g.dy = parse_number<double>(spacing[1], 2);
  if (!(g.dx > 0.0) || !(g.dy > 0.0)) throw ParseError("line 2: spacing must be positive", 2);

  const auto file_kind = trim(lines[2]);
  if (file_kind != to_string(kind)) {
    throw ParseError("line 3: file declares kind '" + std::string(file_kind) +
                         "' but '" + std::string(to_string(kind)) + "' was requested",
                     3);
  }
  g.unit = std::string(trim(lines[3]));

  if (lines.size() != static_cast<std::size_t>(4 + g.ny)) {
    const int bad = static_cast<int>(std::min(lines.size(), static_cast<std::size_t>(4 + g.ny))) + 1;
    throw ParseError("line " + std::to_string(bad) + ": expected " + std::to_string(g.ny) +
                         " data rows, found " + std::to_string(lines.size() - 4),
                     bad);
  }

  g.values.resize(static_cast<std::size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j) {
    const int line_no = 5 + j;
    auto tokens = split_ws(lines[4 + j]);
    if (static_cast<int>(tokens.size()) != g.nx) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(g.nx) + " values, found " +
                           std::to_string(tokens.size()),
                       line_no);
    }
    for (int i = 0; i < g.nx; ++i) {
      const double v = parse_number<double>(tokens[i], line_no);
      if (!std::isfinite(v)) {
        throw DataError("non-finite value at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
      g.at(i, j) = v * unit_scale;
    }
  }

  if (is_height(g)) shift_datum(g);
  g.validate();
  return g;
}

ScanGrid load_scan_grid(const std::filesystem::path& path, FieldKind kind,
                        double unit_scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open grid file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scan_grid(buf.str(), kind, unit_scale);
}

void write_scan_grid(const ScanGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  out << grid.nx << ' ' << grid.ny << '\n';
  std::snprintf(buf, sizeof buf, "%.17g %.17g", grid.dx, grid.dy);
  out << buf << '\n' << to_string(grid.kind) << '\n'
      << (grid.unit.empty() ? "-" : grid.unit) << '\n';
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.at(i, j));
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  }
}

void write_grid_csv(const ScanGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "i,j,x,y," << to_string(grid.kind) << '\n';
  char buf[160];
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", i, j, i * grid.dx,
                    j * grid.dy, grid.at(i, j));
      out << buf;
    }
  }
}

ScanGrid extract_profile(const ScanGrid& grid, int row_index) {
  if (row_index < 0 || row_index >= grid.ny) {
    throw DataError("row index " + std::to_string(row_index) + " out of range [0," +
                    std::to_string(grid.ny) + ")");
  }
  ScanGrid out = grid;
  out.ny = 1;
  const auto first = grid.values.begin() + static_cast<std::ptrdiff_t>(row_index) * grid.nx;
  out.values.assign(first, first + grid.nx);
  if (is_height(out)) shift_datum(out);
  return out;
}

ScanGrid downsample(const ScanGrid& grid, int factor) {
  if (factor < 1) throw DataError("downsample factor must be >= 1");
  ScanGrid out = grid;
  out.nx = (grid.nx - 1) / factor + 1;
  out.ny = (grid.ny - 1) / factor + 1;
  out.dx = grid.dx * factor;
  out.dy = grid.dy * factor;
  out.values.resize(static_cast<std::size_t>(out.nx) * out.ny);
  for (int j = 0; j < out.ny; ++j) {
    for (int i = 0; i < out.nx; ++i) out.at(i, j) = grid.at(i * factor, j * factor);
  }
  if (is_height(out)) shift_datum(out);
  return out;
}

PhaseMask segment_phases(const ScanGrid& modulus, double threshold) {
  if (modulus.kind != FieldKind::modulus) throw DataError("segment_phases needs a modulus grid");
  if (!(threshold > 0.0)) throw DataError("phase threshold must be positive");

  PhaseMask mask;
  mask.nx = modulus.nx;
  mask.ny = modulus.ny;
  mask.threshold = threshold;
  mask.labels.resize(modulus.values.size());

  std::size_t n_inc = 0;
  double sum_inc = 0.0;
  double sum_mat = 0.0;
  for (std::size_t k = 0; k < modulus.values.size(); ++k) {
    const double v = modulus.values[k];
    const int label = v < threshold ? 1 : 0;
    mask.labels[k] = label;
    if (label) {
      ++n_inc;
      sum_inc += v;
    } else {
      sum_mat += v;
    }
  }
  const std::size_t n = modulus.values.size();
  const std::size_t n_mat = n - n_inc;
  mask.inclusion_fraction = static_cast<double>(n_inc) / static_cast<double>(n);
  mask.matrix_fraction = static_cast<double>(n_mat) / static_cast<double>(n);
  mask.inclusion_mean = n_inc ? sum_inc / static_cast<double>(n_inc) : 0.0;
  mask.matrix_mean = n_mat ? sum_mat / static_cast<double>(n_mat) : 0.0;
  return mask;
}

double effective_modulus(const std::vector<PhaseFraction>& phases) {
  if (phases.empty()) throw DataError("effective_modulus needs at least one phase");
  double fsum = 0.0;
  double e = 0.0;
  for (const auto& p : phases) {
    if (p.fraction < 0.0) throw DataError("phase fraction must be >= 0");
    if (!(p.modulus > 0.0)) throw DataError("phase modulus must be > 0");
    fsum += p.fraction;
    e += p.fraction * p.modulus;
  }
  if (std::abs(fsum - 1.0) > 1e-12) {
    throw DataError("phase fractions must sum to 1 (got " + std::to_string(fsum) + ")");
  }
  return e;
}

double rms_roughness(const ScanGrid& grid) {
  const double n = static_cast<double>(grid.values.size());
  const double mean = std::accumulate(grid.values.begin(), grid.values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : grid.values) var += (v - mean) * (v - mean);
  return std::sqrt(var / n);
}

}  // namespace mpjr
