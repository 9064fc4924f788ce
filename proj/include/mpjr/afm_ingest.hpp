#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpjr {

enum class FieldKind { height, peak_force, dissipation, modulus };

std::string_view to_string(FieldKind kind);
FieldKind field_kind_from_string(std::string_view name);

// Uniform raster of one scalar surface field, row-major (row j = y index).
struct ScanGrid {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double dy = 1.0;
  FieldKind kind = FieldKind::height;
  double unit_scale = 1.0;
  std::string unit;
  std::vector<double> values;

  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }

  // Throws DataError when shape, spacing or value-range invariants fail.
  void validate() const;
};

struct PhaseMask {
  int nx = 0;
  int ny = 0;
  double threshold = 0.0;
  std::vector<int> labels;  // 0 = matrix (stiffer), 1 = inclusion (softer)

  double inclusion_fraction = 0.0;
  double matrix_fraction = 0.0;
  double inclusion_mean = 0.0;  // 0 when the phase is empty
  double matrix_mean = 0.0;

  int at(int i, int j) const { return labels[static_cast<std::size_t>(j) * nx + i]; }
};

struct PhaseFraction {
  double fraction;
  double modulus;
};

/// Reads the ASCII grid format: `nx ny`, `dx dy`, `kind`, `unit`, then ny
/// rows of nx numbers. Values are multiplied by `unit_scale`; height grids
/// are shifted so that their minimum is zero.
ScanGrid load_scan_grid(const std::filesystem::path& path, FieldKind kind,
                        double unit_scale);
ScanGrid parse_scan_grid(std::string_view text, FieldKind kind, double unit_scale);

void write_scan_grid(const ScanGrid& grid, const std::filesystem::path& path);
void write_grid_csv(const ScanGrid& grid, const std::filesystem::path& path);

ScanGrid extract_profile(const ScanGrid& grid, int row_index);

// Strided selection of indices 0, f, 2f, ... along both axes.
ScanGrid downsample(const ScanGrid& grid, int factor);

PhaseMask segment_phases(const ScanGrid& modulus, double threshold);

double effective_modulus(const std::vector<PhaseFraction>& phases);

// Standard deviation of the field about its mean.
double rms_roughness(const ScanGrid& grid);

void shift_datum(ScanGrid& grid);

}  // namespace mpjr
