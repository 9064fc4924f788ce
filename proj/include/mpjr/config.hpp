#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mpjr/solver.hpp"

namespace mpjr {

struct SectionRequest {
  char axis = 'x';        // coordinate held fixed
  double position = 0.5;  // fraction of L
  bool operator==(const SectionRequest&) const = default;
};

// Resolved run configuration. Units are mm, N, MPa throughout.
struct RunConfig {
  std::string height_file;
  std::string peak_force_file;
  std::string dissipation_file;
  std::string modulus_file;
  double height_scale = 1.0;
  double peak_force_scale = 1.0;
  double dissipation_scale = 1.0;
  double modulus_scale = 1.0;

  int dim = 2;
  double length = 5e-3;
  double thickness = 2e-4;
  int n_surface = 64;
  double grading = 1.0;
  int n_layers = 8;
  int profile_row = -1;  // -1 = middle row
  int downsample = 1;

  double nu = 0.32;
  double threshold = 72.44;
  bool homogenized = false;
  double e_matrix = 0.0;     // 0 = mean of the matrix phase in the modulus map
  double e_inclusion = 0.0;  // 0 = mean of the inclusion phase
  double e_star = 0.0;       // 0 = mixture rule

  double k_t = 100.0;
  double k_cap = 0.0;  // 0 = k_t * E* / L
  std::string g_init = "g0";
  bool penalty = false;
  std::string quadrature = "nodal";

  std::string load_unit = "h_rms";  // or a length in mm
  std::vector<Ramp> ramps{{-3.0, 60}, {10.0, 130}};

  double tol_rel = 1e-8;
  double tol_abs = 1e-12;
  int max_iterations = 25;
  int max_depth = 10;
  bool continue_on_snap = true;

  int snapshot_every = 0;
  std::vector<SectionRequest> sections;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the flat `section.key = value` format (`#` starts a comment).
/// Relative file paths resolve against `base_dir`. Throws ConfigError naming
/// the offending key, or ParseError for malformed lines.
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir);
RunConfig parse_config(const std::filesystem::path& path);

// Checks ranges and file existence; throws ConfigError.
void validate_config(const RunConfig& config);

// Canonical text form; parse_config_text(write_config(c)) == c.
std::string write_config(const RunConfig& config);

// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace mpjr
