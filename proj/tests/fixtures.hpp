#pragma once

// Synthetic scan-grid datasets written to disk, plus matching config text.

#include <functional>
#include <sstream>
#include <string>

#include "mpjr/afm_ingest.hpp"
#include "support.hpp"

namespace testing {

using Field = std::function<double(int, int)>;

struct Dataset {
  int nx = 0;
  int ny = 0;
  double spacing = 1.0;
  Field height;
  Field peak_force;
  Field dissipation;
  Field modulus;
};

inline void write_dataset(const fs::path& dir, const Dataset& d) {
  using mpjr::FieldKind;
  mpjr::write_scan_grid(make_grid(d.nx, d.ny, FieldKind::height, d.height, d.spacing, d.spacing), dir / "height.grid");
  mpjr::write_scan_grid(make_grid(d.nx, d.ny, FieldKind::peak_force, d.peak_force, d.spacing, d.spacing),
                        dir / "peak_force.grid");
  mpjr::write_scan_grid(make_grid(d.nx, d.ny, FieldKind::dissipation, d.dissipation, d.spacing, d.spacing),
                        dir / "dissipation.grid");
  mpjr::write_scan_grid(make_grid(d.nx, d.ny, FieldKind::modulus, d.modulus, d.spacing, d.spacing),
                        dir / "modulus.grid");
}

// File keys (relative to the dataset directory) followed by `extra` lines.
inline std::string config_text(const std::string& extra) {
  std::ostringstream o;
  o << "# synthetic dataset\n"
    << "files.height = height.grid\n"
    << "files.peak_force = peak_force.grid\n"
    << "files.dissipation = dissipation.grid\n"
    << "files.modulus = modulus.grid\n"
    << extra;
  return o.str();
}

}  // namespace testing
