#pragma once

#include <memory>

#include "mpjr/afm_ingest.hpp"
#include "mpjr/config.hpp"
#include "mpjr/solver.hpp"

namespace mpjr {

// Internal units: lengths in L, stresses in E*.
struct Scaling {
  double length = 1.0;
  double stress = 1.0;
  int dim = 2;
  double force() const { return stress * (dim == 2 ? length : length * length); }
};

struct Problem {
  std::unique_ptr<System> system;
  LoadPath path;
  Scaling scaling;
  double h_rms = 0.0;  // mm
  double e_star = 0.0;
  double e_matrix = 0.0;
  double e_inclusion = 0.0;
  double k_cap = 0.0;  // N/mm^3
  PhaseMask mask;
};

/// Loads and preprocesses the grids, builds the nondimensional mesh and
/// interface layer, and resolves the load path.
Problem build_problem(const RunConfig& config);

SolverOptions solver_options(const RunConfig& config);

// Converts a history recorded in internal units to mm / N.
RunHistory redimensionalize(const RunHistory& history, const Scaling& scaling);

}  // namespace mpjr
