#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpjr/problem.hpp"
#include "mpjr/solver.hpp"

namespace mpjr {

/// CSV `step,pseudo_time,u_bar,u_bar_over_hrms,reaction_force`, one row per
/// converged step, values at 17 significant digits. A non-empty `hash` adds a
/// leading `# config_hash=` comment line.
void write_history(const RunHistory& history, const std::filesystem::path& path,
                   const std::string& hash = {});

// Reads a history CSV back (comment lines skipped).
std::vector<StepRecord> read_history(const std::filesystem::path& path);

struct SectionRow {
  double coord = 0.0;
  double z = 0.0;
  double g_n_star = 0.0;
  double p_n = 0.0;
  double p_n_over_estar = 0.0;
};

// Index of the value in `rows` (ascending) nearest to `position`; ties go lower.
int nearest_row(const std::vector<double>& rows, double position);

/// Interface points along the line where `axis` equals `position` * L (3D),
/// or along the whole profile (2D). Duplicated nodal points are merged.
/// Returned in dimensional units.
std::vector<SectionRow> extract_section(const System& system, const Eigen::VectorXd& u,
                                        char axis, double position, const Scaling& scaling);

void write_section(const System& system, const Eigen::VectorXd& u, char axis, double position,
                   const std::filesystem::path& path, const Scaling& scaling,
                   const std::string& hash = {});

// Per-element, per-point debug dump of embedded data and current gap/traction.
void write_interface_dump(const System& system, const Eigen::VectorXd& u,
                          const std::filesystem::path& path, const Scaling& scaling,
                          const std::string& hash = {});

/// Legacy VTK ASCII unstructured grid: bulk cells plus interface cells (lines
/// in 2D, quads in 3D) with displacement point data and E / phase / p_n /
/// normal-stress cell data.
void write_fields(const System& system, const Eigen::VectorXd& u,
                  const std::filesystem::path& path, const Scaling& scaling,
                  const std::string& hash = {});

}  // namespace mpjr
