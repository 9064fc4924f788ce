#include "mpjr/problem.hpp"

#include <cmath>
#include <string>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

ScanGrid scaled(ScanGrid g, double factor) {
  for (double& v : g.values) v *= factor;
  return g;
}

}  // namespace

Problem build_problem(const RunConfig& config) {
  ScanGrid height = load_scan_grid(config.height_file, FieldKind::height, config.height_scale);
  ScanGrid peak = load_scan_grid(config.peak_force_file, FieldKind::peak_force, config.peak_force_scale);
  ScanGrid diss = load_scan_grid(config.dissipation_file, FieldKind::dissipation, config.dissipation_scale);
  ScanGrid modulus = load_scan_grid(config.modulus_file, FieldKind::modulus, config.modulus_scale);

  if (config.downsample > 1) {
    height = downsample(height, config.downsample);
    peak = downsample(peak, config.downsample);
    diss = downsample(diss, config.downsample);
    modulus = downsample(modulus, config.downsample);
  }
  if (config.dim == 2 && height.ny > 1) {
    const int row = config.profile_row < 0 ? height.ny / 2 : config.profile_row;
    if (row >= height.ny) throw ConfigError("geometry.profile_row", "row beyond grid");
    height = extract_profile(height, row);
    peak = extract_profile(peak, row);
    diss = extract_profile(diss, row);
    modulus = extract_profile(modulus, row);
  }

  Problem pb;
  pb.mask = segment_phases(modulus, config.threshold);
  pb.e_matrix = config.e_matrix > 0.0 ? config.e_matrix : pb.mask.matrix_mean;
  pb.e_inclusion = config.e_inclusion > 0.0 ? config.e_inclusion : pb.mask.inclusion_mean;
  // An empty phase takes the other phase's modulus.
  if (!(pb.e_matrix > 0.0)) pb.e_matrix = pb.e_inclusion;
  if (!(pb.e_inclusion > 0.0)) pb.e_inclusion = pb.e_matrix;
  pb.e_star = config.e_star > 0.0
                  ? config.e_star
                  : effective_modulus({{pb.mask.matrix_fraction, pb.e_matrix},
                                       {pb.mask.inclusion_fraction, pb.e_inclusion}});

  pb.scaling = Scaling{config.length, pb.e_star, config.dim};
  const double lref = config.length;
  const double eref = pb.e_star;

  const Material base{1.0, config.nu, 0};
  Mesh mesh = config.dim == 2
                  ? generate_mesh_2d(1.0, config.thickness / lref, config.n_surface,
                                     config.grading, config.n_layers, base)
                  : generate_mesh_3d(1.0, config.thickness / lref, config.n_surface,
                                     config.grading, config.n_layers, base);
  if (config.homogenized) {
    mesh.materials = {Material{1.0, config.nu, 0}};
    for (auto& el : mesh.bulk_elements) el.material = 0;
  } else {
    mesh = assign_phases(std::move(mesh), pb.mask, Material{pb.e_matrix / eref, config.nu, 0},
                         Material{pb.e_inclusion / eref, config.nu, 1}, PhaseRule::columnar);
  }

  pb.h_rms = rms_roughness(height);
  pb.k_cap = config.k_cap > 0.0 ? config.k_cap : config.k_t * eref / lref;

  InterfaceOptions opt;
  opt.k_cap = pb.k_cap * lref / eref;
  opt.penalty = config.penalty;
  opt.quadrature = config.quadrature == "gauss" ? Quadrature::gauss : Quadrature::nodal;
  if (config.g_init != "g0") opt.g_init = std::stod(config.g_init) / lref;

  auto iface = build_interface_layer(mesh, scaled(height, 1.0 / lref), scaled(peak, 1.0 / eref),
                                     scaled(diss, 1.0 / (eref * lref)), opt);
  pb.system = std::make_unique<System>(std::move(mesh), std::move(iface));

  pb.path.ramps = config.ramps;
  if (config.load_unit == "h_rms") {
    if (!(pb.h_rms > 0.0)) {
      throw ConfigError("load.unit", "height field is flat (h_rms = 0); give a length instead");
    }
    pb.path.unit_length = pb.h_rms / lref;
  } else {
    pb.path.unit_length = std::stod(config.load_unit) / lref;
  }
  return pb;
}

SolverOptions solver_options(const RunConfig& config) {
  SolverOptions opt;
  opt.tol_rel = config.tol_rel;
  opt.tol_abs = config.tol_abs;
  opt.max_iterations = config.max_iterations;
  opt.max_depth = config.max_depth;
  opt.continue_on_snap = config.continue_on_snap;
  opt.snapshot_every = config.snapshot_every;
  return opt;
}

RunHistory redimensionalize(const RunHistory& history, const Scaling& scaling) {
  RunHistory out = history;
  for (auto& s : out.steps) {
    s.u_bar *= scaling.length;
    s.reaction *= scaling.force();
  }
  for (auto& f : out.failures) f.u_bar *= scaling.length;
  for (auto& snap : out.snapshots) snap.u *= scaling.length;
  out.final_u *= scaling.length;
  return out;
}

}  // namespace mpjr
