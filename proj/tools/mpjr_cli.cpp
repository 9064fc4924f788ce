// mpjr: adhesive rough-contact FEM driver.
//
//   mpjr run --config run.cfg --out outdir
//   mpjr check-law --delta-gamma 1 --p-max 1 --k-cap 100
//   mpjr preprocess --input h.grid --kind height --downsample 4 --out h4.grid
//   mpjr mesh-dump --config run.cfg --out mesh.vtk

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mpjr/afm_ingest.hpp"
#include "mpjr/config.hpp"
#include "mpjr/errors.hpp"
#include "mpjr/interface_law.hpp"
#include "mpjr/problem.hpp"
#include "mpjr/writers.hpp"

namespace fs = std::filesystem;
using namespace mpjr;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNonconvergence = 3;

struct RunArgs {
  std::string config;
  std::string out;
  int snapshot_every = -1;
  bool penalty = false;
  bool homogenized = false;
};

void write_outputs(const Problem& pb, const RunHistory& raw, const RunConfig& cfg,
                   const fs::path& out, const std::string& hash) {
  write_history(redimensionalize(raw, pb.scaling), out / "history.csv", hash);
  if (raw.final_u.size() == 0) return;
  const System& sys = *pb.system;
  write_fields(sys, raw.final_u, out / "fields_final.vtk", pb.scaling, hash);
  write_interface_dump(sys, raw.final_u, out / "interface_final.csv", pb.scaling, hash);
  for (const auto& s : cfg.sections) {
    char name[64];
    std::snprintf(name, sizeof name, "section_%c_%.4f.csv", s.axis, s.position);
    write_section(sys, raw.final_u, s.axis, s.position, out / name, pb.scaling, hash);
  }
  for (const auto& snap : raw.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "fields_%05d.vtk", snap.step);
    write_fields(sys, snap.u, out / name, pb.scaling, hash);
  }
}

int cmd_run(const RunArgs& args) {
  RunConfig cfg;
  try {
    cfg = parse_config(args.config);
    if (args.snapshot_every >= 0) cfg.snapshot_every = args.snapshot_every;
    if (args.penalty) cfg.penalty = true;
    if (args.homogenized) cfg.homogenized = true;
    validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const fs::path out(args.out);
  fs::create_directories(out);
  const std::string hash = config_hash(cfg);
  {
    std::ofstream echo(out / "config.resolved");
    echo << "# config_hash=" << hash << '\n' << write_config(cfg);
  }

  Problem pb;
  try {
    pb = build_problem(cfg);
  } catch (const std::exception& e) {
    std::cerr << "setup error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::cout << "dofs " << pb.system->num_dofs() << " (free " << pb.system->num_free()
            << "), interface elements " << pb.system->interface().size() << '\n'
            << "E* = " << pb.e_star << " MPa, h_rms = " << pb.h_rms << " mm, k_cap = "
            << pb.k_cap << " N/mm^3\n";

  const SolverOptions opt = solver_options(cfg);

  const double force_scale = pb.scaling.force();
  const double len = pb.scaling.length;
  auto progress = [&](const StepRecord& r, const Eigen::VectorXd&) {
    std::printf("step %4d  t=%.4f  u=%+.6e  P=%+.6e  it=%d%s\n", r.step, r.pseudo_time,
                r.u_bar * len, r.reaction * force_scale, r.iterations,
                r.snapped ? "  (snap)" : "");
  };

  RunHistory raw;
  int code = 0;
  try {
    raw = run(*pb.system, pb.path, opt, progress);
    if (!raw.failures.empty()) {
      std::cerr << raw.failures.size() << " step(s) did not converge\n";
      code = kExitNonconvergence;
    }
  } catch (const RunFailure& e) {
    std::cerr << "nonconvergence: " << e.what() << '\n';
    raw = e.history();
    code = kExitNonconvergence;
  }
  write_outputs(pb, raw, cfg, out, hash);
  return code;
}

struct LawArgs {
  double delta_gamma = 0.0;
  double p_max = 0.0;
  double k_cap = 0.0;
  std::string csv;
  int points = 400;
};

int cmd_check_law(const LawArgs& a) {
  LJLawParams law;
  try {
    law = derive_params(a.delta_gamma, a.p_max, a.k_cap);
  } catch (const std::exception& e) {
    std::cerr << "law error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::printf("delta_gamma  %.10g\np_max        %.10g\nk_cap        %.10g\n", law.delta_gamma,
              law.p_max, a.k_cap);
  std::printf("g0           %.10g\ng_max        %.10g\na1           %.10g\na2           %.10g\n",
              law.g0, law.g_max, law.a1, law.a2);
  std::printf("b1 b2        %g %g\n", law.b1, law.b2);
  std::printf("g_n0         %.10g  (p = %.10g)\n", law.g_n0, law.p_n0);
  std::printf("g_nc1        %.10g  (p = %.10g)\n", law.g_nc1, law.p_nc1);
  std::printf("g_nc2        %.10g\n", law.g_nc2);
  std::printf("A_tot        %.10g\n", law.a_tot);

  const double p_peak = traction(law, law.g_max);
  const double peak_err = std::abs(p_peak - law.p_max) / law.p_max;
  std::printf("peak check   p(g_max) = %.12g, rel err %.2e %s\n", p_peak, peak_err,
              peak_err < 1e-10 ? "ok" : "FAIL");
  // The analytic law leaves (4/3)(g0/G)^2 dgamma beyond G = 1e3 g0.
  const double w = analytic_area(law, law.g0, 1e3 * law.g0);
  const double tail = analytic_area(law, 1e3 * law.g0, 1e12 * law.g0);
  std::printf("separation   int_g0^1e3g0 p = %.12g, + tail = %.12g (delta_gamma %.12g, rel %.2e)\n",
              w, w + tail, law.delta_gamma, std::abs(w + tail - law.delta_gamma) / law.delta_gamma);
  std::printf("max |dp/dg|  softening %.10g at g = %.10g\n", max_softening_slope(law),
              inflection_gap(law));

  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) {
      std::cerr << "cannot write " << a.csv << '\n';
      return 1;
    }
    out << "g,p_n,dp_dg\n";
    const double g_lo = law.g_n0 - 0.5 * (law.g0 - law.g_n0);
    const double g_hi = 1.1 * law.g_nc2;
    char line[96];
    for (int k = 0; k < a.points; ++k) {
      const double g = g_lo + (g_hi - g_lo) * k / (a.points - 1);
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", g, traction(law, g),
                    tangent(law, g));
      out << line;
    }
  }
  return 0;
}

struct PreArgs {
  std::string input;
  std::string kind;
  double scale = 1.0;
  int downsample = 1;
  int row = -1;
  double threshold = std::nan("");
  std::string out;
  std::string csv;
};

int cmd_preprocess(const PreArgs& a) {
  try {
    ScanGrid g = load_scan_grid(a.input, field_kind_from_string(a.kind), a.scale);
    if (a.downsample > 1) g = downsample(g, a.downsample);
    if (a.row >= 0) g = extract_profile(g, a.row);
    std::printf("grid %dx%d  dx=%g dy=%g\n", g.nx, g.ny, g.dx, g.dy);
    if (g.kind == FieldKind::height) std::printf("h_rms %.10g\n", rms_roughness(g));
    if (!std::isnan(a.threshold)) {
      const PhaseMask m = segment_phases(g, a.threshold);
      std::printf("inclusion fraction %.6f (mean %.6g), matrix fraction %.6f (mean %.6g)\n",
                  m.inclusion_fraction, m.inclusion_mean, m.matrix_fraction, m.matrix_mean);
      std::vector<PhaseFraction> phases;
      if (m.matrix_fraction > 0.0) phases.push_back({m.matrix_fraction, m.matrix_mean});
      if (m.inclusion_fraction > 0.0) phases.push_back({m.inclusion_fraction, m.inclusion_mean});
      std::printf("E* %.10g\n", effective_modulus(phases));
    }
    if (!a.out.empty()) write_scan_grid(g, a.out);
    if (!a.csv.empty()) write_grid_csv(g, a.csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

int cmd_mesh_dump(const std::string& config, const std::string& out) {
  try {
    RunConfig cfg = parse_config(config);
    validate_config(cfg);
    const Problem pb = build_problem(cfg);
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(pb.system->num_dofs());
    write_fields(*pb.system, u, out, pb.scaling, config_hash(cfg));
    std::printf("nodes %d, bulk elements %zu, interface elements %zu\n",
                pb.system->mesh().num_nodes(), pb.system->mesh().bulk_elements.size(),
                pb.system->interface().size());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adhesive rough-contact FEM with embedded-profile interface elements"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Full displacement-controlled simulation");
  run_cmd->add_option("--config", run_args.config, "Run configuration file")->required();
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();
  run_cmd->add_option("--snapshot-every", run_args.snapshot_every, "Write fields every n steps");
  run_cmd->add_flag("--penalty-mode", run_args.penalty, "Adhesion-free penalty interface");
  run_cmd->add_flag("--homogenized", run_args.homogenized, "Single-phase bulk at E*");

  LawArgs law_args;
  auto* law_cmd = app.add_subcommand("check-law", "Interface law diagnostics");
  law_cmd->add_option("--delta-gamma", law_args.delta_gamma, "Adhesion energy (N/mm)")->required();
  law_cmd->add_option("--p-max", law_args.p_max, "Peak adhesive traction (MPa)")->required();
  law_cmd->add_option("--k-cap", law_args.k_cap, "Repulsive slope (N/mm^3)")->required();
  law_cmd->add_option("--csv", law_args.csv, "Dump g,p_n,dp_dg");
  law_cmd->add_option("--points", law_args.points, "Curve samples")->check(CLI::Range(2, 1000000));

  PreArgs pre_args;
  auto* pre_cmd = app.add_subcommand("preprocess", "Downsample / extract profile / segment");
  pre_cmd->add_option("--input", pre_args.input, "Scan grid file")->required();
  pre_cmd->add_option("--kind", pre_args.kind, "height|peak_force|dissipation|modulus")->required();
  pre_cmd->add_option("--scale", pre_args.scale, "Unit scale factor");
  pre_cmd->add_option("--downsample", pre_args.downsample, "Stride")->check(CLI::PositiveNumber);
  pre_cmd->add_option("--extract-row", pre_args.row, "Keep a single row");
  pre_cmd->add_option("--segment", pre_args.threshold, "Phase threshold");
  pre_cmd->add_option("--out", pre_args.out, "Output grid file");
  pre_cmd->add_option("--csv", pre_args.csv, "Output CSV");

  std::string dump_config, dump_out;
  auto* dump_cmd = app.add_subcommand("mesh-dump", "Write the undeformed mesh as VTK");
  dump_cmd->add_option("--config", dump_config, "Run configuration file")->required();
  dump_cmd->add_option("--out", dump_out, "VTK file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run_cmd) return cmd_run(run_args);
  if (*law_cmd) return cmd_check_law(law_args);
  if (*pre_cmd) return cmd_preprocess(pre_args);
  return cmd_mesh_dump(dump_config, dump_out);
}
