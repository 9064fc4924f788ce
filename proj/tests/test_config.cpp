#include "doctest.h"
#include "fixtures.hpp"
#include "mpjr/config.hpp"
#include "mpjr/errors.hpp"
#include "mpjr/problem.hpp"

using namespace mpjr;
using testing::config_text;

namespace {

testing::Dataset small_dataset(int n = 17) {
  testing::Dataset d;
  d.nx = d.ny = n;
  d.spacing = 5e-3 / (n - 1);
  d.height = [](int i, int j) { return 1e-6 * std::sin(0.7 * i) * std::cos(0.3 * j); };
  d.peak_force = [](int, int) { return 1.0; };
  d.dissipation = [](int, int) { return 1e-6; };
  d.modulus = [](int i, int) { return i % 4 == 0 ? 60.0 : 130.0; };
  return d;
}

std::string key_of(const std::string& text, const testing::fs::path& dir) {
  try {
    validate_config(parse_config_text(text, dir));
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const auto dir = testing::scratch("cfg_minimal");
  testing::write_dataset(dir, small_dataset());
  testing::write_text(dir / "run.cfg", config_text(""));
  const RunConfig c = parse_config(dir / "run.cfg");
  CHECK(c.k_t == 100.0);
  CHECK(c.nu == 0.32);
  CHECK(c.tol_rel == 1e-8);
  CHECK(c.threshold == 72.44);
  CHECK(c.dim == 2);
  CHECK(c.ramps == std::vector<Ramp>{{-3.0, 60}, {10.0, 130}});
  CHECK(testing::fs::path(c.height_file).is_absolute());
  CHECK(testing::fs::path(c.height_file) == testing::fs::weakly_canonical(dir / "height.grid"));
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("validation names the offending key") {
  const auto dir = testing::scratch("cfg_errors");
  testing::write_dataset(dir, small_dataset());
  CHECK(key_of(config_text("geometry.t = 0\n"), dir) == "geometry.t");
  CHECK(key_of(config_text("geometry.t = -1e-4\n"), dir) == "geometry.t");
  CHECK(key_of(config_text("material.nu = 0.5\n"), dir) == "material.nu");
  CHECK(key_of(config_text("geometry.bogus = 1\n"), dir) == "geometry.bogus");
  CHECK(key_of(config_text("law.k_t = abc\n"), dir) == "law.k_t");
  CHECK(key_of(config_text("geometry.n_surface = 8\ngeometry.n_surface = 16\n"), dir) == "geometry.n_surface");
  CHECK(key_of(config_text("load.ramps = 1:0\n"), dir) == "load.ramps");
  CHECK(key_of(config_text("output.sections = z:0.5\n"), dir) == "output.sections");
  CHECK(key_of("files.height = height.grid\n", dir) == "files.peak_force");
  testing::fs::remove(dir / "modulus.grid");
  CHECK(key_of(config_text(""), dir) == "files.modulus");
}

TEST_CASE("malformed line reports its number") {
  try {
    parse_config_text("# header\nfiles.height = a\nthis line is wrong\n", ".");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("write then parse is the identity") {
  const auto dir = testing::scratch("cfg_roundtrip");
  testing::write_dataset(dir, small_dataset());
  RunConfig c = parse_config_text(config_text(""), dir);
  c.dim = 3;
  c.length = 1.0 / 3.0;
  c.thickness = 2.5e-4;
  c.grading = 1.2;
  c.n_layers = 5;
  c.profile_row = 3;
  c.downsample = 2;
  c.homogenized = true;
  c.e_matrix = 128.67;
  c.e_inclusion = 64.27;
  c.k_cap = 1.234567890123e8;
  c.g_init = "1e-06";
  c.penalty = true;
  c.quadrature = "gauss";
  c.load_unit = "2.5e-05";
  c.ramps = {{-0.25, 7}, {0.1 + 0.2, 3}};
  c.tol_rel = 1e-9;
  c.continue_on_snap = false;
  c.snapshot_every = 5;
  c.sections = {{'x', 0.38}, {'y', 0.75}};
  c.height_scale = 1e-6;
  const std::string text = write_config(c);
  const RunConfig back = parse_config_text(text, dir);
  CHECK(back == c);
  CHECK(write_config(back) == text);
  CHECK(config_hash(back) == config_hash(c));
  RunConfig other = c;
  other.nu = 0.3;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("problem setup resolves moduli, scaling and load unit") {
  const auto dir = testing::scratch("cfg_problem");
  testing::write_dataset(dir, small_dataset());
  // Adhesion chosen so that the default cap 100 E*/L is admissible.
  testing::Dataset data = small_dataset();
  data.dissipation = [](int, int) { return 2.6e-5; };
  testing::write_dataset(dir, data);
  RunConfig c = parse_config_text(config_text("geometry.n_surface = 16\n"), dir);
  validate_config(c);
  const Problem pb = build_problem(c);
  // Middle row, 4 of 17 samples below threshold.
  CHECK(pb.mask.inclusion_fraction == doctest::Approx(5.0 / 17.0));
  CHECK(pb.e_matrix == 130.0);
  CHECK(pb.e_inclusion == 60.0);
  CHECK(pb.e_star == doctest::Approx(12.0 / 17.0 * 130.0 + 5.0 / 17.0 * 60.0));
  CHECK(pb.scaling.length == 5e-3);
  CHECK(pb.scaling.stress == pb.e_star);
  CHECK(pb.path.unit_length * pb.scaling.length == doctest::Approx(pb.h_rms));
  CHECK(pb.system->mesh().length == 1.0);
  CHECK(pb.k_cap == doctest::Approx(100.0 * pb.e_star / 5e-3));
  CHECK(pb.system->interface().size() == 16);

  // The same cap is far too soft for nanometre-scale equilibrium gaps.
  testing::write_dataset(dir, small_dataset());
  CHECK_THROWS_AS(build_problem(c), DataError);
  c.k_cap = 1e8;
  CHECK(build_problem(c).k_cap == 1e8);

  testing::Dataset flat = small_dataset();
  flat.height = [](int, int) { return 0.0; };
  testing::write_dataset(dir, flat);
  try {
    build_problem(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "load.unit");
  }
  c.load_unit = "1e-6";
  CHECK(build_problem(c).path.unit_length == doctest::Approx(1e-6 / 5e-3));
}
