#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "mpjr/writers.hpp"

namespace {

int cli(const std::string& args, const testing::fs::path& log) {
  const std::string cmd = std::string(MPJR_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const testing::fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

testing::Dataset small_strip() {
  testing::Dataset d;
  d.nx = 17;
  d.ny = 1;
  d.spacing = 1.0 / 16;
  d.height = [](int i, int) { return 0.02 * (i % 4); };
  d.peak_force = [](int, int) { return 0.1; };
  d.dissipation = [](int, int) { return 0.1; };
  d.modulus = [](int i, int) { return i < 8 ? 1.0 : 2.0; };
  return d;
}

}  // namespace

TEST_CASE("check-law reports a consistent law") {
  const auto dir = testing::scratch("cli_law");
  REQUIRE(cli("check-law --delta-gamma 1 --p-max 1 --k-cap 60 --csv " + (dir / "law.csv").string(), dir / "log") == 0);
  const std::string log = slurp(dir / "log");
  CHECK(log.find("g0") != std::string::npos);
  const std::string csv = slurp(dir / "law.csv");
  CHECK(csv.rfind("g,p_n,dp_dg\n", 0) == 0);
}

TEST_CASE("check-law rejects a cap outside the admissible window") {
  const auto dir = testing::scratch("cli_law_bad");
  CHECK(cli("check-law --delta-gamma 1 --p-max 1 --k-cap 1", dir / "log") == 2);
}

TEST_CASE("run writes all outputs stamped with the config hash") {
  const auto dir = testing::scratch("cli_run");
  testing::write_dataset(dir, small_strip());
  testing::write_text(dir / "run.cfg",
                      testing::config_text("geometry.L = 1\ngeometry.n_surface = 8\ngeometry.n_layers = 2\ngeometry.t = 0.25\n"
                                           "law.k_cap = 6\nload.unit = 0.1\nload.ramps = -1:4, 3:8\n"
                                           "output.sections = x:0.5\n"));
  const auto out = dir / "out";
  REQUIRE(cli("run --config " + (dir / "run.cfg").string() + " --out " + out.string() + " --snapshot-every 4",
              dir / "log") == 0);
  for (const char* f : {"history.csv", "fields_final.vtk", "interface_final.csv", "config.resolved"}) {
    CHECK_MESSAGE(testing::fs::exists(out / f), f);
  }
  const auto rows = mpjr::read_history(out / "history.csv");
  CHECK(rows.size() == 12);
  const std::string resolved = slurp(out / "config.resolved");
  const std::string history = slurp(out / "history.csv");
  const auto pos = history.find("# config_hash=");
  REQUIRE(pos == 0);
  const std::string hash = history.substr(14, history.find('\n') - 14);
  CHECK(!hash.empty());
  CHECK(resolved.find(hash) != std::string::npos);
  CHECK(slurp(out / "fields_final.vtk").find("config_hash=" + hash) != std::string::npos);
  bool snapshot = false;
  for (const auto& e : testing::fs::directory_iterator(out)) {
    snapshot = snapshot || e.path().filename().string().rfind("fields_0", 0) == 0;
  }
  CHECK(snapshot);
}

TEST_CASE("run exits with the configuration error code on a bad key") {
  const auto dir = testing::scratch("cli_bad_config");
  testing::write_dataset(dir, small_strip());
  testing::write_text(dir / "run.cfg", testing::config_text("geometry.no_such_key = 1\n"));
  CHECK(cli("run --config " + (dir / "run.cfg").string() + " --out " + (dir / "out").string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("geometry.no_such_key") != std::string::npos);
}
