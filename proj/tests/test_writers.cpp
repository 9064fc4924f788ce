#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "mpjr/writers.hpp"
#include "support.hpp"

using namespace mpjr;
using testing::make_grid;

namespace {

std::vector<std::string> lines_of(const testing::fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<double> split_csv(const std::string& line) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return v;
}

double g0_of(double dg, double p) { return 16.0 / (9.0 * std::sqrt(3.0)) * dg / p; }

// 3D system with random embedded data; g_init at the traction peak when uniform.
System make_3d(int n, bool uniform) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Mesh mesh = generate_mesh_3d(1.0, 0.3, n, 1.0, 2, Material{1.0, 0.3, 0});
  auto f = [&](double base, double amp) {
    return make_grid(n + 1, n + 1, FieldKind::height, [&](int, int) { return uniform ? base : base + amp * u01(rng); });
  };
  ScanGrid h = f(0.0, 0.01), p = f(0.1, 0.02), d = f(0.1, 0.02);
  p.kind = FieldKind::peak_force;
  d.kind = FieldKind::dissipation;
  InterfaceOptions opt;
  opt.k_cap = 60.0 * 0.1 / std::pow(g0_of(0.1, 0.1), 2);
  if (uniform) opt.g_init = std::pow(3.0, 1.0 / 6.0) * g0_of(0.1, 0.1);
  return System(mesh, build_interface_layer(mesh, h, p, d, opt));
}

}  // namespace

TEST_CASE("history file layout and round trip") {
  const auto dir = testing::scratch("writers_history");
  RunHistory h;
  write_history(h, dir / "empty.csv");
  const auto empty = lines_of(dir / "empty.csv");
  REQUIRE(empty.size() == 1);
  CHECK(empty[0] == "step,pseudo_time,u_bar,u_bar_over_hrms,reaction_force");

  std::mt19937 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int k = 1; k <= 3; ++k) {
    StepRecord r;
    r.step = k;
    r.pseudo_time = k / 3.0;
    r.u_bar = d(rng) * 1e-5;
    r.u_bar_over_unit = d(rng) / 7.0;
    r.reaction = d(rng) * 1e-3;
    h.steps.push_back(r);
  }
  write_history(h, dir / "three.csv");
  CHECK(lines_of(dir / "three.csv").size() == 4);
  const auto back = read_history(dir / "three.csv");
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].step == h.steps[k].step);
    CHECK(back[k].pseudo_time == h.steps[k].pseudo_time);
    CHECK(back[k].u_bar == h.steps[k].u_bar);
    CHECK(back[k].u_bar_over_unit == h.steps[k].u_bar_over_unit);
    CHECK(back[k].reaction == h.steps[k].reaction);
  }
  write_history(h, dir / "hashed.csv", "0123456789abcdef");
  const auto hashed = lines_of(dir / "hashed.csv");
  CHECK(hashed.size() == 5);
  CHECK(hashed[0] == "# config_hash=0123456789abcdef");
  CHECK(read_history(dir / "hashed.csv").size() == 3);
}

TEST_CASE("nearest row selection") {
  std::vector<double> rows;
  for (int k = 0; k < 128; ++k) rows.push_back((k + 0.5) / 128.0);
  CHECK(nearest_row(rows, 0.38) == 48);
  CHECK(nearest_row(rows, 0.0) == 0);
  CHECK(nearest_row(rows, 1.0) == 127);
  CHECK(nearest_row({0.25, 0.75}, 0.5) == 0);
}

TEST_CASE("uniform traction gives a constant section") {
  const System sys = make_3d(4, true);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.num_dofs());
  const Scaling sc{2.0, 10.0, 3};
  const auto rows = extract_section(sys, u, 'x', 0.38, sc);
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) {
    CHECK(r.p_n == doctest::Approx(rows[0].p_n).epsilon(1e-13));
    CHECK(r.p_n == doctest::Approx(0.1 * 10.0).epsilon(1e-12));
    CHECK(r.p_n_over_estar == doctest::Approx(0.1).epsilon(1e-12));
  }
  CHECK(rows.front().coord == 0.0);
  CHECK(rows.back().coord == doctest::Approx(2.0));
  CHECK_THROWS(extract_section(sys, u, 'x', 1.5, sc));
}

TEST_CASE("section equals the filtered interface dump") {
  const auto dir = testing::scratch("writers_section");
  const System sys = make_3d(4, false);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-0.01, 0.01);
  Eigen::VectorXd u(sys.num_dofs());
  for (int k = 0; k < u.size(); ++k) u[k] = d(rng);
  const Scaling sc{1.0, 1.0, 3};
  for (char axis : {'x', 'y'}) {
    write_section(sys, u, axis, 0.6, dir / "sec.csv", sc);
    write_interface_dump(sys, u, dir / "dump.csv", sc);
    const auto sec = lines_of(dir / "sec.csv");
    const auto dump = lines_of(dir / "dump.csv");
    CHECK(sec[0] == "coord,z,g_n_star,p_n,p_n_over_Estar");
    // Nodal points sit on x = k/4; 0.6 is nearest to 0.5.
    const int fixed = axis == 'x' ? 2 : 3, along = axis == 'x' ? 3 : 2;
    std::map<double, std::vector<double>> by_coord;
    for (std::size_t k = 1; k < dump.size(); ++k) {
      const auto v = split_csv(dump[k]);
      if (std::abs(v[fixed] - 0.5) < 1e-12) by_coord[v[along]] = v;
    }
    REQUIRE(sec.size() == by_coord.size() + 1);
    std::size_t k = 1;
    for (const auto& [c, v] : by_coord) {
      const auto s = split_csv(sec[k++]);
      CHECK(s[0] == c);
      CHECK(s[1] == v[4]);
      CHECK(s[2] == v[7]);
      CHECK(s[3] == v[8]);
    }
  }
}

TEST_CASE("2D section spans the whole profile") {
  Mesh mesh = generate_mesh_2d(1.0, 0.3, 8, 1.0, 2);
  const auto layer = build_interface_layer(mesh, testing::constant_grid(9, 1, FieldKind::height, 0.0),
                                           testing::constant_grid(9, 1, FieldKind::peak_force, 0.1),
                                           testing::constant_grid(9, 1, FieldKind::dissipation, 0.1),
                                           InterfaceOptions{60.0 * 0.1 / std::pow(g0_of(0.1, 0.1), 2)});
  const System sys(mesh, layer);
  const auto rows = extract_section(sys, Eigen::VectorXd::Zero(sys.num_dofs()), 'y', 0.5, Scaling{});
  CHECK(rows.size() == 9);
}

TEST_CASE("VTK output passes a structural lint and reloads") {
  const auto dir = testing::scratch("writers_vtk");
  for (bool three_d : {false, true}) {
    Mesh mesh;
    std::vector<MpjrElement> layer;
    if (three_d) {
      mesh = generate_mesh_3d(1.0, 0.3, 3, 1.4, 3);
      layer = build_interface_layer(mesh, testing::constant_grid(4, 4, FieldKind::height, 0.0),
                                    testing::constant_grid(4, 4, FieldKind::peak_force, 0.1),
                                    testing::constant_grid(4, 4, FieldKind::dissipation, 0.1),
                                    InterfaceOptions{60.0 * 0.1 / std::pow(g0_of(0.1, 0.1), 2)});
    } else {
      mesh = generate_mesh_2d(1.0, 0.3, 6, 1.4, 3);
      layer = build_interface_layer(mesh, testing::constant_grid(7, 1, FieldKind::height, 0.0),
                                    testing::constant_grid(7, 1, FieldKind::peak_force, 0.1),
                                    testing::constant_grid(7, 1, FieldKind::dissipation, 0.1),
                                    InterfaceOptions{60.0 * 0.1 / std::pow(g0_of(0.1, 0.1), 2)});
    }
    const System sys(mesh, layer);
    const Scaling sc{3e-3, 100.0, mesh.dim};
    write_fields(sys, Eigen::VectorXd::Zero(sys.num_dofs()), dir / "f.vtk", sc, "feedbeef00000000");

    std::ifstream in(dir / "f.vtk");
    std::string line;
    std::getline(in, line);
    CHECK(line == "# vtk DataFile Version 3.0");
    std::getline(in, line);
    CHECK(line.find("config_hash=feedbeef00000000") != std::string::npos);
    std::getline(in, line);
    CHECK(line == "ASCII");
    std::getline(in, line);
    CHECK(line == "DATASET UNSTRUCTURED_GRID");

    std::string word, type;
    int npts = 0;
    in >> word >> npts >> type;
    CHECK(word == "POINTS");
    REQUIRE(npts == mesh.num_nodes());
    double max_err = 0.0;
    for (int a = 0; a < npts; ++a) {
      for (int c = 0; c < 3; ++c) {
        double v;
        in >> v;
        max_err = std::max(max_err, std::abs(v - mesh.coords[a][c] * sc.length));
      }
    }
    CHECK(max_err <= 1e-15 * sc.length);

    int ncells = 0, list = 0;
    in >> word >> ncells >> list;
    CHECK(word == "CELLS");
    CHECK(ncells == static_cast<int>(mesh.bulk_elements.size() + layer.size()));
    int consumed = 0;
    for (int c = 0; c < ncells; ++c) {
      int k;
      in >> k;
      consumed += k + 1;
      for (int j = 0; j < k; ++j) {
        int idx;
        in >> idx;
        CHECK(idx < npts);
      }
    }
    CHECK(consumed == list);
    int ntypes = 0;
    in >> word >> ntypes;
    CHECK(word == "CELL_TYPES");
    CHECK(ntypes == ncells);
    for (int c = 0; c < ncells; ++c) {
      int t;
      in >> t;
    }
    int npd = 0;
    in >> word >> npd;
    CHECK(word == "POINT_DATA");
    CHECK(npd == npts);
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "VECTORS displacement double");
    for (int a = 0; a < 3 * npd; ++a) {
      double v;
      in >> v;
      CHECK(v == 0.0);
    }
    int ncd = 0;
    in >> word >> ncd;
    CHECK(word == "CELL_DATA");
    CHECK(ncd == ncells);
    int scalars = 0;
    while (in >> word) {
      if (word != "SCALARS") continue;
      ++scalars;
      std::getline(in, line);
      std::getline(in, line);
      CHECK(line == "LOOKUP_TABLE default");
      for (int c = 0; c < ncd; ++c) {
        double v;
        REQUIRE(static_cast<bool>(in >> v));
      }
    }
    CHECK(scalars == 4);
  }
}
