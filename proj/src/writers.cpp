#include "mpjr/writers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void hash_line(std::ostream& out, const std::string& hash) {
  if (!hash.empty()) out << "# config_hash=" << hash << '\n';
}

}  // namespace

void write_history(const RunHistory& history, const std::filesystem::path& path,
                   const std::string& hash) {
  auto out = open_out(path);
  hash_line(out, hash);
  out << "step,pseudo_time,u_bar,u_bar_over_hrms,reaction_force\n";
  for (const auto& s : history.steps) {
    out << s.step << ',' << g17(s.pseudo_time) << ',' << g17(s.u_bar) << ','
        << g17(s.u_bar_over_unit) << ',' << g17(s.reaction) << '\n';
  }
}

std::vector<StepRecord> read_history(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<StepRecord> rows;
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    StepRecord r;
    char c1, c2, c3, c4;
    std::istringstream ss(line);
    if (!(ss >> r.step >> c1 >> r.pseudo_time >> c2 >> r.u_bar >> c3 >> r.u_bar_over_unit >> c4 >>
          r.reaction)) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed history row", line_no);
    }
    rows.push_back(r);
  }
  return rows;
}

int nearest_row(const std::vector<double>& rows, double position) {
  int best = 0;
  double best_d = std::abs(rows[0] - position);
  for (int k = 1; k < static_cast<int>(rows.size()); ++k) {
    const double d = std::abs(rows[k] - position);
    if (d < best_d) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

std::vector<SectionRow> extract_section(const System& system, const Eigen::VectorXd& u,
                                        char axis, double position, const Scaling& scaling) {
  if (!(position >= 0.0 && position <= 1.0)) {
    throw DataError("section position must lie in [0, 1]");
  }
  if (axis != 'x' && axis != 'y') throw DataError("section axis must be x or y");
  const auto& mesh = system.mesh();
  const double len = mesh.length;
  const double tol = 1e-12 * len;
  const auto states = system.interface_states(u);
  const auto& iface = system.interface();

  const int fixed = axis == 'x' ? 0 : 1;
  const int along = mesh.dim == 2 ? 0 : 1 - fixed;

  double row_value = 0.0;
  if (mesh.dim == 3) {
    std::vector<double> rows;
    for (const auto& el : iface) {
      for (const auto& ip : el.ips) rows.push_back(ip.position[fixed] / len);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [&](double a, double b) { return std::abs(a - b) <= tol / len; }),
               rows.end());
    row_value = rows[nearest_row(rows, position)] * len;
  }

  std::vector<SectionRow> out;
  std::vector<double> seen;
  for (std::size_t e = 0; e < iface.size(); ++e) {
    for (std::size_t q = 0; q < iface[e].ips.size(); ++q) {
      const auto& ip = iface[e].ips[q];
      if (mesh.dim == 3 && std::abs(ip.position[fixed] - row_value) > tol) continue;
      const double c = ip.position[along];
      if (std::any_of(seen.begin(), seen.end(), [&](double s) { return std::abs(s - c) <= tol; })) {
        continue;
      }
      seen.push_back(c);
      SectionRow r;
      r.coord = c * scaling.length;
      r.z = ip.z * scaling.length;
      r.g_n_star = states[e].g_n_star[q] * scaling.length;
      r.p_n = states[e].p_n[q] * scaling.stress;
      r.p_n_over_estar = states[e].p_n[q];
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SectionRow& a, const SectionRow& b) { return a.coord < b.coord; });
  return out;
}

void write_section(const System& system, const Eigen::VectorXd& u, char axis, double position,
                   const std::filesystem::path& path, const Scaling& scaling,
                   const std::string& hash) {
  const auto rows = extract_section(system, u, axis, position, scaling);
  auto out = open_out(path);
  hash_line(out, hash);
  out << "coord,z,g_n_star,p_n,p_n_over_Estar\n";
  for (const auto& r : rows) {
    out << g17(r.coord) << ',' << g17(r.z) << ',' << g17(r.g_n_star) << ',' << g17(r.p_n) << ','
        << g17(r.p_n_over_estar) << '\n';
  }
}

void write_interface_dump(const System& system, const Eigen::VectorXd& u,
                          const std::filesystem::path& path, const Scaling& scaling,
                          const std::string& hash) {
  const auto states = system.interface_states(u);
  const auto& iface = system.interface();
  const double energy_scale = scaling.stress * scaling.length;
  auto out = open_out(path);
  hash_line(out, hash);
  out << "element,ip,x,y,z,delta_gamma,p_max,g_n_star,p_n\n";
  for (std::size_t e = 0; e < iface.size(); ++e) {
    for (std::size_t q = 0; q < iface[e].ips.size(); ++q) {
      const auto& ip = iface[e].ips[q];
      out << e << ',' << q << ',' << g17(ip.position[0] * scaling.length) << ','
          << g17(ip.position[1] * scaling.length) << ',' << g17(ip.z * scaling.length) << ','
          << g17(ip.delta_gamma * energy_scale) << ',' << g17(ip.p_max * scaling.stress) << ','
          << g17(states[e].g_n_star[q] * scaling.length) << ','
          << g17(states[e].p_n[q] * scaling.stress) << '\n';
    }
  }
}

void write_fields(const System& system, const Eigen::VectorXd& u,
                  const std::filesystem::path& path, const Scaling& scaling,
                  const std::string& hash) {
  const auto& mesh = system.mesh();
  const auto& iface = system.interface();
  const auto states = system.interface_states(u);
  const int dim = mesh.dim;
  const std::size_t n_bulk = mesh.bulk_elements.size();
  const std::size_t n_cells = n_bulk + iface.size();
  const int nn = mesh.nodes_per_element();
  const int nf = mesh.nodes_per_face();

  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "mpjr fields" << (hash.empty() ? "" : " config_hash=" + hash) << '\n';
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& c : mesh.coords) {
    out << g17(c[0] * scaling.length) << ' ' << g17(c[1] * scaling.length) << ' '
        << g17(c[2] * scaling.length) << '\n';
  }

  const std::size_t list_size = n_bulk * (nn + 1) + iface.size() * (nf + 1);
  out << "CELLS " << n_cells << ' ' << list_size << '\n';
  for (const auto& el : mesh.bulk_elements) {
    out << nn;
    for (int a = 0; a < nn; ++a) out << ' ' << el.nodes[a];
    out << '\n';
  }
  for (const auto& el : iface) {
    out << nf;
    for (int a = 0; a < nf; ++a) out << ' ' << el.lower[a];
    out << '\n';
  }
  out << "CELL_TYPES " << n_cells << '\n';
  for (std::size_t k = 0; k < n_bulk; ++k) out << (dim == 2 ? 9 : 12) << '\n';
  for (std::size_t k = 0; k < iface.size(); ++k) out << (dim == 2 ? 3 : 9) << '\n';

  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  out << "VECTORS displacement double\n";
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    for (int c = 0; c < 3; ++c) {
      const double v = c < dim ? u[n * dim + c] * scaling.length : 0.0;
      out << (c ? " " : "") << g17(v);
    }
    out << '\n';
  }

  out << "CELL_DATA " << n_cells << '\n';
  out << "SCALARS E double 1\nLOOKUP_TABLE default\n";
  for (const auto& el : mesh.bulk_elements) out << g17(mesh.materials[el.material].E * scaling.stress) << '\n';
  for (std::size_t k = 0; k < iface.size(); ++k) out << "0\n";

  out << "SCALARS phase int 1\nLOOKUP_TABLE default\n";
  for (const auto& el : mesh.bulk_elements) out << mesh.materials[el.material].phase << '\n';
  for (std::size_t k = 0; k < iface.size(); ++k) out << "-1\n";

  out << "SCALARS p_n double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < n_bulk; ++k) out << "0\n";
  for (std::size_t e = 0; e < iface.size(); ++e) {
    double mean = 0.0;
    for (double p : states[e].p_n) mean += p;
    out << g17(mean / static_cast<double>(states[e].p_n.size()) * scaling.stress) << '\n';
  }

  out << "SCALARS sigma_n double 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < n_bulk; ++e) {
    const auto dofs = element_dofs(mesh, static_cast<int>(e));
    Eigen::VectorXd ue(dofs.size());
    for (std::size_t k = 0; k < dofs.size(); ++k) ue[k] = u[dofs[k]];
    const Eigen::VectorXd s = bulk_element_stress(mesh, static_cast<int>(e), ue);
    out << g17(s[dim - 1] * scaling.stress) << '\n';
  }
  for (std::size_t k = 0; k < iface.size(); ++k) out << "0\n";
}

}  // namespace mpjr
