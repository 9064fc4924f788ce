#include "mpjr/mpjr_element.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

double mean_of(const ScanGrid& g) {
  return std::accumulate(g.values.begin(), g.values.end(), 0.0) /
         static_cast<double>(g.values.size());
}

void check_same_shape(const ScanGrid& a, const ScanGrid& b, const char* name) {
  if (a.nx != b.nx || a.ny != b.ny) {
    throw DataError(std::string("grid '") + name + "' is " + std::to_string(b.nx) + "x" +
                    std::to_string(b.ny) + ", height grid is " + std::to_string(a.nx) +
                    "x" + std::to_string(a.ny));
  }
}

}  // namespace

std::array<double, 4> face_shape(int dim, double xi, double eta) {
  if (dim == 2) return {0.5 * (1.0 - xi), 0.5 * (1.0 + xi), 0.0, 0.0};
  return {0.25 * (1.0 - xi) * (1.0 - eta), 0.25 * (1.0 + xi) * (1.0 - eta),
          0.25 * (1.0 + xi) * (1.0 + eta), 0.25 * (1.0 - xi) * (1.0 + eta)};
}

int nearest_sample(double s, int samples) {
  const double pos = s * (samples - 1);
  const int idx = static_cast<int>(std::ceil(pos - 0.5));
  if (idx < 0 || idx >= samples) {
    throw DataError("integration point at normalized position " + std::to_string(s) +
                    " maps outside the data grid");
  }
  return idx;
}

double mean_equilibrium_gap(const ScanGrid& peak_force, const ScanGrid& dissipation) {
  return 16.0 / (9.0 * std::sqrt(3.0)) * mean_of(dissipation) / mean_of(peak_force);
}

std::vector<MpjrElement> build_interface_layer(const Mesh& mesh, const ScanGrid& height,
                                               const ScanGrid& peak_force,
                                               const ScanGrid& dissipation,
                                               const InterfaceOptions& options) {
  check_same_shape(height, peak_force, "peak_force");
  check_same_shape(height, dissipation, "dissipation");
  if (mesh.dim == 2 && height.ny != 1) {
    throw DataError("2D interface needs profile grids (ny = 1); extract a row first");
  }
  if (height.nx - 1 < mesh.n_surface || (mesh.dim == 3 && height.ny - 1 < mesh.n_surface)) {
    throw DataError("data grid " + std::to_string(height.nx) + "x" + std::to_string(height.ny) +
                    " is coarser than the " + std::to_string(mesh.n_surface) +
                    "-element interface");
  }

  const double g_init = std::isnan(options.g_init)
                            ? mean_equilibrium_gap(peak_force, dissipation)
                            : options.g_init;

  std::vector<std::array<double, 2>> points;
  const double a = 1.0 / std::sqrt(3.0);
  const double p = options.quadrature == Quadrature::nodal ? 1.0 : a;
  if (mesh.dim == 2) {
    points = {{-p, 0.0}, {p, 0.0}};
  } else {
    points = {{-p, -p}, {p, -p}, {p, p}, {-p, p}};
  }

  std::vector<MpjrElement> elements;
  elements.reserve(mesh.interface_faces.size());
  const int nf = mesh.nodes_per_face();
  for (const auto& face : mesh.interface_faces) {
    MpjrElement el;
    el.dim = mesh.dim;
    el.lower = face.lower;
    el.upper = face.upper;
    el.g_init = g_init;

    // Faces are axis-aligned rectangles on the top surface.
    const auto& c0 = mesh.coords[face.lower[0]];
    const auto& c2 = mesh.coords[face.lower[nf == 2 ? 1 : 2]];
    const double hx = c2[0] - c0[0];
    const double hy = mesh.dim == 2 ? 1.0 : c2[1] - c0[1];
    const double measure = hx * hy;

    for (const auto& pt : points) {
      IpData ip;
      ip.xi = pt;
      ip.weight = measure / static_cast<double>(points.size());
      ip.position[0] = c0[0] + 0.5 * (1.0 + pt[0]) * hx;
      ip.position[1] = mesh.dim == 2 ? 0.0 : c0[1] + 0.5 * (1.0 + pt[1]) * hy;

      const int si = nearest_sample(ip.position[0] / mesh.length, height.nx);
      const int sj = mesh.dim == 2 ? 0 : nearest_sample(ip.position[1] / mesh.length, height.ny);
      ip.z = height.at(si, sj);
      ip.p_max = peak_force.at(si, sj);
      ip.delta_gamma = dissipation.at(si, sj);
      if (options.penalty) {
        ip.law = PenaltyLaw{options.k_cap};
      } else {
        try {
          ip.law = derive_params(ip.delta_gamma, ip.p_max, options.k_cap);
        } catch (const DataError& e) {
          throw DataError("sample (" + std::to_string(si) + "," + std::to_string(sj) +
                          "): " + e.what());
        }
      }
      el.ips.push_back(ip);
    }
    elements.push_back(std::move(el));
  }
  return elements;
}

std::vector<int> element_dofs(const MpjrElement& el) {
  std::vector<int> dofs;
  dofs.reserve(el.num_dofs());
  for (int side = 0; side < 2; ++side) {
    const auto& nodes = side == 0 ? el.lower : el.upper;
    for (int a = 0; a < el.face_nodes(); ++a) {
      for (int c = 0; c < el.dim; ++c) dofs.push_back(nodes[a] * el.dim + c);
    }
  }
  return dofs;
}

Eigen::VectorXd gather(const MpjrElement& el, const Eigen::VectorXd& u_global) {
  const auto dofs = element_dofs(el);
  Eigen::VectorXd u(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k) u[k] = u_global[dofs[k]];
  return u;
}

namespace {

// Row of the normal-gap operator at one integration point (Q = identity).
Eigen::RowVectorXd normal_gap_row(const MpjrElement& el, const IpData& ip) {
  const int nf = el.face_nodes();
  const int n = el.dim - 1;
  const auto shape = face_shape(el.dim, ip.xi[0], ip.xi[1]);
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(el.num_dofs());
  for (int a = 0; a < nf; ++a) {
    b[a * el.dim + n] = -shape[a];
    b[(nf + a) * el.dim + n] = shape[a];
  }
  return b;
}

}  // namespace

GapState element_gap(const MpjrElement& el, const Eigen::VectorXd& u_local) {
  GapState s;
  const std::size_t n = el.ips.size();
  s.g_n.resize(n);
  s.g_n_star.resize(n);
  s.p_n.resize(n);
  s.dp_dg.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    const auto& ip = el.ips[q];
    s.g_n[q] = el.g_init + normal_gap_row(el, ip).dot(u_local);
    s.g_n_star[q] = s.g_n[q] + ip.z;
    s.p_n[q] = traction(ip.law, s.g_n_star[q]);
    s.dp_dg[q] = tangent(ip.law, s.g_n_star[q]);
  }
  return s;
}

ElementResponse element_residual_tangent(const MpjrElement& el, const Eigen::VectorXd& u_local,
                                         bool convex) {
  ElementResponse out;
  out.residual = Eigen::VectorXd::Zero(el.num_dofs());
  out.tangent = Eigen::MatrixXd::Zero(el.num_dofs(), el.num_dofs());
  for (const auto& ip : el.ips) {
    const Eigen::RowVectorXd b = normal_gap_row(el, ip);
    const double g = el.g_init + b.dot(u_local) + ip.z;
    const double p = traction(ip.law, g);
    const double k = convex ? std::max(tangent(ip.law, g), 0.0) : tangent(ip.law, g);
    if (p != 0.0) out.residual.noalias() += b.transpose() * (p * ip.weight);
    if (k != 0.0) out.tangent.noalias() += b.transpose() * b * (k * ip.weight);
  }
  return out;
}

double element_energy(const MpjrElement& el, const Eigen::VectorXd& u_local) {
  double e = 0.0;
  for (const auto& ip : el.ips) {
    const double g = el.g_init + normal_gap_row(el, ip).dot(u_local) + ip.z;
    e += ip.weight * potential(ip.law, g);
  }
  return e;
}

}  // namespace mpjr
