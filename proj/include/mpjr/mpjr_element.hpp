#pragma once

#include <array>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mpjr/afm_ingest.hpp"
#include "mpjr/bulk_fem.hpp"
#include "mpjr/interface_law.hpp"

namespace mpjr {

enum class Quadrature { nodal, gauss };

// Embedded data of one integration point, written once at initialization.
struct IpData {
  std::array<double, 2> xi{};        // face parametric coordinates
  std::array<double, 2> position{};  // in-plane global coordinates (x, y)
  double weight = 0.0;
  double z = 0.0;
  double delta_gamma = 0.0;
  double p_max = 0.0;
  NormalLaw law;
};

// Zero-thickness interface element: 2+2 nodes (2D line) or 4+4 nodes (3D quad).
// Local DOF order is lower-face nodes then upper-face nodes, `dim` per node.
struct MpjrElement {
  int dim = 2;
  std::array<int, 4> lower{};
  std::array<int, 4> upper{};
  double g_init = 0.0;
  std::vector<IpData> ips;

  int face_nodes() const { return dim == 2 ? 2 : 4; }
  int num_dofs() const { return 2 * face_nodes() * dim; }
};

struct GapState {
  std::vector<double> g_n;
  std::vector<double> g_n_star;
  std::vector<double> p_n;
  std::vector<double> dp_dg;
};

struct InterfaceOptions {
  double k_cap = 0.0;
  Quadrature quadrature = Quadrature::nodal;
  bool penalty = false;
  // Rest separation; NaN selects g0 of the surface-averaged law.
  double g_init = std::numeric_limits<double>::quiet_NaN();
};

// Face shape functions at (xi, eta); eta ignored in 2D.
std::array<double, 4> face_shape(int dim, double xi, double eta);

// Nearest sample index for normalized position s in [0, 1]; ties go lower.
int nearest_sample(double s, int samples);

/// Builds one element per mesh interface face and embeds nearest-sample
/// height, peak traction and adhesion energy at every integration point.
/// 2D meshes take single-row profile grids.
std::vector<MpjrElement> build_interface_layer(const Mesh& mesh, const ScanGrid& height,
                                               const ScanGrid& peak_force,
                                               const ScanGrid& dissipation,
                                               const InterfaceOptions& options);

// g0 of the law built from the surface-averaged adhesion fields.
double mean_equilibrium_gap(const ScanGrid& peak_force, const ScanGrid& dissipation);

std::vector<int> element_dofs(const MpjrElement& el);
Eigen::VectorXd gather(const MpjrElement& el, const Eigen::VectorXd& u_global);

GapState element_gap(const MpjrElement& el, const Eigen::VectorXd& u_local);

struct ElementResponse {
  Eigen::VectorXd residual;
  Eigen::MatrixXd tangent;
};

// `convex` drops the softening part of the law tangent (k < 0 -> 0); the result
// is positive semidefinite and serves as a descent metric.
ElementResponse element_residual_tangent(const MpjrElement& el, const Eigen::VectorXd& u_local,
                                         bool convex = false);

// Interface energy sum_ip w * phi(g*).
double element_energy(const MpjrElement& el, const Eigen::VectorXd& u_local);

}  // namespace mpjr
