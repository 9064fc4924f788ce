#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "mpjr/afm_ingest.hpp"

namespace mpjr {

struct Material {
  double E = 1.0;
  double nu = 0.0;
  int phase = 0;  // 0 = matrix, 1 = inclusion
};

struct BulkElement {
  std::array<int, 8> nodes{};  // first 4 used in 2D (ccw), 8 in 3D (bottom face then top)
  int material = 0;
  int column_i = 0;  // surface column under which the element sits
  int column_j = 0;
};

// Paired faces of one zero-thickness interface element; lower nodes belong to
// the bulk top surface, upper nodes to the rigid indenter.
struct InterfaceFace {
  std::array<int, 4> lower{};
  std::array<int, 4> upper{};
};

// Per-DOF boundary condition: u = value + load_factor * u_bar.
struct Constraint {
  int dof = 0;
  double value = 0.0;
  double load_factor = 0.0;
};

struct Mesh {
  int dim = 2;
  double length = 1.0;     // lateral size L
  double thickness = 1.0;  // bulk depth t
  int n_surface = 0;
  int n_layers = 0;
  double grading = 1.0;

  std::vector<std::array<double, 3>> coords;  // bulk nodes then indenter nodes
  int num_bulk_nodes = 0;
  std::vector<BulkElement> bulk_elements;
  std::vector<Material> materials;
  std::vector<InterfaceFace> interface_faces;
  std::vector<Constraint> constraints;
  std::vector<double> layer_thickness;  // top (finest) to bottom

  int nodes_per_element() const { return dim == 2 ? 4 : 8; }
  int nodes_per_face() const { return dim == 2 ? 2 : 4; }
  int num_nodes() const { return static_cast<int>(coords.size()); }
  int num_dofs() const { return num_nodes() * dim; }
  int normal_axis() const { return dim - 1; }
};

/// Layer thicknesses from the top surface down: h_k = h_0 * grading^k, sum = t.
std::vector<double> graded_layers(double thickness, int n_layers, double grading);

/// Structured plane-strain quad mesh of [0, L] x [0, t] with a uniform
/// interface partition on the top edge, the bottom edge clamped and an
/// indenter node row paired with the top surface.
Mesh generate_mesh_2d(double length, double thickness, int n_surface, double grading,
                      int n_layers, const Material& material = {});

Mesh generate_mesh_3d(double length, double depth, int n_surface, double grading,
                      int n_layers, const Material& material = {});

enum class PhaseRule { columnar, homogenized };

/// Columnar extrusion of the surface phase mask through the depth, or a single
/// mixture-rule material when `rule == homogenized`.
Mesh assign_phases(Mesh mesh, const PhaseMask& mask, const Material& matrix,
                   const Material& inclusion, PhaseRule rule);

// Mask sample used for surface column `col` of `n` columns over `samples` samples.
int column_sample(int col, int n, int samples);

Eigen::Matrix3d plane_strain_elasticity(const Material& m);
Eigen::Matrix<double, 6, 6> elasticity_3d(const Material& m);

// Isoparametric element stiffness; throws DataError on a non-positive Jacobian.
Eigen::Matrix<double, 8, 8> quad4_stiffness(const Eigen::Matrix<double, 4, 2>& xy,
                                            const Material& m);
Eigen::Matrix<double, 24, 24> hex8_stiffness(const Eigen::Matrix<double, 8, 3>& xyz,
                                             const Material& m);

Eigen::MatrixXd element_coordinates(const Mesh& mesh, int element);
Eigen::MatrixXd bulk_element_stiffness(const Mesh& mesh, int element);

// Stress at the element centroid (Voigt: xx, yy, xy in 2D; xx, yy, zz, yz, xz, xy in 3D).
Eigen::VectorXd bulk_element_stress(const Mesh& mesh, int element,
                                    const Eigen::VectorXd& u_element);

// Element DOF indices, node-major.
std::vector<int> element_dofs(const Mesh& mesh, int element);

}  // namespace mpjr
