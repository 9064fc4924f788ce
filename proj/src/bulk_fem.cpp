#include "mpjr/bulk_fem.hpp"

#include <cmath>
#include <string>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

const double kGauss = 1.0 / std::sqrt(3.0);

void check_dimensions(double length, double thickness, int n_surface, double grading,
                      int n_layers) {
  if (!(length > 0.0)) throw DataError("mesh length must be positive");
  if (!(thickness > 0.0)) throw DataError("mesh thickness must be positive");
  if (n_surface < 1) throw DataError("n_surface must be >= 1");
  if (n_layers < 1) throw DataError("n_layers must be >= 1");
  if (!(grading >= 1.0)) throw DataError("grading must be >= 1");
}

void check_material(const Material& m) {
  if (!(m.E > 0.0)) throw DataError("material modulus must be positive");
  if (!(m.nu >= 0.0 && m.nu < 0.5)) throw DataError("Poisson ratio must lie in [0, 0.5)");
}

// Node elevations from bottom (0) to top (t).
std::vector<double> layer_levels(const std::vector<double>& h_top_down) {
  const int n = static_cast<int>(h_top_down.size());
  double total = 0.0;
  for (double h : h_top_down) total += h;
  std::vector<double> levels(n + 1);
  levels[n] = total;
  for (int k = n - 1; k >= 0; --k) levels[k] = levels[k + 1] - h_top_down[n - 1 - k];
  levels[0] = 0.0;
  return levels;
}

}  // namespace

std::vector<double> graded_layers(double thickness, int n_layers, double grading) {
  std::vector<double> h(n_layers);
  if (grading == 1.0) {
    for (auto& v : h) v = thickness / n_layers;
    return h;
  }
  const double h0 = thickness * (grading - 1.0) / (std::pow(grading, n_layers) - 1.0);
  for (int k = 0; k < n_layers; ++k) h[k] = h0 * std::pow(grading, k);
  return h;
}

Mesh generate_mesh_2d(double length, double thickness, int n_surface, double grading,
                      int n_layers, const Material& material) {
  check_dimensions(length, thickness, n_surface, grading, n_layers);
  check_material(material);

  Mesh mesh;
  mesh.dim = 2;
  mesh.length = length;
  mesh.thickness = thickness;
  mesh.n_surface = n_surface;
  mesh.n_layers = n_layers;
  mesh.grading = grading;
  mesh.layer_thickness = graded_layers(thickness, n_layers, grading);
  mesh.materials = {material};

  const auto levels = layer_levels(mesh.layer_thickness);
  const int nxn = n_surface + 1;
  auto bulk_id = [nxn](int i, int k) { return k * nxn + i; };

  for (int k = 0; k <= n_layers; ++k) {
    for (int i = 0; i <= n_surface; ++i) {
      mesh.coords.push_back({i == n_surface ? length : length * i / n_surface, levels[k], 0.0});
    }
  }
  mesh.num_bulk_nodes = static_cast<int>(mesh.coords.size());
  for (int i = 0; i <= n_surface; ++i) mesh.coords.push_back(mesh.coords[bulk_id(i, n_layers)]);

  for (int k = 0; k < n_layers; ++k) {
    for (int i = 0; i < n_surface; ++i) {
      BulkElement el;
      el.nodes = {bulk_id(i, k), bulk_id(i + 1, k), bulk_id(i + 1, k + 1), bulk_id(i, k + 1)};
      el.column_i = i;
      mesh.bulk_elements.push_back(el);
    }
  }

  for (int i = 0; i < n_surface; ++i) {
    InterfaceFace f;
    f.lower = {bulk_id(i, n_layers), bulk_id(i + 1, n_layers)};
    f.upper = {mesh.num_bulk_nodes + i, mesh.num_bulk_nodes + i + 1};
    mesh.interface_faces.push_back(f);
  }

  for (int i = 0; i <= n_surface; ++i) {
    for (int c = 0; c < 2; ++c) mesh.constraints.push_back({bulk_id(i, 0) * 2 + c, 0.0, 0.0});
  }
  for (int i = 0; i <= n_surface; ++i) {
    const int node = mesh.num_bulk_nodes + i;
    mesh.constraints.push_back({node * 2 + 0, 0.0, 0.0});
    mesh.constraints.push_back({node * 2 + 1, 0.0, 1.0});
  }
  return mesh;
}

Mesh generate_mesh_3d(double length, double depth, int n_surface, double grading,
                      int n_layers, const Material& material) {
  check_dimensions(length, depth, n_surface, grading, n_layers);
  check_material(material);

  Mesh mesh;
  mesh.dim = 3;
  mesh.length = length;
  mesh.thickness = depth;
  mesh.n_surface = n_surface;
  mesh.n_layers = n_layers;
  mesh.grading = grading;
  mesh.layer_thickness = graded_layers(depth, n_layers, grading);
  mesh.materials = {material};

  const auto levels = layer_levels(mesh.layer_thickness);
  const int n1 = n_surface + 1;
  auto bulk_id = [n1](int i, int j, int k) { return (k * n1 + j) * n1 + i; };
  auto coord = [&](int i) { return i == n_surface ? length : length * i / n_surface; };

  for (int k = 0; k <= n_layers; ++k) {
    for (int j = 0; j <= n_surface; ++j) {
      for (int i = 0; i <= n_surface; ++i) mesh.coords.push_back({coord(i), coord(j), levels[k]});
    }
  }
  mesh.num_bulk_nodes = static_cast<int>(mesh.coords.size());
  auto upper_id = [&](int i, int j) { return mesh.num_bulk_nodes + j * n1 + i; };
  for (int j = 0; j <= n_surface; ++j) {
    for (int i = 0; i <= n_surface; ++i) mesh.coords.push_back(mesh.coords[bulk_id(i, j, n_layers)]);
  }

  for (int k = 0; k < n_layers; ++k) {
    for (int j = 0; j < n_surface; ++j) {
      for (int i = 0; i < n_surface; ++i) {
        BulkElement el;
        el.nodes = {bulk_id(i, j, k),         bulk_id(i + 1, j, k),
                    bulk_id(i + 1, j + 1, k), bulk_id(i, j + 1, k),
                    bulk_id(i, j, k + 1),     bulk_id(i + 1, j, k + 1),
                    bulk_id(i + 1, j + 1, k + 1), bulk_id(i, j + 1, k + 1)};
        el.column_i = i;
        el.column_j = j;
        mesh.bulk_elements.push_back(el);
      }
    }
  }

  for (int j = 0; j < n_surface; ++j) {
    for (int i = 0; i < n_surface; ++i) {
      InterfaceFace f;
      f.lower = {bulk_id(i, j, n_layers), bulk_id(i + 1, j, n_layers),
                 bulk_id(i + 1, j + 1, n_layers), bulk_id(i, j + 1, n_layers)};
      f.upper = {upper_id(i, j), upper_id(i + 1, j), upper_id(i + 1, j + 1), upper_id(i, j + 1)};
      mesh.interface_faces.push_back(f);
    }
  }

  for (int j = 0; j <= n_surface; ++j) {
    for (int i = 0; i <= n_surface; ++i) {
      for (int c = 0; c < 3; ++c) mesh.constraints.push_back({bulk_id(i, j, 0) * 3 + c, 0.0, 0.0});
    }
  }
  for (int j = 0; j <= n_surface; ++j) {
    for (int i = 0; i <= n_surface; ++i) {
      const int node = upper_id(i, j);
      mesh.constraints.push_back({node * 3 + 0, 0.0, 0.0});
      mesh.constraints.push_back({node * 3 + 1, 0.0, 0.0});
      mesh.constraints.push_back({node * 3 + 2, 0.0, 1.0});
    }
  }
  return mesh;
}

int column_sample(int col, int n, int samples) {
  if (samples == n) return col;
  if (samples - 1 < n) {
    throw DataError("phase mask with " + std::to_string(samples) +
                    " samples is coarser than " + std::to_string(n) + " surface columns");
  }
  // Nearest sample to the column centre; ties go to the lower index.
  const double pos = (col + 0.5) / n * (samples - 1);
  return static_cast<int>(std::ceil(pos - 0.5));
}

Mesh assign_phases(Mesh mesh, const PhaseMask& mask, const Material& matrix,
                   const Material& inclusion, PhaseRule rule) {
  check_material(matrix);
  check_material(inclusion);
  Material mat = matrix;
  Material inc = inclusion;
  mat.phase = 0;
  inc.phase = 1;

  if (rule == PhaseRule::homogenized) {
    Material eff = matrix;
    eff.phase = 0;
    eff.E = effective_modulus({{mask.matrix_fraction, matrix.E},
                               {mask.inclusion_fraction, inclusion.E}});
    mesh.materials = {eff};
    for (auto& el : mesh.bulk_elements) el.material = 0;
    return mesh;
  }

  if (mesh.dim == 2 && mask.ny != 1) {
    throw DataError("2D phase assignment needs a single-row mask");
  }
  mesh.materials = {mat, inc};
  for (auto& el : mesh.bulk_elements) {
    const int si = column_sample(el.column_i, mesh.n_surface, mask.nx);
    const int sj = mesh.dim == 2 ? 0 : column_sample(el.column_j, mesh.n_surface, mask.ny);
    el.material = mask.at(si, sj);
  }
  return mesh;
}

Eigen::Matrix3d plane_strain_elasticity(const Material& m) {
  const double f = m.E / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
  Eigen::Matrix3d d;
  d << f * (1.0 - m.nu), f * m.nu, 0.0,
       f * m.nu, f * (1.0 - m.nu), 0.0,
       0.0, 0.0, f * (1.0 - 2.0 * m.nu) / 2.0;
  return d;
}

Eigen::Matrix<double, 6, 6> elasticity_3d(const Material& m) {
  const double lambda = m.E * m.nu / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
  const double mu = m.E / (2.0 * (1.0 + m.nu));
  Eigen::Matrix<double, 6, 6> d = Eigen::Matrix<double, 6, 6>::Zero();
  d.topLeftCorner<3, 3>().setConstant(lambda);
  for (int i = 0; i < 3; ++i) d(i, i) += 2.0 * mu;
  for (int i = 3; i < 6; ++i) d(i, i) = mu;
  return d;
}

namespace {

// Shape-function derivatives w.r.t. physical coordinates and det J.
double quad4_gradients(const Eigen::Matrix<double, 4, 2>& xy, double xi, double eta,
                       Eigen::Matrix<double, 4, 2>& dndx) {
  static constexpr double sx[4] = {-1, 1, 1, -1};
  static constexpr double sy[4] = {-1, -1, 1, 1};
  Eigen::Matrix<double, 4, 2> dn;
  for (int a = 0; a < 4; ++a) {
    dn(a, 0) = 0.25 * sx[a] * (1.0 + sy[a] * eta);
    dn(a, 1) = 0.25 * sy[a] * (1.0 + sx[a] * xi);
  }
  const Eigen::Matrix2d jac = dn.transpose() * xy;
  const double det = jac.determinant();
  if (!(det > 0.0)) throw DataError("quad element with non-positive Jacobian");
  dndx = dn * jac.inverse().transpose();
  return det;
}

double hex8_gradients(const Eigen::Matrix<double, 8, 3>& xyz, double xi, double eta,
                      double zeta, Eigen::Matrix<double, 8, 3>& dndx) {
  static constexpr double sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
  static constexpr double sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
  static constexpr double sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
  Eigen::Matrix<double, 8, 3> dn;
  for (int a = 0; a < 8; ++a) {
    dn(a, 0) = 0.125 * sx[a] * (1.0 + sy[a] * eta) * (1.0 + sz[a] * zeta);
    dn(a, 1) = 0.125 * sy[a] * (1.0 + sx[a] * xi) * (1.0 + sz[a] * zeta);
    dn(a, 2) = 0.125 * sz[a] * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta);
  }
  const Eigen::Matrix3d jac = dn.transpose() * xyz;
  const double det = jac.determinant();
  if (!(det > 0.0)) throw DataError("hex element with non-positive Jacobian");
  dndx = dn * jac.inverse().transpose();
  return det;
}

Eigen::Matrix<double, 3, 8> quad4_b(const Eigen::Matrix<double, 4, 2>& dndx) {
  Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
  for (int a = 0; a < 4; ++a) {
    b(0, 2 * a) = dndx(a, 0);
    b(1, 2 * a + 1) = dndx(a, 1);
    b(2, 2 * a) = dndx(a, 1);
    b(2, 2 * a + 1) = dndx(a, 0);
  }
  return b;
}

Eigen::Matrix<double, 6, 24> hex8_b(const Eigen::Matrix<double, 8, 3>& dndx) {
  Eigen::Matrix<double, 6, 24> b = Eigen::Matrix<double, 6, 24>::Zero();
  for (int a = 0; a < 8; ++a) {
    const int c = 3 * a;
    b(0, c) = dndx(a, 0);
    b(1, c + 1) = dndx(a, 1);
    b(2, c + 2) = dndx(a, 2);
    b(3, c + 1) = dndx(a, 2);
    b(3, c + 2) = dndx(a, 1);
    b(4, c) = dndx(a, 2);
    b(4, c + 2) = dndx(a, 0);
    b(5, c) = dndx(a, 1);
    b(5, c + 1) = dndx(a, 0);
  }
  return b;
}

}  // namespace

Eigen::Matrix<double, 8, 8> quad4_stiffness(const Eigen::Matrix<double, 4, 2>& xy,
                                            const Material& m) {
  const Eigen::Matrix3d d = plane_strain_elasticity(m);
  Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 4, 2> dndx;
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      const double det = quad4_gradients(xy, xi, eta, dndx);
      const auto b = quad4_b(dndx);
      k.noalias() += b.transpose() * d * b * det;
    }
  }
  return 0.5 * (k + k.transpose());
}

Eigen::Matrix<double, 24, 24> hex8_stiffness(const Eigen::Matrix<double, 8, 3>& xyz,
                                             const Material& m) {
  const Eigen::Matrix<double, 6, 6> d = elasticity_3d(m);
  Eigen::Matrix<double, 24, 24> k = Eigen::Matrix<double, 24, 24>::Zero();
  Eigen::Matrix<double, 8, 3> dndx;
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      for (double zeta : {-kGauss, kGauss}) {
        const double det = hex8_gradients(xyz, xi, eta, zeta, dndx);
        const auto b = hex8_b(dndx);
        k.noalias() += b.transpose() * d * b * det;
      }
    }
  }
  return 0.5 * (k + k.transpose());
}

Eigen::MatrixXd element_coordinates(const Mesh& mesh, int element) {
  const int nn = mesh.nodes_per_element();
  Eigen::MatrixXd x(nn, mesh.dim);
  const auto& el = mesh.bulk_elements[element];
  for (int a = 0; a < nn; ++a) {
    for (int c = 0; c < mesh.dim; ++c) x(a, c) = mesh.coords[el.nodes[a]][c];
  }
  return x;
}

Eigen::MatrixXd bulk_element_stiffness(const Mesh& mesh, int element) {
  const auto& mat = mesh.materials[mesh.bulk_elements[element].material];
  const Eigen::MatrixXd x = element_coordinates(mesh, element);
  if (mesh.dim == 2) return quad4_stiffness(x, mat);
  return hex8_stiffness(x, mat);
}

Eigen::VectorXd bulk_element_stress(const Mesh& mesh, int element,
                                    const Eigen::VectorXd& u_element) {
  const auto& mat = mesh.materials[mesh.bulk_elements[element].material];
  const Eigen::MatrixXd x = element_coordinates(mesh, element);
  if (mesh.dim == 2) {
    Eigen::Matrix<double, 4, 2> dndx;
    quad4_gradients(x, 0.0, 0.0, dndx);
    return plane_strain_elasticity(mat) * quad4_b(dndx) * u_element;
  }
  Eigen::Matrix<double, 8, 3> dndx;
  hex8_gradients(x, 0.0, 0.0, 0.0, dndx);
  return elasticity_3d(mat) * hex8_b(dndx) * u_element;
}

std::vector<int> element_dofs(const Mesh& mesh, int element) {
  const int nn = mesh.nodes_per_element();
  std::vector<int> dofs;
  dofs.reserve(nn * mesh.dim);
  for (int a = 0; a < nn; ++a) {
    for (int c = 0; c < mesh.dim; ++c) dofs.push_back(mesh.bulk_elements[element].nodes[a] * mesh.dim + c);
  }
  return dofs;
}

}  // namespace mpjr
