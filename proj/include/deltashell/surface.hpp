#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace dsh {

/// Structured (theta, phi) grid data, present when the surface is an
/// analytic sphere built by make_sphere. Enables product-integrated
/// near fields: Fejer-1 nodes are midpoints of an exact uniform tiling
/// of [0, pi] x [0, 2 pi).
struct SphereGrid {
  double radius = 1.0;
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;  // ascending, size n_theta
  std::vector<double> phi;    // ascending, size n_phi
  double dtheta() const { return theta.size() > 1 ? theta[1] - theta[0] : 0.0; }
  double dphi() const { return phi.size() > 1 ? phi[1] - phi[0] : 0.0; }
};

/// Quadrature representation of the shell: nodes, positive weights
/// (areas), outward unit normals.
struct Surface {
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes;
  Eigen::VectorXd weights;
  Eigen::Matrix<double, Eigen::Dynamic, 3> normals;
  std::string descriptor;
  std::optional<SphereGrid> grid;

  Eigen::Index size() const { return nodes.rows(); }
  double area() const { return weights.sum(); }
  /// Mean node spacing sqrt(area / N).
  double mean_spacing() const { return std::sqrt(area() / double(size())); }
};

/// Fejer's first quadrature rule on [-1, 1] (nodes cos((2i-1)pi/2n),
/// positive weights, exact for polynomials of degree < n).
void fejer1_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Product quadrature sphere: n_theta colatitude nodes x 2 n_theta uniform
/// azimuthal nodes, N = 2 n_theta^2. Weights a^2 * (rule weight in cos
/// theta) * (2 pi / (2 n_theta)); sum of weights = 4 pi a^2 to machine
/// precision.
Surface make_sphere(double radius, int n_theta);

/// ASCII OFF triangle mesh: one node per triangle at its centroid, weight =
/// area, outward unit normal from counterclockwise winding. Throws on parse
/// errors, open meshes (boundary edge), and degenerate triangles.
Surface load_mesh(const std::string& path);

/// Discrete measure sigma(B(x_i, rho) cap Sigma) for each radius.
std::vector<double> ball_measure_profile(const Surface& s, Eigen::Index node,
                                         const std::vector<double>& radii);

}  // namespace dsh
