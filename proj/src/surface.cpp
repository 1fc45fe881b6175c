#include "deltashell/surface.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dsh {

namespace {
constexpr double kPi = std::numbers::pi;
}

void fejer1_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double th = (2.0 * i + 1.0) * kPi / (2.0 * n);
    double s = 0.0;
    for (int m = 1; m <= n / 2; ++m) s += std::cos(2.0 * m * th) / (4.0 * m * m - 1.0);
    nodes[i] = std::cos(th);
    weights[i] = (2.0 / n) * (1.0 - 2.0 * s);
  }
}

Surface make_sphere(double radius, int n_theta) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_sphere: radius must be > 0");
  if (n_theta < 4) throw std::invalid_argument("make_sphere: n_theta must be >= 4");

  std::vector<double> t, wt;
  fejer1_rule(n_theta, t, wt);

  SphereGrid grid;
  grid.radius = radius;
  grid.n_theta = n_theta;
  grid.n_phi = 2 * n_theta;
  grid.theta.resize(n_theta);
  // fejer1_rule returns cos(theta) descending in theta; store theta ascending.
  for (int i = 0; i < n_theta; ++i) grid.theta[i] = (2.0 * i + 1.0) * kPi / (2.0 * n_theta);
  grid.phi.resize(grid.n_phi);
  for (int j = 0; j < grid.n_phi; ++j) grid.phi[j] = 2.0 * kPi * (j + 0.5) / grid.n_phi;

  const Eigen::Index n = Eigen::Index(n_theta) * grid.n_phi;
  Surface s;
  s.nodes.resize(n, 3);
  s.weights.resize(n);
  s.normals.resize(n, 3);
  const double wphi = 2.0 * kPi / grid.n_phi;
  Eigen::Index idx = 0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = grid.theta[i];
    const double st = std::sin(th), ct = std::cos(th);
    // weight in cos(theta) for this node: same index in the rule output
    const double wcos = wt[i];
    for (int j = 0; j < grid.n_phi; ++j, ++idx) {
      const double ph = grid.phi[j];
      Eigen::RowVector3d nrm(st * std::cos(ph), st * std::sin(ph), ct);
      s.nodes.row(idx) = radius * nrm;
      s.normals.row(idx) = nrm;
      s.weights(idx) = radius * radius * wcos * wphi;
    }
  }
  s.descriptor = "sphere(a=" + std::to_string(radius) + ", n_theta=" + std::to_string(n_theta) + ")";
  s.grid = grid;
  return s;
}

namespace {

struct MeshData {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
};

MeshData parse_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  std::string tok;
  if (!(in >> tok) || tok != "OFF") throw std::runtime_error("load_mesh: missing OFF header");
  long nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw std::runtime_error("load_mesh: bad count line");
  if (nv <= 0 || nf <= 0) throw std::runtime_error("load_mesh: empty mesh");
  MeshData md;
  md.verts.resize(nv);
  for (long i = 0; i < nv; ++i)
    if (!(in >> md.verts[i][0] >> md.verts[i][1] >> md.verts[i][2]))
      throw std::runtime_error("load_mesh: bad vertex line");
  md.faces.resize(nf);
  for (long f = 0; f < nf; ++f) {
    int k = 0;
    if (!(in >> k) || k != 3) throw std::runtime_error("load_mesh: non-triangle face");
    auto& tri = md.faces[f];
    if (!(in >> tri[0] >> tri[1] >> tri[2])) throw std::runtime_error("load_mesh: bad face line");
    for (int v : tri)
      if (v < 0 || v >= nv) throw std::runtime_error("load_mesh: vertex index out of range");
  }
  return md;
}

}  // namespace

Surface load_mesh(const std::string& path) {
  MeshData md = parse_off(path);

  // closedness: every undirected edge must appear in exactly two faces,
  // once per direction (consistent winding).
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : md.faces)
    for (int e = 0; e < 3; ++e) {
      auto key = std::make_pair(f[e], f[(e + 1) % 3]);
      if (++directed[key] > 1) throw std::runtime_error("load_mesh: duplicated directed edge");
    }
  for (const auto& [key, cnt] : directed) {
    auto rev = std::make_pair(key.second, key.first);
    if (directed.find(rev) == directed.end())
      throw std::runtime_error("load_mesh: non-closed mesh (boundary edge detected)");
  }

  Eigen::Vector3d lo = md.verts[0], hi = md.verts[0];
  for (const auto& v : md.verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double bbox2 = (hi - lo).squaredNorm();

  Surface s;
  const Eigen::Index nf = Eigen::Index(md.faces.size());
  s.nodes.resize(nf, 3);
  s.weights.resize(nf);
  s.normals.resize(nf, 3);
  for (Eigen::Index f = 0; f < nf; ++f) {
    const auto& tri = md.faces[f];
    const Eigen::Vector3d &a = md.verts[tri[0]], &b = md.verts[tri[1]], &c = md.verts[tri[2]];
    const Eigen::Vector3d cr = (b - a).cross(c - a);
    const double area = 0.5 * cr.norm();
    if (area < 1e-14 * bbox2) throw std::runtime_error("load_mesh: degenerate triangle");
    s.nodes.row(f) = ((a + b + c) / 3.0).transpose();
    s.weights(f) = area;
    s.normals.row(f) = (cr / cr.norm()).transpose();
  }
  s.descriptor = "mesh(" + path + ")";
  return s;
}

std::vector<double> ball_measure_profile(const Surface& s, Eigen::Index node,
                                         const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  const Eigen::RowVector3d x = s.nodes.row(node);
  for (double rho : radii) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < s.size(); ++j)
      if ((s.nodes.row(j) - x).norm() <= rho) acc += s.weights(j);
    out.push_back(acc);
  }
  return out;
}

}  // namespace dsh
