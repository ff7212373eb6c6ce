#include "dwdg/dg_space.hpp"

#include <stdexcept>
#include <vector>

#include "dwdg/errors.hpp"
#include "dwdg/quadrature.hpp"

namespace dwdg {

DGSpace::DGSpace(const Mesh& mesh) : mesh_(&mesh) {
  const int nt = mesh.n_elements();
  grad_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const Vec2 a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
    const double two_area = 2.0 * mesh.area[t];
    // grad lambda_i is the inward-scaled normal of the opposite edge
    grad_[t][0] = Vec2{b.y - c.y, c.x - b.x} / two_area;
    grad_[t][1] = Vec2{c.y - a.y, a.x - c.x} / two_area;
    grad_[t][2] = Vec2{a.y - b.y, b.x - a.x} / two_area;
  }

  std::vector<Eigen::Triplet<double>> tm, ti;
  tm.reserve(9 * nt);
  ti.reserve(9 * nt);
  for (int t = 0; t < nt; ++t) {
    const Eigen::Matrix3d m = local_mass(t);
    const Eigen::Matrix3d mi = local_mass_inverse(t);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        tm.emplace_back(dof(t, r), dof(t, c), m(r, c));
        ti.emplace_back(dof(t, r), dof(t, c), mi(r, c));
      }
  }
  mass_.resize(3 * nt, 3 * nt);
  mass_inv_.resize(3 * nt, 3 * nt);
  mass_.setFromTriplets(tm.begin(), tm.end());
  mass_inv_.setFromTriplets(ti.begin(), ti.end());
}

std::array<double, 3> DGSpace::barycentric(int element, Vec2 p) const {
  const Vec2 a = mesh_->vertex(element, 0);
  const Vec2 d = p - a;
  const double l2 = grad_[element][1].dot(d);
  const double l3 = grad_[element][2].dot(d);
  return {1.0 - l2 - l3, l2, l3};
}

Eigen::Matrix3d DGSpace::local_mass(int element) const {
  const double area = mesh_->area[element];
  if (!(area > 0.0))
    throw GeometryError("local_mass: degenerate element " + std::to_string(element));
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (area / 12.0) * m;
}

Eigen::Matrix3d DGSpace::local_mass_inverse(int element) const {
  const double area = mesh_->area[element];
  if (!(area > 0.0))
    throw GeometryError("local_mass_inverse: degenerate element " + std::to_string(element));
  Eigen::Matrix3d m;
  m << 9, -3, -3, -3, 9, -3, -3, -3, 9;
  return m / area;
}

double DGFunction::evaluate(int element, Vec2 p) const {
  if (element < 0 || element >= space->mesh().n_elements())
    throw std::out_of_range("DGFunction::evaluate: element index out of range");
  const auto lambda = space->barycentric(element, p);
  const int base = DGSpace::dof(element, 0);
  return coeffs[base] * lambda[0] + coeffs[base + 1] * lambda[1] + coeffs[base + 2] * lambda[2];
}

Vec2 DGFunction::gradient(int element) const {
  const int base = DGSpace::dof(element, 0);
  Vec2 g;
  for (int l = 0; l < 3; ++l) g = g + space->basis_gradient(element, l) * coeffs[base + l];
  return g;
}

DGFunction l2_project(const DGSpace& space, const ScalarField& f, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const QuadRule& rule = triangle_rule(quad_degree);
  DGFunction out(space);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    Eigen::Vector3d load = Eigen::Vector3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 p = map_to_triangle(mesh, t, rule.points[q]);
      const double w = triangle_weight(mesh, t, rule.weights[q]);
      const double fv = f(p);
      const auto lambda = space.barycentric(t, p);
      for (int l = 0; l < 3; ++l) load[l] += w * fv * lambda[l];
    }
    out.coeffs.segment<3>(DGSpace::dof(t, 0)) = space.local_mass_inverse(t) * load;
  }
  return out;
}

}  // namespace dwdg
