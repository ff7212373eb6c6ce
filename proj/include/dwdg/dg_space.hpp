#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>

#include "dwdg/geometry.hpp"
#include "dwdg/mesh.hpp"

namespace dwdg {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;  // CSR layout

/// Broken piecewise-linear space over a mesh: three nodal (barycentric) basis
/// functions per triangle, dofs ordered element-major. No inter-element
/// continuity.
class DGSpace {
 public:
  explicit DGSpace(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  int n_dofs() const { return 3 * mesh_->n_elements(); }
  static int dof(int element, int local) { return 3 * element + local; }

  /// Barycentric coordinates of a physical point within an element.
  std::array<double, 3> barycentric(int element, Vec2 p) const;

  /// Constant gradient of basis function `local` on `element`.
  Vec2 basis_gradient(int element, int local) const { return grad_[element][local]; }

  /// |T|/12 * [[2,1,1],[1,2,1],[1,1,2]]; throws GeometryError on a degenerate element.
  Eigen::Matrix3d local_mass(int element) const;
  /// Closed-form inverse (1/|T|) * [[9,-3,-3],[-3,9,-3],[-3,-3,9]].
  Eigen::Matrix3d local_mass_inverse(int element) const;

  /// Global block-diagonal mass matrix and its exact inverse.
  const SpMat& mass_matrix() const { return mass_; }
  const SpMat& mass_inverse() const { return mass_inv_; }

 private:
  const Mesh* mesh_;
  std::vector<std::array<Vec2, 3>> grad_;
  SpMat mass_, mass_inv_;
};

/// Coefficient vector over a DGSpace.
struct DGFunction {
  const DGSpace* space = nullptr;
  Eigen::VectorXd coeffs;

  DGFunction() = default;
  explicit DGFunction(const DGSpace& s) : space(&s), coeffs(Eigen::VectorXd::Zero(s.n_dofs())) {}
  DGFunction(const DGSpace& s, Eigen::VectorXd c) : space(&s), coeffs(std::move(c)) {}

  double evaluate(int element, Vec2 p) const;
  /// Broken gradient, constant per element.
  Vec2 gradient(int element) const;
  /// Trace value from one stored-coefficient element (same as evaluate; the
  /// element choice selects the side on an edge).
  double trace(int element, Vec2 p) const { return evaluate(element, p); }
};

/// Elementwise L2-orthogonal projection of a scalar field onto the space.
DGFunction l2_project(const DGSpace& space, const ScalarField& f, int quad_degree = 4);

}  // namespace dwdg
