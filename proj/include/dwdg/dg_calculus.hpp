#pragma once

#include <Eigen/Sparse>
#include <array>
#include <optional>
#include <vector>

#include "dwdg/dg_space.hpp"
#include "dwdg/geometry.hpp"

namespace dwdg {

enum class Side { plus, minus };
enum class DivSide { plus, minus, avg };

/// How the boundary edges enter a discrete-derivative functional:
///  - natural:   own-side trace of the argument on every boundary edge
///  - zero_data: boundary edges dropped (homogeneous data)
///  - data:      boundary trace replaced by a given function g (affine load)
enum class BoundaryMode { natural, zero_data, data };

enum class TraceChoice { plus_side, minus_side, average, own_side };

/// Per-edge, per-direction tags telling which trace the directional selectors
/// pick: the upwind/downwind side when the edge normal has a component in that
/// direction, the average when it is orthogonal, the own side on the boundary.
class TraceSelector {
 public:
  explicit TraceSelector(const Mesh& mesh, double tol = 1e-12);

  TraceChoice choice(int edge, int dir, Side side) const {
    return tags_[edge][2 * dir + (side == Side::plus ? 0 : 1)];
  }

  /// Multiplier of the `from_plus` trace in the selected combination
  /// (1, 0, or 1/2).
  static double side_weight(TraceChoice c, bool from_plus) {
    switch (c) {
      case TraceChoice::plus_side: return from_plus ? 1.0 : 0.0;
      case TraceChoice::minus_side: return from_plus ? 0.0 : 1.0;
      case TraceChoice::average: return 0.5;
      case TraceChoice::own_side: return from_plus ? 1.0 : 0.0;
    }
    return 0.0;
  }

 private:
  std::vector<std::array<TraceChoice, 4>> tags_;
};

/// Sparse operator on DG coefficients with an optional affine part coming
/// from boundary data. Sparsity couples an element to itself and its edge
/// neighbours only.
struct DiscreteOperator {
  SpMat matrix;
  Eigen::VectorXd load;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd r = matrix * v;
    if (load.size()) r += load;
    return r;
  }
};

/// One-sided discrete partial derivative in direction `dir` (0 or 1),
/// materialized through the block mass solve of its defining functional.
DiscreteOperator build_partial(const DGSpace& space, int dir, Side side,
                               BoundaryMode mode = BoundaryMode::natural,
                               const ScalarField& g = {}, int quad_degree = 4);

/// Components of the averaged discrete gradient (mean of the two one-sided
/// gradients), same boundary-mode conventions.
std::array<DiscreteOperator, 2> build_avg_gradient(const DGSpace& space,
                                                   BoundaryMode mode = BoundaryMode::natural,
                                                   const ScalarField& g = {},
                                                   int quad_degree = 4);

/// v_h -> Div_h(zeta v_h) for a continuous vector field zeta, evaluated
/// pointwise at quadrature nodes so the weight commutes with the traces.
DiscreteOperator build_div_zeta(const DGSpace& space, const VectorField& zeta,
                                DivSide side, int quad_degree = 4);

/// Relative residual of the generalized integration-by-parts identity
/// linking Div+ and Div- (checked for both side pairings; the worst is
/// returned).
double check_ibp_identity(const DGSpace& space, const VectorField& zeta,
                          const ScalarField& div_zeta, const DGFunction& v,
                          const DGFunction& phi, int quad_degree = 4);

/// Relative residual of the identity equating the averaged divergence with
/// the centered-flux form.
double check_centered_flux_equiv(const DGSpace& space, const VectorField& zeta,
                                 const ScalarField& div_zeta, const DGFunction& v,
                                 const DGFunction& phi, int quad_degree = 4);

/// (c v, phi)_{T_h} with c evaluated pointwise; empty c means 1.
double volume_product(const DGSpace& space, const ScalarField& c, const DGFunction& v,
                      const DGFunction& phi, int quad_degree = 4);

/// < zeta.n, v phi > over the boundary edges.
double boundary_flux_product(const DGSpace& space, const VectorField& zeta, const DGFunction& v,
                             const DGFunction& phi, int quad_degree = 4);

namespace detail {

/// Defining-functional matrix and boundary load before the mass solve.
/// `weight` multiplies the integrands pointwise (used with the components of
/// a convective field); empty means 1. Exposed for the assembly module and
/// for oracle comparisons.
struct Functional {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd load;
};

Functional partial_functional(const DGSpace& space, int dir, Side side, BoundaryMode mode,
                              const ScalarField& g, const ScalarField& weight,
                              int quad_degree);

}  // namespace detail

}  // namespace dwdg
