#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dwdg/assembly.hpp"
#include "dwdg/dg_calculus.hpp"
#include "dwdg/dg_space.hpp"

namespace dwdg {

/// All mesh-dependent norms of the scheme, evaluated together. `l2` through
/// `h_sharp_star` are in solution units; `quad_saturation` is set when two
/// quadrature degrees disagree by more than 5% on some entry (layer
/// under-resolution).
struct NormReport {
  double l2 = 0.0;
  double ar = 0.0;
  double upw = 0.0;
  double upw_star = 0.0;
  double upw_sharp = 0.0;
  double d = 0.0;
  double h = 0.0;
  double h_star = 0.0;
  double h_sharp = 0.0;
  double h_sharp_star = 0.0;
  bool quad_saturation = false;

  double value(std::string_view key) const;
  static const std::vector<std::string>& keys();
};

/// Norm suite of a discrete function. Interior-edge terms enter only when both
/// neighbours are masked; boundary terms follow the masked adjacent element.
NormReport norm_suite(const DGFunction& v, const VectorField& zeta, double eps,
                      const PenaltyPolicy& penalty, const ZeroDataGradients& grads,
                      const ElementMask* mask = nullptr, int quad_degree = 8);

/// Exact solution data for error measurement; `grad` may be empty, in which
/// case the streamline-gradient norms throw CapabilityError.
struct ExactSolution {
  ScalarField value;
  VectorField grad;
};

/// Norm suite of u - u_h with u evaluated by quadrature. Interior jumps of the
/// smooth u cancel identically; the one-sided discrete gradients of u are
/// obtained from the defining projection of its single-valued traces.
NormReport error_norm_suite(const ExactSolution& u, const DGFunction& u_h,
                            const VectorField& zeta, double eps, const PenaltyPolicy& penalty,
                            const ZeroDataGradients& grads, const ElementMask* mask = nullptr,
                            int quad_degree = 8, bool saturation_check = true);

/// Discrete gradient of a continuous function through the defining projection
/// of its traces (both one-sided gradients coincide). `mode` selects the
/// boundary handling; `g` is used in data mode.
std::array<DGFunction, 2> discrete_gradient_of_exact(const DGSpace& space, const ScalarField& u,
                                                     BoundaryMode mode = BoundaryMode::zero_data,
                                                     const ScalarField& g = {},
                                                     int quad_degree = 8);

struct InfSupEstimate {
  double value = 0.0;  // smallest singular value of the Gram-normalized form
  double probe = 0.0;  // streamline test-function probe for the minimizing v
};

/// Dense inf-sup estimate of the full form in the streamline-augmented norm
/// pairing. Feasible only at small sizes; throws std::invalid_argument beyond
/// max_dofs and NumericError if the Gram matrix is not positive definite.
InfSupEstimate estimate_infsup(const DGSpace& space, const VectorField& zeta,
                               const ScalarField& div_zeta, const ScalarField& gamma,
                               double eps, const PenaltyPolicy& penalty, int quad_degree = 4,
                               int max_dofs = 6000);

/// Gram matrix of the streamline-augmented norm (used by the estimator and by
/// its cross-checks).
SpMat h_sharp_gram(const DGSpace& space, const VectorField& zeta, double eps,
                   const PenaltyPolicy& penalty, const ZeroDataGradients& grads,
                   int quad_degree = 4);

}  // namespace dwdg
