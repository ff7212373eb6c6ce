#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "dwdg/dg_calculus.hpp"
#include "dwdg/dg_space.hpp"

namespace dwdg {

/// Nonnegative jump-penalty weight per edge (the factor sigma_e in
/// sigma_e/h_e). Zero is admissible; the diffusion assembler warns when the
/// mesh then has elements with two boundary edges.
struct PenaltyPolicy {
  std::vector<double> sigma_e;

  static PenaltyPolicy constant(const Mesh& mesh, double sigma);
  static PenaltyPolicy zero(const Mesh& mesh) { return constant(mesh, 0.0); }
  double at(int edge) const { return sigma_e[edge]; }
  bool all_zero() const;
};

enum class ConvectionPath { calculus, centered_flux };

/// Zero-data one-sided gradient operators plus their average, shared by the
/// diffusion form, the boundary load, and the norm family.
struct ZeroDataGradients {
  std::array<DiscreteOperator, 2> plus;
  std::array<DiscreteOperator, 2> minus;
  std::array<SpMat, 2> average;
};

ZeroDataGradients build_zero_data_gradients(const DGSpace& space, int quad_degree = 4);

/// Convection-reaction form: the averaged-divergence route composed from the
/// materialized operators, or the equivalent centered-flux route assembled
/// directly; both include the reaction and inflow-boundary terms.
SpMat assemble_convection_reaction(const DGSpace& space, const VectorField& zeta,
                                   const ScalarField& div_zeta, const ScalarField& gamma,
                                   ConvectionPath path, int quad_degree = 4);

/// Interior-edge upwind stabilization < |zeta.n|/2 [v], [w] >.
SpMat assemble_upwind_penalty(const DGSpace& space, const VectorField& zeta,
                              int quad_degree = 4);

/// Dual-wind diffusion form: half the sum of the two one-sided gradient
/// energies plus the sigma_e/h_e jump penalty over all edges.
SpMat assemble_dwdg_diffusion(const DGSpace& space, const PenaltyPolicy& penalty,
                              const ZeroDataGradients& grads,
                              std::vector<std::string>* warnings = nullptr);

/// Right-hand side of the full scheme: source term, weak inflow data, and the
/// diffusive boundary coupling routed through the transposed average gradient.
Eigen::VectorXd assemble_rhs_full(const DGSpace& space, const ScalarField& f,
                                  const ScalarField& g, const VectorField& zeta, double eps,
                                  const PenaltyPolicy& penalty, const ZeroDataGradients& grads,
                                  int quad_degree = 4);

struct FormMatrices {
  SpMat A_ar;
  SpMat A_upwind_penalty;
  SpMat A_d;
  SpMat A_total;
  Eigen::VectorXd rhs;
  double eps = 0.0;
  double sigma = 0.0;
  ConvectionPath path = ConvectionPath::centered_flux;
  std::vector<std::string> warnings;
};

/// eps = 0 specialization (pure convection-reaction with upwind penalty).
FormMatrices assemble_reduced(const DGSpace& space, const VectorField& zeta,
                              const ScalarField& div_zeta, const ScalarField& gamma,
                              const ScalarField& f, const ScalarField& g,
                              ConvectionPath path = ConvectionPath::centered_flux,
                              int quad_degree = 4);

/// Full scheme: A = eps A_d + A_ar + upwind penalty, with the matching rhs.
FormMatrices assemble_full(const DGSpace& space, const VectorField& zeta,
                           const ScalarField& div_zeta, const ScalarField& gamma,
                           const ScalarField& f, const ScalarField& g, double eps,
                           const PenaltyPolicy& penalty,
                           ConvectionPath path = ConvectionPath::centered_flux,
                           int quad_degree = 4,
                           const ZeroDataGradients* grads = nullptr);

}  // namespace dwdg
