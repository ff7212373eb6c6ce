#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwdg/geometry.hpp"

namespace dwdg {

/// Complete problem data for -eps Lap(u) + zeta.grad(u) + gamma u = f with
/// Dirichlet data g. The exact-solution callables are optional and drive the
/// error norms when present. Specs are immutable value objects.
struct ProblemSpec {
  std::string name;
  Rect domain;
  double eps = 1.0;  // > 0, or exactly 0 for the reduced (pure convection) mode
  VectorField zeta;
  ScalarField div_zeta;  // supplied analytically, never differenced
  ScalarField gamma;
  ScalarField f;
  ScalarField g;
  ScalarField exact;
  VectorField exact_grad;
  ScalarField exact_laplacian;
  std::optional<double> gamma0;  // annotation for the well-posedness assumption
  double default_sigma = 0.0;

  bool has_exact() const { return static_cast<bool>(exact); }
};

/// exp with the argument clamped so that deep-layer exponents underflow to an
/// exact 0 instead of producing inf/nan chains.
inline double layer_exp(double t) { return t <= -700.0 ? 0.0 : std::exp(t); }

ProblemSpec example_smooth(double eps = 1e-9);
ProblemSpec example_boundary_layer(double eps = 1e-9);
ProblemSpec example_interior_layer_discontinuous(double eps = 1e-9);
ProblemSpec example_interior_layer_arctan(double eps = 1e-9);

/// Catalog lookup by CLI name: smooth | boundary-layer | interior-discont |
/// interior-arctan. eps < 0 keeps each example's preset.
ProblemSpec example_by_name(const std::string& name, double eps = -1.0);
const std::vector<std::string>& example_names();

/// Builds f and g from a prescribed solution; the supplied derivatives are
/// cross-checked against finite differences on a 5x5 interior grid at
/// construction.
ProblemSpec manufactured(const ScalarField& u, const VectorField& grad_u,
                         const ScalarField& laplacian_u, const VectorField& zeta,
                         const ScalarField& div_zeta, const ScalarField& gamma, double eps,
                         Rect domain);

/// Sampled minimum of gamma - div(zeta)/2 over an n x n interior grid; a
/// nonpositive value means the well-posedness assumption fails and callers
/// should warn (the solver still runs).
double min_advection_reaction_sample(const ProblemSpec& p, int n = 5);

/// Problem from a JSON file whose fields mirror ProblemSpec with expression
/// strings (see README for the schema).
ProblemSpec problem_from_json_file(const std::string& path);
ProblemSpec problem_from_json_text(const std::string& text);

}  // namespace dwdg
