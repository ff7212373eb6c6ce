#pragma once

#include <Eigen/Sparse>
#include <string>
#include <utility>

#include "dwdg/dg_space.hpp"

namespace dwdg {

enum class SolverMethod { direct, iterative };

struct SolveReport {
  double rel_residual = 0.0;  // recomputed from the returned solution
  int iterations = 0;         // 0 for the direct path
  double seconds = 0.0;
  int n = 0;
  std::string method;
};

/// Solves A u = b. Direct path: sparse LU with fill-reducing ordering,
/// required residual 1e-10. Iterative path: restarted GMRES with an
/// incomplete-LU preconditioner, required residual 1e-8; failure throws
/// ConvergenceError carrying the best iterate.
std::pair<Eigen::VectorXd, SolveReport> solve(const SpMat& A, const Eigen::VectorXd& b,
                                              SolverMethod method = SolverMethod::direct);

}  // namespace dwdg
