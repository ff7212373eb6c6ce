#include "dwdg/solver.hpp"

#include <Eigen/SparseLU>
#include <chrono>
#include <stdexcept>
#include <unsupported/Eigen/IterativeSolvers>

#include "dwdg/errors.hpp"

namespace dwdg {

namespace {

double relative_residual(const SpMat& A, const Eigen::VectorXd& u, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  return (A * u - b).norm() / (bn > 0.0 ? bn : 1.0);
}

}  // namespace

std::pair<Eigen::VectorXd, SolveReport> solve(const SpMat& A, const Eigen::VectorXd& b,
                                              SolverMethod method) {
  if (A.rows() != A.cols()) throw std::invalid_argument("solve: matrix must be square");
  if (A.rows() != b.size()) throw std::invalid_argument("solve: dimension mismatch");

  SolveReport rep;
  rep.n = static_cast<int>(A.rows());
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd u;

  if (method == SolverMethod::direct) {
    rep.method = "direct";
    Eigen::SparseMatrix<double> Ac = A;  // SparseLU wants column-major
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(Ac);
    lu.factorize(Ac);
    if (lu.info() != Eigen::Success)
      throw SolverError("direct solve: factorization failed: " + lu.lastErrorMessage());
    u = lu.solve(b);
    rep.rel_residual = relative_residual(A, u, b);
    if (!(rep.rel_residual <= 1e-10))
      throw SolverError("direct solve: residual " + std::to_string(rep.rel_residual) +
                        " exceeds 1e-10 (near-singular system)");
  } else {
    rep.method = "iterative";
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    Eigen::SparseMatrix<double> Ac = A;
    gmres.preconditioner().setFillfactor(20);
    gmres.preconditioner().setDroptol(1e-7);
    gmres.set_restart(80);
    gmres.setMaxIterations(4000);
    gmres.setTolerance(1e-12);
    gmres.compute(Ac);
    if (gmres.info() != Eigen::Success)
      throw SolverError("iterative solve: preconditioner setup failed");
    u = gmres.solve(b);
    rep.iterations = static_cast<int>(gmres.iterations());
    rep.rel_residual = relative_residual(A, u, b);
    if (!(rep.rel_residual <= 1e-8))
      throw ConvergenceError("iterative solve: residual " + std::to_string(rep.rel_residual) +
                                 " exceeds 1e-8 after " + std::to_string(rep.iterations) +
                                 " iterations",
                             rep.rel_residual, {u.data(), u.data() + u.size()});
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(u), rep};
}

}  // namespace dwdg
