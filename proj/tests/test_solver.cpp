#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dwdg/assembly.hpp"
#include "dwdg/errors.hpp"
#include "dwdg/problems.hpp"
#include "dwdg/solver.hpp"

using namespace dwdg;

TEST_CASE("identity system returns the right-hand side") {
  const int n = 50;
  SpMat a(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd b(n);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < n; ++i) b[i] = dist(rng);
  for (SolverMethod m : {SolverMethod::direct, SolverMethod::iterative}) {
    auto [u, rep] = solve(a, b, m);
    CHECK((u - b).norm() <= 1e-12);
    CHECK(rep.n == n);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  SpMat a(4, 4);
  a.setIdentity();
  CHECK_THROWS_AS(solve(a, Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("singular factorization raises SolverError") {
  const int n = 6;
  SpMat a(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n - 1; ++i) trip.emplace_back(i, i, 1.0);  // last row/col empty
  a.setFromTriplets(trip.begin(), trip.end());
  CHECK_THROWS_AS(solve(a, Eigen::VectorXd::Ones(n)), SolverError);
  // the iterative path cannot reach tolerance on the inconsistent system either
  CHECK_THROWS_AS(solve(a, Eigen::VectorXd::Ones(n), SolverMethod::iterative), SolverError);
}

TEST_CASE("direct and iterative solutions agree on h = 1/32 systems") {
  const ProblemSpec p = example_boundary_layer();
  const Mesh mesh = generate_structured_rect(p.domain, 32, 32);
  const DGSpace space(mesh);
  const PenaltyPolicy pen = PenaltyPolicy::zero(mesh);
  const FormMatrices fm =
      assemble_full(space, p.zeta, p.div_zeta, p.gamma, p.f, p.g, p.eps, pen);
  auto [ud, rd] = solve(fm.A_total, fm.rhs, SolverMethod::direct);
  auto [ui, ri] = solve(fm.A_total, fm.rhs, SolverMethod::iterative);
  CHECK(rd.rel_residual <= 1e-10);
  CHECK(ri.rel_residual <= 1e-8);
  CHECK(ri.iterations > 0);
  CHECK((ud - ui).norm() <= 1e-7 * ud.norm());
}

TEST_CASE("residual is recomputed, not trusted" * doctest::timeout(300)) {
  // end-to-end solve of the largest acceptance-scale system
  const ProblemSpec p = example_boundary_layer();
  const Mesh mesh = generate_structured_rect(p.domain, 128, 128);
  const DGSpace space(mesh);
  REQUIRE(space.n_dofs() == 98304);
  const PenaltyPolicy pen = PenaltyPolicy::zero(mesh);
  const FormMatrices fm =
      assemble_full(space, p.zeta, p.div_zeta, p.gamma, p.f, p.g, p.eps, pen);
  auto [u, rep] = solve(fm.A_total, fm.rhs, SolverMethod::direct);
  CHECK((fm.A_total * u - fm.rhs).norm() / fm.rhs.norm() == doctest::Approx(rep.rel_residual));
  CHECK(rep.rel_residual <= 1e-10);
  CHECK(rep.seconds < 120.0);
}
