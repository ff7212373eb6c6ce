#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dwdg/assembly.hpp"
#include "dwdg/norms.hpp"
#include "dwdg/problems.hpp"
#include "dwdg/quadrature.hpp"
#include "dwdg/solver.hpp"
#include "support/oracles.hpp"

using namespace dwdg;

namespace {

DGFunction constant_one(const DGSpace& space) {
  DGFunction f(space);
  f.coeffs.setOnes();
  return f;
}

const ScalarField kZero = [](Vec2) { return 0.0; };
const ScalarField kOne = [](Vec2) { return 1.0; };

}  // namespace

TEST_CASE("constant-function value of the convection-reaction form") {
  // zeta = (1,1), gamma = 1 on the unit square: form value 1 + 2 = 3
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2) { return Vec2{1.0, 1.0}; };
  const DGFunction one = constant_one(space);
  for (ConvectionPath path : {ConvectionPath::calculus, ConvectionPath::centered_flux}) {
    const SpMat a = assemble_convection_reaction(space, zeta, kZero, kOne, path);
    CHECK(one.coeffs.dot(a * one.coeffs) == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("both convection paths agree entrywise") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2 p) { return Vec2{p.x, p.y}; };
  const ScalarField div_zeta = [](Vec2) { return 2.0; };
  const SpMat a = assemble_convection_reaction(space, zeta, div_zeta, kZero,
                                               ConvectionPath::calculus);
  const SpMat b = assemble_convection_reaction(space, zeta, div_zeta, kZero,
                                               ConvectionPath::centered_flux);
  const Eigen::MatrixXd gap = Eigen::MatrixXd(a) - Eigen::MatrixXd(b);
  const double scale = Eigen::MatrixXd(b).cwiseAbs().maxCoeff();
  CHECK(gap.cwiseAbs().maxCoeff() <= 1e-11 * scale);
}

TEST_CASE("inflow set of the smooth-example data") {
  // zeta = (x1, x2) on [1,3]x[0,2]: only the x1 = 1 side is inflow
  const Mesh mesh = generate_structured_rect({1, 0, 3, 2}, 4, 4);
  const QuadRule& erule = edge_rule(4);
  const VectorField zeta = [](Vec2 p) { return Vec2{p.x, p.y}; };
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.boundary) continue;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const bool inflow = zeta(x).dot(edge.normal) < 0.0;
      const bool on_left = std::abs(x.x - 1.0) < 1e-12;
      CHECK(inflow == on_left);  // x2 = 0 is characteristic and excluded
    }
  }
}

TEST_CASE("upwind penalty: zero on continuous functions, PSD, oracle match") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2) { return Vec2{1.0, 0.25}; };
  const SpMat s = assemble_upwind_penalty(space, zeta);

  DGFunction cont(space);
  for (int t = 0; t < mesh.n_elements(); ++t)
    for (int l = 0; l < 3; ++l) {
      const Vec2 v = mesh.vertex(t, l);
      cont.coeffs[DGSpace::dof(t, l)] = 0.5 + v.x * v.x - v.y;  // not P1 but vertex-continuous
    }
  CHECK(std::abs(cont.coeffs.dot(s * cont.coeffs)) <= 1e-13);

  std::mt19937 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const DGFunction v = testing::random_function(space, rng);
    const double quad = v.coeffs.dot(s * v.coeffs);
    CHECK(quad >= -1e-13);
    CHECK(quad == doctest::Approx(testing::dense_upwind_quadratic_form(space, zeta, v))
                      .epsilon(1e-12));
  }
}

TEST_CASE("upwind penalty ignores edges orthogonal to the wind") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2) { return Vec2{1.0, 0.0}; };  // horizontal edges have zeta.n=0
  const SpMat s = assemble_upwind_penalty(space, zeta);
  // function jumping only across one horizontal edge
  int target = -1;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.boundary && std::abs(edge.normal.x) < 1e-12) {
      target = e;
      break;
    }
  }
  REQUIRE(target >= 0);
  DGFunction v(space);
  for (int l = 0; l < 3; ++l) v.coeffs[DGSpace::dof(mesh.edges[target].plus, l)] = 1.0;
  // the jump support also crosses the other edges of that element, so check
  // the horizontal edge's own contribution
  double contrib = 0.0;
  const QuadRule& erule = edge_rule(4);
  for (int q = 0; q < erule.size(); ++q) {
    const Vec2 x = map_to_edge(mesh, target, erule.points[q].x);
    const double jump = v.evaluate(mesh.edges[target].plus, x);
    contrib += 0.5 * std::abs(zeta(x).dot(mesh.edges[target].normal)) * jump * jump;
  }
  CHECK(contrib == 0.0);
}

TEST_CASE("dual-wind diffusion form") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const ZeroDataGradients grads = build_zero_data_gradients(space);

  SUBCASE("negative sigma is rejected") {
    CHECK_THROWS_AS(PenaltyPolicy::constant(mesh, -1.0), std::invalid_argument);
    PenaltyPolicy bad = PenaltyPolicy::zero(mesh);
    bad.sigma_e[0] = -2.0;
    CHECK_THROWS_AS(assemble_dwdg_diffusion(space, bad, grads), std::invalid_argument);
  }

  SUBCASE("symmetry and positive semidefiniteness") {
    const SpMat a = assemble_dwdg_diffusion(space, PenaltyPolicy::constant(mesh, 5.0), grads);
    const Eigen::MatrixXd ad(a);
    CHECK((ad - ad.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * ad.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ad);
    CHECK(es.eigenvalues().minCoeff() >= -1e-11 * es.eigenvalues().maxCoeff());
  }

  SUBCASE("quadratic form equals the dense oracle") {
    std::mt19937 rng(31);
    for (double sigma : {0.0, 5.0}) {
      const PenaltyPolicy pen = PenaltyPolicy::constant(mesh, sigma);
      const SpMat a = assemble_dwdg_diffusion(space, pen, grads);
      for (int rep = 0; rep < 5; ++rep) {
        const DGFunction v = testing::random_function(space, rng);
        const double expected = testing::dense_dwdg_quadratic_form(space, sigma, v);
        CHECK(v.coeffs.dot(a * v.coeffs) == doctest::Approx(expected).epsilon(1e-11));
      }
    }
  }

  SUBCASE("continuous function vanishing on the boundary gives the broken energy") {
    DGFunction v(space);
    const auto bump = [](Vec2 p) {
      return p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
    };
    for (int t = 0; t < mesh.n_elements(); ++t)
      for (int l = 0; l < 3; ++l)
        v.coeffs[DGSpace::dof(t, l)] = bump(mesh.vertex(t, l));
    const SpMat a = assemble_dwdg_diffusion(space, PenaltyPolicy::zero(mesh), grads);
    double broken = 0.0;
    for (int t = 0; t < mesh.n_elements(); ++t) {
      const Vec2 g = v.gradient(t);
      broken += mesh.area[t] * g.dot(g);
    }
    CHECK(v.coeffs.dot(a * v.coeffs) == doctest::Approx(broken).epsilon(1e-11));
  }

  SUBCASE("sigma = 0 on a double-boundary mesh warns") {
    const Mesh ne = generate_structured_rect({0, 0, 1, 1}, 4, 4, DiagonalRule::uniform_ne);
    const DGSpace sp(ne);
    const ZeroDataGradients g2 = build_zero_data_gradients(sp);
    std::vector<std::string> warnings;
    assemble_dwdg_diffusion(sp, PenaltyPolicy::zero(ne), g2, &warnings);
    CHECK(warnings.size() == 1);
    warnings.clear();
    const Mesh safe = generate_structured_rect({0, 0, 1, 1}, 4, 4, DiagonalRule::corner_safe);
    const DGSpace sp2(safe);
    const ZeroDataGradients g3 = build_zero_data_gradients(sp2);
    assemble_dwdg_diffusion(sp2, PenaltyPolicy::zero(safe), g3, &warnings);
    CHECK(warnings.empty());
  }
}

TEST_CASE("coercivity identities of the convection forms") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2 p) { return Vec2{p.x, p.y}; };
  const ScalarField div_zeta = [](Vec2) { return 2.0; };
  const ScalarField gamma = [](Vec2) { return 3.0; };
  const SpMat a_ar = assemble_convection_reaction(space, zeta, div_zeta, gamma,
                                                  ConvectionPath::centered_flux);
  const SpMat s = assemble_upwind_penalty(space, zeta);
  const QuadRule& erule = edge_rule(4);

  std::mt19937 rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    const DGFunction v = testing::random_function(space, rng);
    const ScalarField coeff = [&](Vec2 x) { return gamma(x) - 0.5 * div_zeta(x); };
    double rhs = volume_product(space, coeff, v, v);
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const Edge& edge = mesh.edges[e];
      if (!edge.boundary) continue;
      for (int q = 0; q < erule.size(); ++q) {
        const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
        const double tr = v.evaluate(edge.plus, x);
        rhs += 0.5 * edge_weight(mesh, e, erule.weights[q]) *
               std::abs(zeta(x).dot(edge.normal)) * tr * tr;
      }
    }
    const double lhs = v.coeffs.dot(a_ar * v.coeffs);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(rhs));
    const double lhs_upw = lhs + v.coeffs.dot(s * v.coeffs);
    const double rhs_upw = rhs + testing::dense_upwind_quadratic_form(space, zeta, v);
    CHECK(std::abs(lhs_upw - rhs_upw) <= 1e-11 * std::abs(rhs_upw));
  }
}

TEST_CASE("full form composition") {
  const ProblemSpec p = example_smooth();
  const Mesh mesh = generate_structured_rect(p.domain, 8, 8);
  const DGSpace space(mesh);
  const PenaltyPolicy pen = PenaltyPolicy::constant(mesh, 5.0);
  const ZeroDataGradients grads = build_zero_data_gradients(space);
  const FormMatrices fm = assemble_full(space, p.zeta, p.div_zeta, p.gamma, p.f, p.g, p.eps,
                                        pen, ConvectionPath::centered_flux, 4, &grads);
  const Eigen::MatrixXd total(fm.A_total);
  const Eigen::MatrixXd parts(SpMat(p.eps * fm.A_d + fm.A_ar + fm.A_upwind_penalty));
  CHECK((total - parts).cwiseAbs().maxCoeff() <=
        1e-14 * std::max(1.0, parts.cwiseAbs().maxCoeff()));
  const Eigen::MatrixXd ad(fm.A_d);
  CHECK((ad - ad.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * ad.cwiseAbs().maxCoeff());
}

TEST_CASE("rhs reductions") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2) { return Vec2{1.0, 1.0}; };
  const PenaltyPolicy pen = PenaltyPolicy::constant(mesh, 5.0);
  const ZeroDataGradients grads = build_zero_data_gradients(space);

  SUBCASE("g = 0 leaves only the source term") {
    const ScalarField f = [](Vec2 p) { return p.x + 2.0 * p.y; };
    const Eigen::VectorXd b = assemble_rhs_full(space, f, kZero, zeta, 1e-3, pen, grads);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(space.n_dofs());
    const QuadRule& trule = triangle_rule(4);
    for (int t = 0; t < mesh.n_elements(); ++t)
      for (int q = 0; q < trule.size(); ++q) {
        const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
        const double w = triangle_weight(mesh, t, trule.weights[q]) * f(x);
        const auto lam = space.barycentric(t, x);
        for (int l = 0; l < 3; ++l) expected[DGSpace::dof(t, l)] += w * lam[l];
      }
    CHECK((b - expected).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("f = 0, eps = 0 leaves only the inflow term") {
    const ScalarField g = [](Vec2 p) { return 1.0 + p.x; };
    const Eigen::VectorXd b = assemble_rhs_full(space, kZero, g, zeta, 0.0, pen, grads);
    const QuadRule& erule = edge_rule(4);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(space.n_dofs());
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const Edge& edge = mesh.edges[e];
      if (!edge.boundary) continue;
      for (int q = 0; q < erule.size(); ++q) {
        const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
        const double zn = zeta(x).dot(edge.normal);
        if (!(zn < 0.0)) continue;
        const auto lam = space.barycentric(edge.plus, x);
        for (int l = 0; l < 3; ++l)
          expected[DGSpace::dof(edge.plus, l)] +=
              edge_weight(mesh, e, erule.weights[q]) * std::abs(zn) * g(x) * lam[l];
      }
    }
    CHECK((b - expected).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("reduced problem reproduces a global affine solution") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 8, 8);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2) { return Vec2{2.0, 1.0}; };
  const ScalarField gamma = [](Vec2) { return 2.0; };
  const ScalarField exact = [](Vec2 p) { return 1.0 - 0.5 * p.x + 2.0 * p.y; };
  const ScalarField f = [&](Vec2 p) { return 2.0 * (-0.5) + 1.0 * 2.0 + 2.0 * exact(p); };
  const FormMatrices fm = assemble_reduced(space, zeta, kZero, gamma, f, exact);
  auto [u, rep] = solve(fm.A_total, fm.rhs);
  for (int t = 0; t < mesh.n_elements(); ++t)
    for (int l = 0; l < 3; ++l)
      CHECK(u[DGSpace::dof(t, l)] ==
            doctest::Approx(exact(mesh.vertex(t, l))).epsilon(1e-10));
}

TEST_CASE("reduced assembly succeeds on discontinuous inflow data") {
  const ProblemSpec p = example_interior_layer_discontinuous();
  const Mesh mesh = generate_structured_rect(p.domain, 8, 8);
  const DGSpace space(mesh);
  const FormMatrices fm = assemble_reduced(space, p.zeta, p.div_zeta, p.gamma, p.f, p.g);
  CHECK(fm.rhs.cwiseAbs().maxCoeff() > 0.0);
  CHECK(fm.A_total.nonZeros() > 0);
}

TEST_CASE("zero data gives the zero solution") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const VectorField zeta = [](Vec2) { return Vec2{1.0, 0.0}; };
  const ScalarField gamma = [](Vec2) { return 1.0; };
  const FormMatrices fm = assemble_reduced(space, zeta, kZero, gamma, kZero, kZero);
  auto [u, rep] = solve(fm.A_total, fm.rhs);
  CHECK(u.cwiseAbs().maxCoeff() <= 1e-14);
}
