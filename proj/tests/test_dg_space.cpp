#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dwdg/dg_calculus.hpp"
#include "dwdg/dg_space.hpp"
#include "dwdg/errors.hpp"
#include "dwdg/quadrature.hpp"
#include "support/oracles.hpp"

using namespace dwdg;

TEST_CASE("local mass matrix of the unit right triangle") {
  Mesh mesh;
  mesh.domain = {0, 0, 1, 1};
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  build_topology(mesh);
  const DGSpace space(mesh);
  const Eigen::Matrix3d m = space.local_mass(0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(m(i, j) == doctest::Approx(i == j ? 1.0 / 12.0 : 1.0 / 24.0).epsilon(1e-15));
  CHECK((space.local_mass_inverse(0) * m - Eigen::Matrix3d::Identity()).norm() < 1e-14);
}

TEST_CASE("mass matrix row sums and affine scaling") {
  const Mesh mesh = generate_structured_rect({0, 0, 2, 2}, 2, 2);
  const DGSpace space(mesh);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const Eigen::Matrix3d m = space.local_mass(t);
    for (int r = 0; r < 3; ++r)
      CHECK(m.row(r).sum() == doctest::Approx(mesh.area[t] / 3.0).epsilon(1e-14));
  }
  // scaling the element area by 4 scales the matrix by 4
  const Mesh coarse = generate_structured_rect({0, 0, 1, 1}, 2, 2);
  const Mesh fine = generate_structured_rect({0, 0, 2, 2}, 2, 2);
  const Eigen::Matrix3d mc = DGSpace(coarse).local_mass(0);
  const Eigen::Matrix3d mf = DGSpace(fine).local_mass(0);
  CHECK((mf - 4.0 * mc).norm() < 1e-14);
}

TEST_CASE("degenerate element raises GeometryError") {
  Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 2, 2);
  const DGSpace space(mesh);
  mesh.area[1] = 0.0;  // corrupt after construction; the space reads through the mesh
  CHECK_THROWS_AS(space.local_mass(1), GeometryError);
  CHECK_THROWS_AS(space.local_mass_inverse(1), GeometryError);
}

TEST_CASE("projection reproduces affine fields at the vertices") {
  const Mesh mesh = generate_structured_rect({1, 0, 3, 2}, 4, 4);
  const DGSpace space(mesh);
  const auto f = [](Vec2 p) { return 0.7 - 1.3 * p.x + 0.25 * p.y; };
  const DGFunction pf = l2_project(space, f);
  for (int t = 0; t < mesh.n_elements(); ++t)
    for (int l = 0; l < 3; ++l) {
      const Vec2 v = mesh.vertex(t, l);
      CHECK(pf.coeffs[DGSpace::dof(t, l)] == doctest::Approx(f(v)).epsilon(1e-12));
    }
}

TEST_CASE("projection error of x^2 drops by about 4 per refinement") {
  const auto f = [](Vec2 p) { return p.x * p.x; };
  auto l2_error = [&](int n) {
    const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, n, n);
    const DGSpace space(mesh);
    const DGFunction pf = l2_project(space, f);
    const QuadRule& rule = triangle_rule(8);
    double err = 0.0;
    for (int t = 0; t < mesh.n_elements(); ++t)
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 x = map_to_triangle(mesh, t, rule.points[q]);
        const double d = f(x) - pf.evaluate(t, x);
        err += triangle_weight(mesh, t, rule.weights[q]) * d * d;
      }
    return std::sqrt(err);
  };
  const double ratio = l2_error(4) / l2_error(8);
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
}

TEST_CASE("projection of zero is zero") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 2, 2);
  const DGSpace space(mesh);
  const DGFunction pf = l2_project(space, [](Vec2) { return 0.0; });
  CHECK(pf.coeffs.norm() == 0.0);
}

TEST_CASE("basis evaluation") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 2, 2);
  const DGSpace space(mesh);
  DGFunction e0(space);
  e0.coeffs[DGSpace::dof(3, 0)] = 1.0;  // lambda_1 on element 3
  CHECK(e0.evaluate(3, mesh.vertex(3, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  const Vec2 mid = (mesh.vertex(3, 1) + mesh.vertex(3, 2)) * 0.5;
  CHECK(e0.evaluate(3, mid) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(e0.evaluate(99, mid), std::out_of_range);

  // affine reproduction at the centroid
  const auto f = [](Vec2 p) { return 2.0 * p.x - p.y + 0.5; };
  const DGFunction pf = l2_project(space, f);
  for (int t = 0; t < mesh.n_elements(); ++t)
    CHECK(pf.evaluate(t, mesh.centroid[t]) == doctest::Approx(f(mesh.centroid[t])).epsilon(1e-12));
}

TEST_CASE("projection is L2-orthogonal against random test functions") {
  const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 4, 4);
  const DGSpace space(mesh);
  const auto f = [](Vec2 p) { return std::sin(3.0 * p.x) * std::exp(p.y); };
  const DGFunction pf = l2_project(space, f, 8);
  std::mt19937 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const DGFunction v = testing::random_function(space, rng);
    const double lhs = pf.coeffs.dot(space.mass_matrix() * v.coeffs);
    double rhs = 0.0;
    const QuadRule& rule = triangle_rule(8);
    for (int t = 0; t < mesh.n_elements(); ++t)
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 x = map_to_triangle(mesh, t, rule.points[q]);
        rhs += triangle_weight(mesh, t, rule.weights[q]) * f(x) * v.evaluate(t, x);
      }
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}
