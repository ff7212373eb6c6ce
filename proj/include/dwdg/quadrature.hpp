#pragma once

#include <vector>

#include "dwdg/geometry.hpp"
#include "dwdg/mesh.hpp"

namespace dwdg {

/// Quadrature rule on the reference triangle {x,y >= 0, x+y <= 1} or on the
/// reference edge [0,1]. Triangle weights sum to 1/2, edge weights to 1.
struct QuadRule {
  int degree = 0;                // monomials up to this total degree are exact
  std::vector<Vec2> points;      // edge rules use points[i].x as the 1D coordinate
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Symmetric positive-weight rules; degree must be one of {2, 4, 6, 8}.
const QuadRule& triangle_rule(int degree);

/// Gauss-Legendre on [0,1] with ceil((degree+1)/2) points; degree in [1, 40].
const QuadRule& edge_rule(int degree);

/// Physical quadrature point of a mapped triangle rule.
inline Vec2 map_to_triangle(const Mesh& mesh, int t, Vec2 ref) {
  const Vec2 a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
  return a + (b - a) * ref.x + (c - a) * ref.y;
}

/// Physical weight: reference weights sum to 1/2, |T| = jac/2.
inline double triangle_weight(const Mesh& mesh, int t, double ref_w) {
  return ref_w * 2.0 * mesh.area[t];
}

inline Vec2 map_to_edge(const Mesh& mesh, int e, double t01) {
  const Vec2 a = mesh.vertices[mesh.edges[e].v[0]];
  const Vec2 b = mesh.vertices[mesh.edges[e].v[1]];
  return a + (b - a) * t01;
}

inline double edge_weight(const Mesh& mesh, int e, double ref_w) {
  return ref_w * mesh.edges[e].length;
}

}  // namespace dwdg
