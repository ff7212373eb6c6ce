#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dwdg/geometry.hpp"

namespace dwdg {

/// Oriented edge record. On an interior edge the two adjacent triangles are
/// labelled so that `plus` is the one with the larger global element index;
/// `normal` is the unit outward normal of the plus side. A boundary edge has
/// `minus == -1` and `normal` pointing out of the domain.
struct Edge {
  std::array<int, 2> v{-1, -1};
  int plus = -1;
  int minus = -1;
  Vec2 normal;
  double length = 0.0;
  bool boundary = false;

  bool interior() const { return !boundary; }
};

enum class DiagonalRule {
  uniform_ne,   ///< every cell split along its lower-left -> upper-right diagonal
  corner_safe,  ///< flips the two corner cells whose NE split yields a triangle with two boundary edges
};

/// Conforming triangulation of a rectangle. Immutable after construction;
/// all element/edge bookkeeping is precomputed.
struct Mesh {
  Rect domain;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> triangle_edges;  // edge ids for (v0v1, v1v2, v2v0)
  std::vector<double> area;
  std::vector<double> diameter;
  std::vector<Vec2> centroid;
  double grid_spacing = 0.0;  // structured spacing s = width/nx; 0 for imported meshes

  int n_elements() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }

  Vec2 vertex(int t, int local) const { return vertices[triangles[t][local]]; }
};

struct MeshReport {
  double h = 0.0;      // max element diameter
  double h_min = 0.0;
  double h_max = 0.0;
  int n_elements = 0;
  int n_edges = 0;
  int n_boundary_edges = 0;
  int double_boundary_elements = 0;  // elements with more than one boundary edge
  double quasi_uniformity = 1.0;     // max diameter ratio over edge-adjacent pairs
};

Mesh generate_structured_rect(Rect domain, int nx, int ny,
                              DiagonalRule rule = DiagonalRule::corner_safe);

/// Checks topology/orientation invariants and gathers size statistics.
/// Throws TopologyError on an inconsistent mesh.
MeshReport validate_mesh(const Mesh& mesh);

using ElementMask = std::vector<std::uint8_t>;

/// True for every triangle whose three vertices lie in the closed box.
ElementMask subdomain_mask(const Mesh& mesh, Rect box);

/// Builds edge topology, normals and element geometry from vertices+triangles.
/// Used by the generator and the mesh reader.
void build_topology(Mesh& mesh);

/// Plain-text mesh exchange: node count line, node lines (1-based index, x, y),
/// then triangle count line and triangle lines (1-based indices).
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

}  // namespace dwdg
