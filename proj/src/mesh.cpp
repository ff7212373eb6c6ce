#include "dwdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dwdg/errors.hpp"

namespace dwdg {

namespace {

double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * (b - a).cross(c - a); }

double tri_diameter(Vec2 a, Vec2 b, Vec2 c) {
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

}  // namespace

void build_topology(Mesh& mesh) {
  const int nt = mesh.n_elements();
  mesh.area.resize(nt);
  mesh.diameter.resize(nt);
  mesh.centroid.resize(nt);
  mesh.triangle_edges.assign(nt, {-1, -1, -1});
  mesh.edges.clear();

  for (int t = 0; t < nt; ++t) {
    const Vec2 a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
    mesh.area[t] = signed_area(a, b, c);
    if (mesh.area[t] <= 0.0)
      throw GeometryError("triangle " + std::to_string(t) +
                          " is degenerate or not counter-clockwise");
    mesh.diameter[t] = tri_diameter(a, b, c);
    mesh.centroid[t] = (a + b + c) / 3.0;
  }

  // Discover edges in deterministic (element, local-edge) order.
  std::map<std::pair<int, int>, int> edge_of;
  for (int t = 0; t < nt; ++t) {
    for (int le = 0; le < 3; ++le) {
      const int va = mesh.triangles[t][le];
      const int vb = mesh.triangles[t][(le + 1) % 3];
      const auto key = std::minmax(va, vb);
      auto [it, inserted] = edge_of.try_emplace({key.first, key.second},
                                                static_cast<int>(mesh.edges.size()));
      if (inserted) {
        Edge e;
        e.v = {va, vb};
        e.length = (mesh.vertices[vb] - mesh.vertices[va]).norm();
        e.plus = t;
        mesh.edges.push_back(e);
      } else {
        Edge& e = mesh.edges[it->second];
        if (e.minus != -1)
          throw TopologyError("edge shared by more than two triangles", it->second);
        e.minus = t;
      }
      mesh.triangle_edges[t][le] = it->second;
    }
  }

  for (std::size_t k = 0; k < mesh.edges.size(); ++k) {
    Edge& e = mesh.edges[k];
    e.boundary = (e.minus == -1);
    if (!e.boundary && e.plus < e.minus) std::swap(e.plus, e.minus);  // plus = larger index
    // Unit normal pointing out of the plus element.
    const Vec2 d = mesh.vertices[e.v[1]] - mesh.vertices[e.v[0]];
    Vec2 n{d.y / e.length, -d.x / e.length};
    const Vec2 mid = (mesh.vertices[e.v[0]] + mesh.vertices[e.v[1]]) * 0.5;
    if (n.dot(mid - mesh.centroid[e.plus]) < 0.0) n = n * -1.0;
    e.normal = n;
  }
}

Mesh generate_structured_rect(Rect domain, int nx, int ny, DiagonalRule rule) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("generate_structured_rect: nx and ny must be >= 2");
  if (domain.width() <= 0.0 || domain.height() <= 0.0)
    throw std::invalid_argument("generate_structured_rect: empty domain");

  Mesh mesh;
  mesh.domain = domain;
  mesh.grid_spacing = domain.width() / nx;

  const double sx = domain.width() / nx;
  const double sy = domain.height() / ny;
  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.push_back({domain.x0 + i * sx, domain.y0 + j * sy});

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      // The NE split puts two boundary legs on one triangle exactly in the
      // bottom-right and top-left corner cells; corner-safe flips those two.
      bool flip = false;
      if (rule == DiagonalRule::corner_safe)
        flip = (i == nx - 1 && j == 0) || (i == 0 && j == ny - 1);
      if (!flip) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }

  build_topology(mesh);
  return mesh;
}

MeshReport validate_mesh(const Mesh& mesh) {
  MeshReport rep;
  rep.n_elements = mesh.n_elements();
  rep.n_edges = mesh.n_edges();
  if (mesh.n_elements() == 0) throw TopologyError("mesh has no elements", -1);

  rep.h_min = rep.h_max = mesh.diameter[0];
  for (double d : mesh.diameter) {
    rep.h_min = std::min(rep.h_min, d);
    rep.h_max = std::max(rep.h_max, d);
  }
  rep.h = rep.h_max;

  std::vector<int> boundary_count(mesh.n_elements(), 0);
  for (int k = 0; k < mesh.n_edges(); ++k) {
    const Edge& e = mesh.edges[k];
    if (e.plus < 0 || e.plus >= mesh.n_elements())
      throw TopologyError("edge references nonexistent element", k);
    const auto& tv = mesh.triangles[e.plus];
    const bool attached = std::count(tv.begin(), tv.end(), e.v[0]) == 1 &&
                          std::count(tv.begin(), tv.end(), e.v[1]) == 1;
    if (!attached) throw TopologyError("dangling edge", k);

    const double len = (mesh.vertices[e.v[1]] - mesh.vertices[e.v[0]]).norm();
    if (std::abs(len - e.length) > 1e-14 * std::max(1.0, len))
      throw TopologyError("stored edge length disagrees with vertex distance", k);
    if (std::abs(e.normal.norm() - 1.0) > 1e-12)
      throw TopologyError("edge normal is not unit length", k);

    const Vec2 mid = (mesh.vertices[e.v[0]] + mesh.vertices[e.v[1]]) * 0.5;
    if (e.normal.dot(mid - mesh.centroid[e.plus]) <= 0.0)
      throw TopologyError("edge normal does not point out of its plus element", k);

    if (e.boundary) {
      ++rep.n_boundary_edges;
      ++boundary_count[e.plus];
    } else {
      if (e.plus <= e.minus)
        throw TopologyError("plus side does not carry the larger element index", k);
      if (e.normal.dot(mesh.centroid[e.minus] - mesh.centroid[e.plus]) <= 0.0)
        throw TopologyError("interior edge normal points into its plus element", k);
      const double ratio = std::max(mesh.diameter[e.plus] / mesh.diameter[e.minus],
                                    mesh.diameter[e.minus] / mesh.diameter[e.plus]);
      rep.quasi_uniformity = std::max(rep.quasi_uniformity, ratio);
    }
  }

  for (int c : boundary_count)
    if (c > 1) ++rep.double_boundary_elements;
  return rep;
}

ElementMask subdomain_mask(const Mesh& mesh, Rect box) {
  ElementMask mask(mesh.n_elements(), 0);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    bool in = true;
    for (int l = 0; l < 3; ++l) in = in && box.contains(mesh.vertex(t, l));
    mask[t] = in ? 1 : 0;
  }
  return mask;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out.precision(17);
  out << mesh.n_vertices() << " 2 0 0\n";
  for (int i = 0; i < mesh.n_vertices(); ++i)
    out << i + 1 << " " << mesh.vertices[i].x << " " << mesh.vertices[i].y << "\n";
  out << mesh.n_elements() << " 3 0\n";
  for (int t = 0; t < mesh.n_elements(); ++t)
    out << t + 1 << " " << mesh.triangles[t][0] + 1 << " " << mesh.triangles[t][1] + 1
        << " " << mesh.triangles[t][2] + 1 << "\n";
}

Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  int nv = 0, dim = 0, nattr = 0, nmark = 0;
  if (!(in >> nv >> dim >> nattr >> nmark) || nv <= 0 || dim != 2)
    throw std::runtime_error("mesh file: bad node header");
  mesh.vertices.resize(nv);
  for (int i = 0; i < nv; ++i) {
    int id;
    double x, y;
    if (!(in >> id >> x >> y)) throw std::runtime_error("mesh file: bad node line");
    if (id < 1 || id > nv) throw std::runtime_error("mesh file: node index out of range");
    mesh.vertices[id - 1] = {x, y};
    for (int a = 0; a < nattr + nmark; ++a) {
      double skip;
      in >> skip;
    }
  }
  int nt = 0, npt = 0;
  if (!(in >> nt >> npt) || nt <= 0 || npt != 3)
    throw std::runtime_error("mesh file: bad triangle header");
  int tattr = 0;
  in >> tattr;
  mesh.triangles.resize(nt);
  for (int t = 0; t < nt; ++t) {
    int id, a, b, c;
    if (!(in >> id >> a >> b >> c)) throw std::runtime_error("mesh file: bad triangle line");
    mesh.triangles[id - 1] = {a - 1, b - 1, c - 1};
    for (int x = 0; x < tattr; ++x) {
      double skip;
      in >> skip;
    }
  }
  // Orient CCW if the file stored clockwise triangles.
  for (auto& tv : mesh.triangles) {
    const Vec2 a = mesh.vertices[tv[0]], b = mesh.vertices[tv[1]], c = mesh.vertices[tv[2]];
    if (signed_area(a, b, c) < 0.0) std::swap(tv[1], tv[2]);
  }
  double x0 = mesh.vertices[0].x, x1 = x0, y0 = mesh.vertices[0].y, y1 = y0;
  for (const Vec2& v : mesh.vertices) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  mesh.domain = {x0, y0, x1, y1};
  build_topology(mesh);
  return mesh;
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open mesh file for writing: " + path);
  write_mesh(mesh, out);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(in);
}

}  // namespace dwdg
