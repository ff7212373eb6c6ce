#include "dwdg/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "dwdg/quadrature.hpp"

namespace dwdg {

PenaltyPolicy PenaltyPolicy::constant(const Mesh& mesh, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("PenaltyPolicy: sigma must be >= 0");
  PenaltyPolicy p;
  p.sigma_e.assign(mesh.edges.size(), sigma);
  return p;
}

bool PenaltyPolicy::all_zero() const {
  for (double s : sigma_e)
    if (s != 0.0) return false;
  return true;
}

ZeroDataGradients build_zero_data_gradients(const DGSpace& space, int quad_degree) {
  ZeroDataGradients g;
  for (int dir = 0; dir < 2; ++dir) {
    g.plus[dir] = build_partial(space, dir, Side::plus, BoundaryMode::zero_data, {}, quad_degree);
    g.minus[dir] = build_partial(space, dir, Side::minus, BoundaryMode::zero_data, {}, quad_degree);
    g.average[dir] = 0.5 * (g.plus[dir].matrix + g.minus[dir].matrix);
  }
  return g;
}

namespace {

// ((gamma - div zeta) v, w) + inflow boundary term, shared by both paths.
void add_reaction_and_inflow(const DGSpace& space, const VectorField& zeta,
                             const ScalarField& div_zeta, const ScalarField& gamma,
                             int quad_degree, std::vector<Eigen::Triplet<double>>& trip) {
  const Mesh& mesh = space.mesh();
  const QuadRule& trule = triangle_rule(quad_degree);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]) * (gamma(x) - div_zeta(x));
      if (w == 0.0) continue;
      const auto lam = space.barycentric(t, x);
      for (int lk = 0; lk < 3; ++lk)
        for (int lj = 0; lj < 3; ++lj)
          trip.emplace_back(DGSpace::dof(t, lk), DGSpace::dof(t, lj), w * lam[lj] * lam[lk]);
    }
  }

  const QuadRule& erule = edge_rule(quad_degree);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.boundary) continue;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double zn = zeta(x).dot(edge.normal);
      if (!(zn < 0.0)) continue;  // pointwise inflow indicator; zeta.n = 0 excluded
      const double w = edge_weight(mesh, e, erule.weights[q]) * std::abs(zn);
      const auto lam = space.barycentric(edge.plus, x);
      for (int lk = 0; lk < 3; ++lk)
        for (int lj = 0; lj < 3; ++lj)
          trip.emplace_back(DGSpace::dof(edge.plus, lk), DGSpace::dof(edge.plus, lj),
                            w * lam[lj] * lam[lk]);
    }
  }
}

}  // namespace

SpMat assemble_convection_reaction(const DGSpace& space, const VectorField& zeta,
                                   const ScalarField& div_zeta, const ScalarField& gamma,
                                   ConvectionPath path, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const int n = space.n_dofs();

  std::vector<Eigen::Triplet<double>> trip;
  add_reaction_and_inflow(space, zeta, div_zeta, gamma, quad_degree, trip);
  SpMat rest(n, n);
  rest.setFromTriplets(trip.begin(), trip.end());

  if (path == ConvectionPath::calculus) {
    const DiscreteOperator div_avg = build_div_zeta(space, zeta, DivSide::avg, quad_degree);
    SpMat a = space.mass_matrix() * div_avg.matrix;
    a += rest;
    return a;
  }

  // centered-flux route: (div(zeta v), w)_T - < zeta.n [v], {w} >_interior
  std::vector<Eigen::Triplet<double>> ctrip;
  const QuadRule& trule = triangle_rule(quad_degree);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    std::array<Vec2, 3> grad;
    for (int l = 0; l < 3; ++l) grad[l] = space.basis_gradient(t, l);
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]);
      const Vec2 z = zeta(x);
      const double dz = div_zeta(x);
      const auto lam = space.barycentric(t, x);
      for (int lj = 0; lj < 3; ++lj) {
        const double conv_j = dz * lam[lj] + z.dot(grad[lj]);
        for (int lk = 0; lk < 3; ++lk)
          ctrip.emplace_back(DGSpace::dof(t, lk), DGSpace::dof(t, lj), w * conv_j * lam[lk]);
      }
    }
  }
  const QuadRule& erule = edge_rule(quad_degree);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.boundary) continue;
    const int P = edge.plus, Mi = edge.minus;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = -edge_weight(mesh, e, erule.weights[q]) * zeta(x).dot(edge.normal);
      if (w == 0.0) continue;
      const auto lamP = space.barycentric(P, x);
      const auto lamM = space.barycentric(Mi, x);
      // [v] = v_P - v_M, {w} = (w_P + w_M)/2
      for (int lk = 0; lk < 3; ++lk) {
        for (int lj = 0; lj < 3; ++lj) {
          ctrip.emplace_back(DGSpace::dof(P, lk), DGSpace::dof(P, lj),
                             w * lamP[lj] * 0.5 * lamP[lk]);
          ctrip.emplace_back(DGSpace::dof(P, lk), DGSpace::dof(Mi, lj),
                             -w * lamM[lj] * 0.5 * lamP[lk]);
          ctrip.emplace_back(DGSpace::dof(Mi, lk), DGSpace::dof(P, lj),
                             w * lamP[lj] * 0.5 * lamM[lk]);
          ctrip.emplace_back(DGSpace::dof(Mi, lk), DGSpace::dof(Mi, lj),
                             -w * lamM[lj] * 0.5 * lamM[lk]);
        }
      }
    }
  }
  SpMat a(n, n);
  a.setFromTriplets(ctrip.begin(), ctrip.end());
  a += rest;
  return a;
}

SpMat assemble_upwind_penalty(const DGSpace& space, const VectorField& zeta, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const QuadRule& erule = edge_rule(quad_degree);
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.boundary) continue;
    const int P = edge.plus, Mi = edge.minus;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = 0.5 * std::abs(zeta(x).dot(edge.normal)) *
                       edge_weight(mesh, e, erule.weights[q]);
      if (w == 0.0) continue;
      const auto lamP = space.barycentric(P, x);
      const auto lamM = space.barycentric(Mi, x);
      const std::array<std::pair<int, double>, 6> jump{{{DGSpace::dof(P, 0), lamP[0]},
                                                        {DGSpace::dof(P, 1), lamP[1]},
                                                        {DGSpace::dof(P, 2), lamP[2]},
                                                        {DGSpace::dof(Mi, 0), -lamM[0]},
                                                        {DGSpace::dof(Mi, 1), -lamM[1]},
                                                        {DGSpace::dof(Mi, 2), -lamM[2]}}};
      for (const auto& [k, jk] : jump)
        for (const auto& [j, jj] : jump) trip.emplace_back(k, j, w * jj * jk);
    }
  }
  SpMat a(space.n_dofs(), space.n_dofs());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

namespace {

// sigma_e/h_e jump penalty over all edges (boundary jump = own trace).
SpMat assemble_jump_penalty(const DGSpace& space, const PenaltyPolicy& penalty,
                            int quad_degree = 4) {
  const Mesh& mesh = space.mesh();
  const QuadRule& erule = edge_rule(quad_degree);
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const double factor = penalty.at(e) / edge.length;
    if (factor == 0.0) continue;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = factor * edge_weight(mesh, e, erule.weights[q]);
      const auto lamP = space.barycentric(edge.plus, x);
      if (edge.boundary) {
        for (int lk = 0; lk < 3; ++lk)
          for (int lj = 0; lj < 3; ++lj)
            trip.emplace_back(DGSpace::dof(edge.plus, lk), DGSpace::dof(edge.plus, lj),
                              w * lamP[lj] * lamP[lk]);
      } else {
        const auto lamM = space.barycentric(edge.minus, x);
        const std::array<std::pair<int, double>, 6> jump{{{DGSpace::dof(edge.plus, 0), lamP[0]},
                                                          {DGSpace::dof(edge.plus, 1), lamP[1]},
                                                          {DGSpace::dof(edge.plus, 2), lamP[2]},
                                                          {DGSpace::dof(edge.minus, 0), -lamM[0]},
                                                          {DGSpace::dof(edge.minus, 1), -lamM[1]},
                                                          {DGSpace::dof(edge.minus, 2), -lamM[2]}}};
        for (const auto& [k, jk] : jump)
          for (const auto& [j, jj] : jump) trip.emplace_back(k, j, w * jj * jk);
      }
    }
  }
  SpMat a(space.n_dofs(), space.n_dofs());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

int count_double_boundary_elements(const Mesh& mesh) {
  std::vector<int> cnt(mesh.n_elements(), 0);
  for (const Edge& e : mesh.edges)
    if (e.boundary) ++cnt[e.plus];
  int n = 0;
  for (int c : cnt)
    if (c > 1) ++n;
  return n;
}

}  // namespace

SpMat assemble_dwdg_diffusion(const DGSpace& space, const PenaltyPolicy& penalty,
                              const ZeroDataGradients& grads,
                              std::vector<std::string>* warnings) {
  for (double s : penalty.sigma_e)
    if (s < 0.0) throw std::invalid_argument("assemble_dwdg_diffusion: sigma_e must be >= 0");
  if (penalty.all_zero() && warnings) {
    const int bad = count_double_boundary_elements(space.mesh());
    if (bad > 0)
      warnings->push_back("sigma_e = 0 with " + std::to_string(bad) +
                          " element(s) having two boundary edges; use a corner-safe mesh");
  }

  const SpMat& mass = space.mass_matrix();
  SpMat a(space.n_dofs(), space.n_dofs());
  for (int dir = 0; dir < 2; ++dir) {
    const SpMat& gp = grads.plus[dir].matrix;
    const SpMat& gm = grads.minus[dir].matrix;
    a += SpMat(0.5 * (gp.transpose() * (mass * gp).eval()));
    a += SpMat(0.5 * (gm.transpose() * (mass * gm).eval()));
  }
  a += assemble_jump_penalty(space, penalty);
  return a;
}

Eigen::VectorXd assemble_rhs_full(const DGSpace& space, const ScalarField& f,
                                  const ScalarField& g, const VectorField& zeta, double eps,
                                  const PenaltyPolicy& penalty, const ZeroDataGradients& grads,
                                  int quad_degree) {
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.n_dofs());

  const QuadRule& trule = triangle_rule(quad_degree);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]) * f(x);
      const auto lam = space.barycentric(t, x);
      for (int lk = 0; lk < 3; ++lk) b[DGSpace::dof(t, lk)] += w * lam[lk];
    }
  }

  // inflow data and the eps-scaled boundary terms
  const QuadRule& erule = edge_rule(quad_degree);
  Eigen::VectorXd rx = Eigen::VectorXd::Zero(space.n_dofs());
  Eigen::VectorXd ry = Eigen::VectorXd::Zero(space.n_dofs());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.boundary) continue;
    const double pen = penalty.at(e) / edge.length;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = edge_weight(mesh, e, erule.weights[q]);
      const double gv = g(x);
      const double zn = zeta(x).dot(edge.normal);
      const auto lam = space.barycentric(edge.plus, x);
      for (int lk = 0; lk < 3; ++lk) {
        const int k = DGSpace::dof(edge.plus, lk);
        if (zn < 0.0) b[k] += w * std::abs(zn) * gv * lam[lk];
        if (eps != 0.0) {
          b[k] += eps * w * pen * gv * lam[lk];
          rx[k] += w * gv * edge.normal.x * lam[lk];
          ry[k] += w * gv * edge.normal.y * lam[lk];
        }
      }
    }
  }
  if (eps != 0.0)
    b -= eps * (SpMat(grads.average[0].transpose()) * rx +
                SpMat(grads.average[1].transpose()) * ry);
  return b;
}

FormMatrices assemble_reduced(const DGSpace& space, const VectorField& zeta,
                              const ScalarField& div_zeta, const ScalarField& gamma,
                              const ScalarField& f, const ScalarField& g, ConvectionPath path,
                              int quad_degree) {
  FormMatrices fm;
  fm.eps = 0.0;
  fm.path = path;
  fm.A_ar = assemble_convection_reaction(space, zeta, div_zeta, gamma, path, quad_degree);
  fm.A_upwind_penalty = assemble_upwind_penalty(space, zeta, quad_degree);
  fm.A_d.resize(space.n_dofs(), space.n_dofs());
  fm.A_total = fm.A_ar + fm.A_upwind_penalty;

  const PenaltyPolicy none = PenaltyPolicy::zero(space.mesh());
  ZeroDataGradients dummy;  // eps = 0: gradient terms never touched
  for (int d = 0; d < 2; ++d) {
    dummy.plus[d].matrix.resize(space.n_dofs(), space.n_dofs());
    dummy.minus[d].matrix.resize(space.n_dofs(), space.n_dofs());
    dummy.average[d].resize(space.n_dofs(), space.n_dofs());
  }
  fm.rhs = assemble_rhs_full(space, f, g, zeta, 0.0, none, dummy, quad_degree);
  return fm;
}

FormMatrices assemble_full(const DGSpace& space, const VectorField& zeta,
                           const ScalarField& div_zeta, const ScalarField& gamma,
                           const ScalarField& f, const ScalarField& g, double eps,
                           const PenaltyPolicy& penalty, ConvectionPath path, int quad_degree,
                           const ZeroDataGradients* grads) {
  FormMatrices fm;
  fm.eps = eps;
  fm.path = path;
  fm.sigma = penalty.sigma_e.empty() ? 0.0 : penalty.sigma_e.front();

  ZeroDataGradients local;
  if (!grads) {
    local = build_zero_data_gradients(space, quad_degree);
    grads = &local;
  }

  fm.A_ar = assemble_convection_reaction(space, zeta, div_zeta, gamma, path, quad_degree);
  fm.A_upwind_penalty = assemble_upwind_penalty(space, zeta, quad_degree);
  fm.A_d = assemble_dwdg_diffusion(space, penalty, *grads, &fm.warnings);
  fm.A_total = eps * fm.A_d + fm.A_ar + fm.A_upwind_penalty;
  fm.rhs = assemble_rhs_full(space, f, g, zeta, eps, penalty, *grads, quad_degree);
  return fm;
}

}  // namespace dwdg
