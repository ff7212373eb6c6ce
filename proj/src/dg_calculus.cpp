#include "dwdg/dg_calculus.hpp"

#include <cmath>

#include "dwdg/quadrature.hpp"

namespace dwdg {

TraceSelector::TraceSelector(const Mesh& mesh, double tol) {
  tags_.resize(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    for (int dir = 0; dir < 2; ++dir) {
      const double ni = dir == 0 ? edge.normal.x : edge.normal.y;
      TraceChoice qp, qm;
      if (edge.boundary) {
        qp = qm = TraceChoice::own_side;
      } else if (ni > tol) {
        qp = TraceChoice::plus_side;
        qm = TraceChoice::minus_side;
      } else if (ni < -tol) {
        qp = TraceChoice::minus_side;
        qm = TraceChoice::plus_side;
      } else {
        qp = qm = TraceChoice::average;
      }
      tags_[e][2 * dir + 0] = qp;
      tags_[e][2 * dir + 1] = qm;
    }
  }
}

namespace detail {

Functional partial_functional(const DGSpace& space, int dir, Side side, BoundaryMode mode,
                              const ScalarField& g, const ScalarField& weight,
                              int quad_degree) {
  const Mesh& mesh = space.mesh();
  const TraceSelector selector(mesh);
  const QuadRule& erule = edge_rule(quad_degree);
  const QuadRule& trule = triangle_rule(quad_degree);

  Functional out;
  out.load = Eigen::VectorXd::Zero(space.n_dofs());
  out.triplets.reserve(static_cast<std::size_t>(mesh.n_edges()) * 36 +
                       static_cast<std::size_t>(mesh.n_elements()) * 9);

  auto wval = [&](Vec2 p) { return weight ? weight(p) : 1.0; };

  // Edge terms < Q(v) n_i, [phi] > over the mode's edge set.
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const double ni = dir == 0 ? edge.normal.x : edge.normal.y;
    const int P = edge.plus;
    const int Mi = edge.minus;

    if (edge.boundary) {
      if (mode == BoundaryMode::natural) {
        for (int q = 0; q < erule.size(); ++q) {
          const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
          const double w = edge_weight(mesh, e, erule.weights[q]) * wval(x) * ni;
          if (w == 0.0) continue;
          const auto lam = space.barycentric(P, x);
          for (int lj = 0; lj < 3; ++lj)
            for (int lk = 0; lk < 3; ++lk)
              out.triplets.emplace_back(DGSpace::dof(P, lk), DGSpace::dof(P, lj),
                                        w * lam[lj] * lam[lk]);
        }
      } else if (mode == BoundaryMode::data) {
        for (int q = 0; q < erule.size(); ++q) {
          const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
          const double w = edge_weight(mesh, e, erule.weights[q]) * wval(x) * ni;
          if (w == 0.0) continue;
          const double gv = g ? g(x) : 0.0;
          const auto lam = space.barycentric(P, x);
          for (int lk = 0; lk < 3; ++lk)
            out.load[DGSpace::dof(P, lk)] += w * gv * lam[lk];
        }
      }
      // zero_data: boundary edges contribute nothing
      continue;
    }

    const TraceChoice choice = selector.choice(e, dir, side);
    const double wp = TraceSelector::side_weight(choice, true);
    const double wm = TraceSelector::side_weight(choice, false);
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = edge_weight(mesh, e, erule.weights[q]) * wval(x) * ni;
      if (w == 0.0) continue;
      const auto lamP = space.barycentric(P, x);
      const auto lamM = space.barycentric(Mi, x);
      // jump [phi] = phi_P - phi_M; Q(v) = wp v_P + wm v_M
      for (int lk = 0; lk < 3; ++lk) {
        const int kP = DGSpace::dof(P, lk), kM = DGSpace::dof(Mi, lk);
        for (int lj = 0; lj < 3; ++lj) {
          if (wp != 0.0) {
            out.triplets.emplace_back(kP, DGSpace::dof(P, lj), w * wp * lamP[lj] * lamP[lk]);
            out.triplets.emplace_back(kM, DGSpace::dof(P, lj), -w * wp * lamP[lj] * lamM[lk]);
          }
          if (wm != 0.0) {
            out.triplets.emplace_back(kP, DGSpace::dof(Mi, lj), w * wm * lamM[lj] * lamP[lk]);
            out.triplets.emplace_back(kM, DGSpace::dof(Mi, lj), -w * wm * lamM[lj] * lamM[lk]);
          }
        }
      }
    }
  }

  // Volume term -(v, d phi / d x_i).
  for (int t = 0; t < mesh.n_elements(); ++t) {
    std::array<double, 3> gk;
    for (int lk = 0; lk < 3; ++lk) {
      const Vec2 gv = space.basis_gradient(t, lk);
      gk[lk] = dir == 0 ? gv.x : gv.y;
    }
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]) * wval(x);
      const auto lam = space.barycentric(t, x);
      for (int lk = 0; lk < 3; ++lk)
        for (int lj = 0; lj < 3; ++lj)
          out.triplets.emplace_back(DGSpace::dof(t, lk), DGSpace::dof(t, lj),
                                    -w * lam[lj] * gk[lk]);
    }
  }

  return out;
}

}  // namespace detail

namespace {

DiscreteOperator mass_solve(const DGSpace& space, detail::Functional&& f) {
  SpMat b(space.n_dofs(), space.n_dofs());
  b.setFromTriplets(f.triplets.begin(), f.triplets.end());
  DiscreteOperator op;
  op.matrix = space.mass_inverse() * b;
  op.load = space.mass_inverse() * f.load;
  return op;
}

double field_component(const VectorField& zeta, int dir, Vec2 p) {
  const Vec2 z = zeta(p);
  return dir == 0 ? z.x : z.y;
}

}  // namespace

DiscreteOperator build_partial(const DGSpace& space, int dir, Side side, BoundaryMode mode,
                               const ScalarField& g, int quad_degree) {
  return mass_solve(space,
                    detail::partial_functional(space, dir, side, mode, g, {}, quad_degree));
}

std::array<DiscreteOperator, 2> build_avg_gradient(const DGSpace& space, BoundaryMode mode,
                                                   const ScalarField& g, int quad_degree) {
  std::array<DiscreteOperator, 2> out;
  for (int dir = 0; dir < 2; ++dir) {
    DiscreteOperator p = build_partial(space, dir, Side::plus, mode, g, quad_degree);
    DiscreteOperator m = build_partial(space, dir, Side::minus, mode, g, quad_degree);
    out[dir].matrix = 0.5 * (p.matrix + m.matrix);
    out[dir].load = 0.5 * (p.load + m.load);
  }
  return out;
}

DiscreteOperator build_div_zeta(const DGSpace& space, const VectorField& zeta, DivSide side,
                                int quad_degree) {
  auto one_sided = [&](Side s) {
    detail::Functional total;
    for (int dir = 0; dir < 2; ++dir) {
      ScalarField component = [&zeta, dir](Vec2 p) { return field_component(zeta, dir, p); };
      detail::Functional f = detail::partial_functional(space, dir, s, BoundaryMode::natural,
                                                        {}, component, quad_degree);
      if (dir == 0) {
        total = std::move(f);
      } else {
        total.triplets.insert(total.triplets.end(), f.triplets.begin(), f.triplets.end());
        total.load += f.load;
      }
    }
    return mass_solve(space, std::move(total));
  };

  if (side == DivSide::plus) return one_sided(Side::plus);
  if (side == DivSide::minus) return one_sided(Side::minus);
  DiscreteOperator p = one_sided(Side::plus);
  DiscreteOperator m = one_sided(Side::minus);
  DiscreteOperator avg;
  avg.matrix = 0.5 * (p.matrix + m.matrix);
  avg.load = 0.5 * (p.load + m.load);
  return avg;
}

double volume_product(const DGSpace& space, const ScalarField& c, const DGFunction& v,
                      const DGFunction& phi, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const QuadRule& rule = triangle_rule(quad_degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, rule.points[q]);
      const double w = triangle_weight(mesh, t, rule.weights[q]);
      sum += w * (c ? c(x) : 1.0) * v.evaluate(t, x) * phi.evaluate(t, x);
    }
  }
  return sum;
}

double boundary_flux_product(const DGSpace& space, const VectorField& zeta, const DGFunction& v,
                             const DGFunction& phi, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const QuadRule& rule = edge_rule(quad_degree);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.boundary) continue;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, rule.points[q].x);
      const double w = edge_weight(mesh, e, rule.weights[q]);
      sum += w * zeta(x).dot(edge.normal) * v.evaluate(edge.plus, x) * phi.evaluate(edge.plus, x);
    }
  }
  return sum;
}

namespace {

double mass_product(const DGSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(space.mass_matrix() * b);
}

}  // namespace

double check_ibp_identity(const DGSpace& space, const VectorField& zeta,
                          const ScalarField& div_zeta, const DGFunction& v,
                          const DGFunction& phi, int quad_degree) {
  const DiscreteOperator div_p = build_div_zeta(space, zeta, DivSide::plus, quad_degree);
  const DiscreteOperator div_m = build_div_zeta(space, zeta, DivSide::minus, quad_degree);

  const double reaction = volume_product(space, div_zeta, v, phi, quad_degree);
  const double boundary = boundary_flux_product(space, zeta, v, phi, quad_degree);

  double worst = 0.0;
  for (int pairing = 0; pairing < 2; ++pairing) {
    const DiscreteOperator& dv = pairing == 0 ? div_p : div_m;
    const DiscreteOperator& dphi = pairing == 0 ? div_m : div_p;
    const double t1 = mass_product(space, phi.coeffs, dv.matrix * v.coeffs);
    const double t2 = mass_product(space, v.coeffs, dphi.matrix * phi.coeffs);
    const double residual = std::abs(t1 + t2 - reaction - boundary);
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(reaction),
                                   std::abs(boundary)});
    worst = std::max(worst, scale > 0.0 ? residual / scale : residual);
  }
  return worst;
}

double check_centered_flux_equiv(const DGSpace& space, const VectorField& zeta,
                                 const ScalarField& div_zeta, const DGFunction& v,
                                 const DGFunction& phi, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const DiscreteOperator div_avg = build_div_zeta(space, zeta, DivSide::avg, quad_degree);
  const double t1 = mass_product(space, phi.coeffs, div_avg.matrix * v.coeffs);

  // (div(zeta v), phi) with div(zeta v) = (div zeta) v + zeta . grad v per element
  const QuadRule& trule = triangle_rule(quad_degree);
  double t2 = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const Vec2 gv = v.gradient(t);
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]);
      t2 += w * (div_zeta(x) * v.evaluate(t, x) + zeta(x).dot(gv)) * phi.evaluate(t, x);
    }
  }

  // < zeta.n [v], {phi} > over interior edges
  const QuadRule& erule = edge_rule(quad_degree);
  double t3 = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.boundary) continue;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = edge_weight(mesh, e, erule.weights[q]);
      const double jump = v.evaluate(edge.plus, x) - v.evaluate(edge.minus, x);
      const double avg = 0.5 * (phi.evaluate(edge.plus, x) + phi.evaluate(edge.minus, x));
      t3 += w * zeta(x).dot(edge.normal) * jump * avg;
    }
  }

  const double residual = std::abs(t1 - t2 + t3);
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return scale > 0.0 ? residual / scale : residual;
}

}  // namespace dwdg
