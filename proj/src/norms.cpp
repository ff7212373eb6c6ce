#include "dwdg/norms.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "dwdg/errors.hpp"
#include "dwdg/quadrature.hpp"

namespace dwdg {

namespace {

double raw_value(const NormReport& r, std::string_view key) {
  if (key == "l2") return r.l2;
  if (key == "ar") return r.ar;
  if (key == "upw") return r.upw;
  if (key == "upw_star") return r.upw_star;
  if (key == "upw_sharp") return r.upw_sharp;
  if (key == "d") return r.d;
  if (key == "h") return r.h;
  if (key == "h_star") return r.h_star;
  if (key == "h_sharp") return r.h_sharp;
  if (key == "h_sharp_star") return r.h_sharp_star;
  throw std::invalid_argument("NormReport: unknown norm key '" + std::string(key) + "'");
}

}  // namespace

double NormReport::value(std::string_view key) const {
  const double v = raw_value(*this, key);
  if (std::isnan(v))
    throw CapabilityError("norm '" + std::string(key) +
                          "' unavailable: exact gradient callable missing");
  return v;
}

const std::vector<std::string>& NormReport::keys() {
  static const std::vector<std::string> k = {"l2",  "ar", "upw", "upw_star",  "upw_sharp",
                                             "d",   "h",  "h_star", "h_sharp", "h_sharp_star"};
  return k;
}

namespace {

// value(t, x): the measured function inside element t (discrete v, or u - u_h)
using LocalValue = std::function<double(int, Vec2)>;
// zeta(x) . grad of the measured function on element t; empty when unavailable
using LocalStream = std::function<double(int, Vec2)>;

struct NormPieces {
  double l2sq = 0.0;
  double bnd = 0.0;        // 1/2 int_{dOmega} |zeta.n| v^2
  double jump_upw = 0.0;   // sum 1/2 int |zeta.n| [v]^2 over interior edges
  double dT = 0.0;         // sum_T ||v||^2_{L2(dT)}
  double invh_l2 = 0.0;    // sum_T h_T^{-1} ||v||^2_{L2(T)}
  double stream = 0.0;     // sum_T h_T ||zeta.grad v||^2_{L2(T)}
  bool has_stream = false;
  double dgrad = 0.0;      // 1/2 (||grad+ v||^2 + ||grad- v||^2), masked
  double dpen = 0.0;       // sum sigma_e/h_e ||[v]||^2 over all edges
};

bool in_mask(const ElementMask* mask, int t) { return !mask || (*mask)[t] != 0; }

NormPieces compute_pieces(const DGSpace& space, const LocalValue& value,
                          const LocalStream& stream_value, const VectorField& zeta,
                          const PenaltyPolicy& penalty,
                          const std::array<const DGFunction*, 2>& grad_plus,
                          const std::array<const DGFunction*, 2>& grad_minus,
                          const ElementMask* mask, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const QuadRule& trule = triangle_rule(quad_degree);
  const QuadRule& erule = edge_rule(quad_degree);
  NormPieces p;
  p.has_stream = static_cast<bool>(stream_value);

  for (int t = 0; t < mesh.n_elements(); ++t) {
    if (!in_mask(mask, t)) continue;
    double vsq = 0.0, ssq = 0.0;
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]);
      const double v = value(t, x);
      vsq += w * v * v;
      if (p.has_stream) {
        const double s = stream_value(t, x);
        ssq += w * s * s;
      }
    }
    p.l2sq += vsq;
    p.invh_l2 += vsq / mesh.diameter[t];
    p.stream += mesh.diameter[t] * ssq;

    // element-boundary traces from this element's side
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.triangle_edges[t][le];
      for (int q = 0; q < erule.size(); ++q) {
        const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
        const double w = edge_weight(mesh, e, erule.weights[q]);
        const double v = value(t, x);
        p.dT += w * v * v;
      }
    }

    if (grad_plus[0]) {
      const Eigen::Matrix3d m = space.local_mass(t);
      for (int dir = 0; dir < 2; ++dir) {
        const auto gp = grad_plus[dir]->coeffs.segment<3>(DGSpace::dof(t, 0));
        const auto gm = grad_minus[dir]->coeffs.segment<3>(DGSpace::dof(t, 0));
        p.dgrad += 0.5 * (gp.dot(m * gp) + gm.dot(m * gm));
      }
    }
  }

  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const double pen = penalty.at(e) / edge.length;
    if (edge.boundary) {
      if (!in_mask(mask, edge.plus)) continue;
      for (int q = 0; q < erule.size(); ++q) {
        const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
        const double w = edge_weight(mesh, e, erule.weights[q]);
        const double v = value(edge.plus, x);
        p.bnd += 0.5 * w * std::abs(zeta(x).dot(edge.normal)) * v * v;
        p.dpen += pen * w * v * v;
      }
    } else {
      if (!in_mask(mask, edge.plus) || !in_mask(mask, edge.minus)) continue;
      for (int q = 0; q < erule.size(); ++q) {
        const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
        const double w = edge_weight(mesh, e, erule.weights[q]);
        const double jump = value(edge.plus, x) - value(edge.minus, x);
        p.jump_upw += 0.5 * w * std::abs(zeta(x).dot(edge.normal)) * jump * jump;
        p.dpen += pen * w * jump * jump;
      }
    }
  }

  return p;
}

NormReport combine(const NormPieces& p, double eps) {
  NormReport r;
  const double arsq = p.l2sq + p.bnd;
  const double upwsq = arsq + p.jump_upw;
  const double dsq = p.dgrad + p.dpen;
  const double hsq = eps * dsq + upwsq;
  r.l2 = std::sqrt(p.l2sq);
  r.ar = std::sqrt(arsq);
  r.upw = std::sqrt(upwsq);
  r.upw_star = std::sqrt(upwsq + p.dT);
  r.d = std::sqrt(dsq);
  r.h = std::sqrt(hsq);
  r.h_star = std::sqrt(eps * dsq + upwsq + p.dT);
  if (p.has_stream) {
    r.upw_sharp = std::sqrt(upwsq + p.stream);
    r.h_sharp = std::sqrt(hsq + p.stream);
    r.h_sharp_star = std::sqrt(hsq + p.stream + p.invh_l2 + p.dT);
  } else {
    r.upw_sharp = r.h_sharp = r.h_sharp_star =
        std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace

NormReport norm_suite(const DGFunction& v, const VectorField& zeta, double eps,
                      const PenaltyPolicy& penalty, const ZeroDataGradients& grads,
                      const ElementMask* mask, int quad_degree) {
  const DGSpace& space = *v.space;
  LocalValue value = [&v](int t, Vec2 x) { return v.evaluate(t, x); };
  LocalStream stream = [&v, &zeta](int t, Vec2 x) { return zeta(x).dot(v.gradient(t)); };

  std::array<DGFunction, 2> gp{DGFunction(space), DGFunction(space)};
  std::array<DGFunction, 2> gm{DGFunction(space), DGFunction(space)};
  for (int dir = 0; dir < 2; ++dir) {
    gp[dir].coeffs = grads.plus[dir].matrix * v.coeffs;
    gm[dir].coeffs = grads.minus[dir].matrix * v.coeffs;
  }
  const NormPieces p = compute_pieces(space, value, stream, zeta, penalty,
                                      {&gp[0], &gp[1]}, {&gm[0], &gm[1]}, mask, quad_degree);
  return combine(p, eps);
}

NormReport error_norm_suite(const ExactSolution& u, const DGFunction& u_h,
                            const VectorField& zeta, double eps, const PenaltyPolicy& penalty,
                            const ZeroDataGradients& grads, const ElementMask* mask,
                            int quad_degree, bool saturation_check) {
  if (!u.value) throw CapabilityError("error_norm_suite: exact solution callable missing");
  const DGSpace& space = *u_h.space;

  LocalValue value = [&](int t, Vec2 x) { return u.value(x) - u_h.evaluate(t, x); };
  LocalStream stream;
  if (u.grad)
    stream = [&](int t, Vec2 x) { return zeta(x).dot(u.grad(x) - u_h.gradient(t)); };

  // one-sided zero-data gradients of the error: projection of u minus the
  // operator applied to u_h (both one-sided projections of a continuous u
  // coincide)
  auto proj = discrete_gradient_of_exact(space, u.value, BoundaryMode::zero_data, {},
                                         quad_degree);
  std::array<DGFunction, 2> gp{DGFunction(space), DGFunction(space)};
  std::array<DGFunction, 2> gm{DGFunction(space), DGFunction(space)};
  for (int dir = 0; dir < 2; ++dir) {
    gp[dir].coeffs = proj[dir].coeffs - grads.plus[dir].matrix * u_h.coeffs;
    gm[dir].coeffs = proj[dir].coeffs - grads.minus[dir].matrix * u_h.coeffs;
  }

  auto run = [&](int qd) {
    const NormPieces p = compute_pieces(space, value, stream, zeta, penalty,
                                        {&gp[0], &gp[1]}, {&gm[0], &gm[1]}, mask, qd);
    return combine(p, eps);
  };

  NormReport r = run(quad_degree);
  if (saturation_check && quad_degree - 2 >= 2) {
    const NormReport lower = run(quad_degree - 2);
    for (const std::string& k : NormReport::keys()) {
      const double a = raw_value(r, k), b = raw_value(lower, k);
      if (std::isnan(a) || std::isnan(b)) continue;
      const double scale = std::max(std::abs(a), std::abs(b));
      if (scale > 0.0 && std::abs(a - b) / scale > 0.05) r.quad_saturation = true;
    }
  }
  return r;
}

std::array<DGFunction, 2> discrete_gradient_of_exact(const DGSpace& space, const ScalarField& u,
                                                     BoundaryMode mode, const ScalarField& g,
                                                     int quad_degree) {
  if (!u) throw CapabilityError("discrete_gradient_of_exact: solution callable missing");
  const Mesh& mesh = space.mesh();
  const QuadRule& erule = edge_rule(quad_degree);
  const QuadRule& trule = triangle_rule(quad_degree);

  std::array<Eigen::VectorXd, 2> rhs{Eigen::VectorXd::Zero(space.n_dofs()),
                                     Eigen::VectorXd::Zero(space.n_dofs())};

  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = edge_weight(mesh, e, erule.weights[q]);
      const double n1 = edge.normal.x, n2 = edge.normal.y;
      if (edge.boundary) {
        double uval;
        if (mode == BoundaryMode::natural) uval = u(x);
        else if (mode == BoundaryMode::data) uval = g ? g(x) : 0.0;
        else continue;
        const auto lam = space.barycentric(edge.plus, x);
        for (int lk = 0; lk < 3; ++lk) {
          rhs[0][DGSpace::dof(edge.plus, lk)] += w * uval * n1 * lam[lk];
          rhs[1][DGSpace::dof(edge.plus, lk)] += w * uval * n2 * lam[lk];
        }
      } else {
        const double uval = u(x);  // single-valued trace
        const auto lamP = space.barycentric(edge.plus, x);
        const auto lamM = space.barycentric(edge.minus, x);
        for (int lk = 0; lk < 3; ++lk) {
          rhs[0][DGSpace::dof(edge.plus, lk)] += w * uval * n1 * lamP[lk];
          rhs[0][DGSpace::dof(edge.minus, lk)] -= w * uval * n1 * lamM[lk];
          rhs[1][DGSpace::dof(edge.plus, lk)] += w * uval * n2 * lamP[lk];
          rhs[1][DGSpace::dof(edge.minus, lk)] -= w * uval * n2 * lamM[lk];
        }
      }
    }
  }

  for (int t = 0; t < mesh.n_elements(); ++t) {
    std::array<Vec2, 3> grad;
    for (int l = 0; l < 3; ++l) grad[l] = space.basis_gradient(t, l);
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]) * u(x);
      for (int lk = 0; lk < 3; ++lk) {
        rhs[0][DGSpace::dof(t, lk)] -= w * grad[lk].x;
        rhs[1][DGSpace::dof(t, lk)] -= w * grad[lk].y;
      }
    }
  }

  std::array<DGFunction, 2> out{DGFunction(space), DGFunction(space)};
  out[0].coeffs = space.mass_inverse() * rhs[0];
  out[1].coeffs = space.mass_inverse() * rhs[1];
  return out;
}

SpMat h_sharp_gram(const DGSpace& space, const VectorField& zeta, double eps,
                   const PenaltyPolicy& penalty, const ZeroDataGradients& grads,
                   int quad_degree) {
  const Mesh& mesh = space.mesh();
  SpMat n = space.mass_matrix();
  n += assemble_upwind_penalty(space, zeta, quad_degree);
  if (eps != 0.0) {
    std::vector<std::string> warn;
    n += SpMat(eps * assemble_dwdg_diffusion(space, penalty, grads, &warn));
  }

  std::vector<Eigen::Triplet<double>> trip;
  const QuadRule& erule = edge_rule(quad_degree);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.boundary) continue;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = 0.5 * std::abs(zeta(x).dot(edge.normal)) *
                       edge_weight(mesh, e, erule.weights[q]);
      if (w == 0.0) continue;
      const auto lam = space.barycentric(edge.plus, x);
      for (int lk = 0; lk < 3; ++lk)
        for (int lj = 0; lj < 3; ++lj)
          trip.emplace_back(DGSpace::dof(edge.plus, lk), DGSpace::dof(edge.plus, lj),
                            w * lam[lj] * lam[lk]);
    }
  }
  const QuadRule& trule = triangle_rule(quad_degree);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    std::array<Vec2, 3> grad;
    for (int l = 0; l < 3; ++l) grad[l] = space.basis_gradient(t, l);
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = mesh.diameter[t] * triangle_weight(mesh, t, trule.weights[q]);
      const Vec2 z = zeta(x);
      for (int lk = 0; lk < 3; ++lk)
        for (int lj = 0; lj < 3; ++lj)
          trip.emplace_back(DGSpace::dof(t, lk), DGSpace::dof(t, lj),
                            w * z.dot(grad[lj]) * z.dot(grad[lk]));
    }
  }
  SpMat extra(space.n_dofs(), space.n_dofs());
  extra.setFromTriplets(trip.begin(), trip.end());
  n += extra;
  return n;
}

InfSupEstimate estimate_infsup(const DGSpace& space, const VectorField& zeta,
                               const ScalarField& div_zeta, const ScalarField& gamma,
                               double eps, const PenaltyPolicy& penalty, int quad_degree,
                               int max_dofs) {
  const int n = space.n_dofs();
  if (n > max_dofs)
    throw std::invalid_argument("estimate_infsup: " + std::to_string(n) +
                                " dofs exceeds the dense budget of " + std::to_string(max_dofs));

  const ZeroDataGradients grads = build_zero_data_gradients(space, quad_degree);
  const ScalarField zero = [](Vec2) { return 0.0; };
  const FormMatrices fm =
      assemble_full(space, zeta, div_zeta, gamma, zero, zero, eps, penalty,
                    ConvectionPath::centered_flux, quad_degree, &grads);
  const SpMat gram = h_sharp_gram(space, zeta, eps, penalty, grads, quad_degree);

  const Eigen::MatrixXd A = Eigen::MatrixXd(fm.A_total);
  const Eigen::MatrixXd N = Eigen::MatrixXd(gram);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw NumericError("estimate_infsup: Gram matrix is not positive definite");
  const Eigen::MatrixXd n_inv_sqrt = es.operatorInverseSqrt();

  const Eigen::MatrixXd K = n_inv_sqrt * A * n_inv_sqrt;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  InfSupEstimate out;
  out.value = sv[sv.size() - 1];

  // Streamline probe: w|_T = h_T <zeta>_T . grad v for the minimizing v.
  const Eigen::VectorXd v = n_inv_sqrt * svd.matrixV().col(sv.size() - 1);
  DGFunction vf(space, v);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  const Mesh& mesh = space.mesh();
  const QuadRule& trule = triangle_rule(quad_degree);
  for (int t = 0; t < mesh.n_elements(); ++t) {
    Vec2 zbar{0.0, 0.0};
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      zbar = zbar + zeta(x) * triangle_weight(mesh, t, trule.weights[q]);
    }
    zbar = zbar / mesh.area[t];
    const double c = mesh.diameter[t] * zbar.dot(vf.gradient(t));
    for (int l = 0; l < 3; ++l) w[DGSpace::dof(t, l)] = c;
  }
  const double wn = std::sqrt(w.dot(N * w));
  const double vn = std::sqrt(v.dot(N * v));
  out.probe = (wn > 0.0 && vn > 0.0) ? std::abs(w.dot(A * v)) / (wn * vn) : 0.0;
  return out;
}

}  // namespace dwdg
