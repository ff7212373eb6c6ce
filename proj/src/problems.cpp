#include "dwdg/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dwdg/expr.hpp"

namespace dwdg {

ProblemSpec example_smooth(double eps) {
  ProblemSpec p;
  p.name = "smooth";
  p.domain = {1.0, 0.0, 3.0, 2.0};
  p.eps = eps;
  p.zeta = [](Vec2 x) { return Vec2{x.x, x.y}; };
  p.div_zeta = [](Vec2) { return 2.0; };
  p.gamma = [](Vec2) { return 0.0; };
  p.exact = [](Vec2 x) { return x.y / x.x; };
  p.exact_grad = [](Vec2 x) { return Vec2{-x.y / (x.x * x.x), 1.0 / x.x}; };
  p.exact_laplacian = [](Vec2 x) { return 2.0 * x.y / (x.x * x.x * x.x); };
  // zeta.grad(u) = 0 for this field, so the source is purely diffusive
  p.f = [eps](Vec2 x) { return -2.0 * eps * x.y / (x.x * x.x * x.x); };
  p.g = p.exact;
  return p;
}

ProblemSpec example_boundary_layer(double eps) {
  ProblemSpec p;
  p.name = "boundary-layer";
  p.domain = {0.0, 0.0, 1.0, 1.0};
  p.eps = eps;
  p.zeta = [](Vec2) { return Vec2{1.0, 1.0}; };
  p.div_zeta = [](Vec2) { return 0.0; };
  p.gamma = [](Vec2) { return 0.0; };

  const double a = layer_exp(-1.0 / eps);
  const double denom = 1.0 - a;
  auto t = [eps](Vec2 x) { return (x.x - 1.0) * (1.0 - x.y) / eps; };

  p.exact = [a, denom, t](Vec2 x) {
    return x.x + x.y * (1.0 - x.x) + (a - layer_exp(t(x))) / denom;
  };
  p.exact_grad = [eps, denom, t](Vec2 x) {
    const double e = layer_exp(t(x));
    const double tx1 = (1.0 - x.y) / eps;
    const double tx2 = (1.0 - x.x) / eps;
    return Vec2{1.0 - x.y - e * tx1 / denom, 1.0 - x.x - e * tx2 / denom};
  };
  p.exact_laplacian = [eps, denom, t](Vec2 x) {
    const double e = layer_exp(t(x));
    const double tx1 = (1.0 - x.y) / eps;
    const double tx2 = (1.0 - x.x) / eps;
    return -e * (tx1 * tx1 + tx2 * tx2) / denom;
  };
  p.f = [eps, denom, t](Vec2 x) {
    const double e = layer_exp(t(x));
    const double tx1 = (1.0 - x.y) / eps;
    const double tx2 = (1.0 - x.x) / eps;
    return eps * e * (tx1 * tx1 + tx2 * tx2) / denom + (1.0 - x.y) + (1.0 - x.x) -
           e * (tx1 + tx2) / denom;
  };
  p.g = p.exact;
  return p;
}

ProblemSpec example_interior_layer_discontinuous(double eps) {
  ProblemSpec p;
  p.name = "interior-discont";
  p.domain = {0.0, 0.0, 1.0, 1.0};
  p.eps = eps;
  p.zeta = [](Vec2) { return Vec2{0.5, std::sqrt(3.0) / 2.0}; };
  p.div_zeta = [](Vec2) { return 0.0; };
  p.gamma = [](Vec2) { return 0.0; };
  p.f = [](Vec2) { return 0.0; };
  p.g = [](Vec2 x) {
    const double tol = 1e-12;
    if (x.y <= tol) return 1.0;                       // bottom side
    if (x.x <= tol && x.y <= 0.2 + tol) return 1.0;   // lower part of the left side
    return 0.0;
  };
  return p;
}

ProblemSpec example_interior_layer_arctan(double eps) {
  ProblemSpec p;
  p.name = "interior-arctan";
  p.domain = {0.0, 0.0, 1.0, 1.0};
  p.eps = eps;
  p.zeta = [](Vec2) { return Vec2{1.0, 0.0}; };
  p.div_zeta = [](Vec2) { return 0.0; };
  p.gamma = [](Vec2) { return 0.0; };

  p.exact = [eps](Vec2 x) {
    const double c = 1.0 - x.x;
    return c * c * c * std::atan((x.y - 0.5) / eps);
  };
  p.exact_grad = [eps](Vec2 x) {
    const double c = 1.0 - x.x;
    const double s = (x.y - 0.5) / eps;
    return Vec2{-3.0 * c * c * std::atan(s), c * c * c / (eps * (1.0 + s * s))};
  };
  p.exact_laplacian = [eps](Vec2 x) {
    const double c = 1.0 - x.x;
    const double s = (x.y - 0.5) / eps;
    const double one_s2 = 1.0 + s * s;
    return 6.0 * c * std::atan(s) - c * c * c * 2.0 * s / (eps * eps * one_s2 * one_s2);
  };
  p.f = [eps](Vec2 x) {
    const double c = 1.0 - x.x;
    const double s = (x.y - 0.5) / eps;
    const double one_s2 = 1.0 + s * s;
    return -eps * 6.0 * c * std::atan(s) + 2.0 * s * c * c * c / (eps * one_s2 * one_s2) -
           3.0 * c * c * std::atan(s);
  };
  p.g = p.exact;
  return p;
}

ProblemSpec example_by_name(const std::string& name, double eps) {
  if (name == "smooth") return example_smooth(eps < 0 ? 1e-9 : eps);
  if (name == "boundary-layer") return example_boundary_layer(eps < 0 ? 1e-9 : eps);
  if (name == "interior-discont")
    return example_interior_layer_discontinuous(eps < 0 ? 1e-9 : eps);
  if (name == "interior-arctan") return example_interior_layer_arctan(eps < 0 ? 1e-9 : eps);
  throw std::invalid_argument("unknown example '" + name + "'");
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names = {"smooth", "boundary-layer", "interior-discont",
                                                 "interior-arctan"};
  return names;
}

namespace {

void check_derivatives_fd(const ScalarField& u, const VectorField& grad_u,
                          const ScalarField& lap_u, Rect domain) {
  const double hx = 1e-6 * std::max(1.0, domain.width());
  const double hl = 1e-4 * std::max(1.0, domain.width());
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const Vec2 x{domain.x0 + (i + 0.5) / 5.0 * domain.width(),
                   domain.y0 + (j + 0.5) / 5.0 * domain.height()};
      const Vec2 g = grad_u(x);
      const double fdx = (u({x.x + hx, x.y}) - u({x.x - hx, x.y})) / (2.0 * hx);
      const double fdy = (u({x.x, x.y + hx}) - u({x.x, x.y - hx})) / (2.0 * hx);
      const double gscale = std::max({1.0, std::abs(g.x), std::abs(g.y)});
      if (std::abs(fdx - g.x) > 1e-4 * gscale || std::abs(fdy - g.y) > 1e-4 * gscale)
        throw std::invalid_argument(
            "manufactured: gradient callable disagrees with finite differences");
      const double fdl = (u({x.x + hl, x.y}) + u({x.x - hl, x.y}) + u({x.x, x.y + hl}) +
                          u({x.x, x.y - hl}) - 4.0 * u(x)) /
                         (hl * hl);
      const double l = lap_u(x);
      if (std::abs(fdl - l) > 1e-3 * std::max(1.0, std::abs(l)))
        throw std::invalid_argument(
            "manufactured: laplacian callable disagrees with finite differences");
    }
  }
}

}  // namespace

ProblemSpec manufactured(const ScalarField& u, const VectorField& grad_u,
                         const ScalarField& laplacian_u, const VectorField& zeta,
                         const ScalarField& div_zeta, const ScalarField& gamma, double eps,
                         Rect domain) {
  check_derivatives_fd(u, grad_u, laplacian_u, domain);
  ProblemSpec p;
  p.name = "manufactured";
  p.domain = domain;
  p.eps = eps;
  p.zeta = zeta;
  p.div_zeta = div_zeta;
  p.gamma = gamma;
  p.exact = u;
  p.exact_grad = grad_u;
  p.exact_laplacian = laplacian_u;
  p.f = [u, grad_u, laplacian_u, zeta, gamma, eps](Vec2 x) {
    return -eps * laplacian_u(x) + zeta(x).dot(grad_u(x)) + gamma(x) * u(x);
  };
  p.g = u;
  return p;
}

double min_advection_reaction_sample(const ProblemSpec& p, int n) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x{p.domain.x0 + (i + 0.5) / n * p.domain.width(),
                   p.domain.y0 + (j + 0.5) / n * p.domain.height()};
      m = std::min(m, p.gamma(x) - 0.5 * p.div_zeta(x));
    }
  return m;
}

namespace {

ScalarField field_from(const nlohmann::json& j, const std::string& key, double eps,
                       bool required) {
  if (!j.contains(key)) {
    if (required) throw std::invalid_argument("config: missing field '" + key + "'");
    return {};
  }
  return Expression::parse(j.at(key).get<std::string>()).bind(eps);
}

}  // namespace

ProblemSpec problem_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ProblemSpec p;
  p.name = j.value("name", std::string("config"));
  const auto dom = j.at("domain");
  if (!dom.is_array() || dom.size() != 4)
    throw std::invalid_argument("config: domain must be [x0, y0, x1, y1]");
  p.domain = {dom[0].get<double>(), dom[1].get<double>(), dom[2].get<double>(),
              dom[3].get<double>()};
  p.eps = j.value("eps", 1.0);
  p.default_sigma = j.value("sigma", 0.0);
  if (j.contains("gamma0")) p.gamma0 = j.at("gamma0").get<double>();

  const auto zeta = j.at("zeta");
  if (!zeta.is_array() || zeta.size() != 2)
    throw std::invalid_argument("config: zeta must be a pair of expressions");
  const Expression z1 = Expression::parse(zeta[0].get<std::string>());
  const Expression z2 = Expression::parse(zeta[1].get<std::string>());
  const double eps = p.eps;
  p.zeta = [z1, z2, eps](Vec2 x) { return Vec2{z1(x, eps), z2(x, eps)}; };
  p.div_zeta = field_from(j, "div_zeta", eps, true);
  ScalarField gamma = field_from(j, "gamma", eps, false);
  p.gamma = gamma ? gamma : [](Vec2) { return 0.0; };

  p.exact = field_from(j, "exact", eps, false);
  if (j.contains("exact_grad")) {
    const auto grad = j.at("exact_grad");
    if (!grad.is_array() || grad.size() != 2)
      throw std::invalid_argument("config: exact_grad must be a pair of expressions");
    const Expression gx = Expression::parse(grad[0].get<std::string>());
    const Expression gy = Expression::parse(grad[1].get<std::string>());
    p.exact_grad = [gx, gy, eps](Vec2 x) { return Vec2{gx(x, eps), gy(x, eps)}; };
  }
  p.exact_laplacian = field_from(j, "exact_laplacian", eps, false);

  ScalarField f = field_from(j, "f", eps, false);
  ScalarField g = field_from(j, "g", eps, false);
  if (!f) {
    if (!(p.exact && p.exact_grad && p.exact_laplacian))
      throw std::invalid_argument(
          "config: either f or (exact, exact_grad, exact_laplacian) must be given");
    const ScalarField u = p.exact;
    const VectorField gu = p.exact_grad;
    const ScalarField lu = p.exact_laplacian;
    const VectorField zf = p.zeta;
    const ScalarField gf = p.gamma;
    f = [u, gu, lu, zf, gf, eps](Vec2 x) {
      return -eps * lu(x) + zf(x).dot(gu(x)) + gf(x) * u(x);
    };
  }
  if (!g) {
    if (!p.exact) throw std::invalid_argument("config: either g or exact must be given");
    g = p.exact;
  }
  p.f = f;
  p.g = g;
  return p;
}

ProblemSpec problem_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return problem_from_json_text(ss.str());
}

}  // namespace dwdg
