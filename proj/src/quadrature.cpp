#include "dwdg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dwdg {

namespace {

void add_centroid(QuadRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

// Orbit (a, a, 1-2a) in barycentric coordinates; reference coords are
// (lambda_2, lambda_3).
void add_orbit3(QuadRule& r, double a, double w) {
  const double c = 1.0 - 2.0 * a;
  r.points.push_back({a, c});
  r.points.push_back({a, a});
  r.points.push_back({c, a});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void add_orbit6(QuadRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({b, c});
  r.points.push_back({c, b});
  r.points.push_back({a, c});
  r.points.push_back({c, a});
  r.points.push_back({a, b});
  r.points.push_back({b, a});
  for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

// Dunavant symmetric rules; tabulated weights sum to 1 and are halved here so
// the rule integrates over the reference triangle of area 1/2.
QuadRule make_triangle_rule(int degree) {
  QuadRule r;
  r.degree = degree;
  switch (degree) {
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 4:
      add_orbit3(r, 0.44594849091596488631832925388305,
                 0.22338158967801146569500700843312 * 0.5);
      add_orbit3(r, 0.09157621350977074345957146340220,
                 0.10995174365532186763832632490021 * 0.5);
      break;
    case 6:
      add_orbit3(r, 0.24928674517091042129163855310702,
                 0.11678627572637936602528961138558 * 0.5);
      add_orbit3(r, 0.06308901449150222834033160287082,
                 0.05084490637020681692093680910686 * 0.5);
      add_orbit6(r, 0.31035245103378440541660773395655,
                 0.63650249912139864723014259441205,
                 0.08285107561837357519355345642044 * 0.5);
      break;
    case 8:
      add_centroid(r, 0.14431560767778716825109111048906 * 0.5);
      add_orbit3(r, 0.17056930775176020662229350149146,
                 0.10321737053471825028179155029212 * 0.5);
      add_orbit3(r, 0.05054722831703097545842355059660,
                 0.03245849762319808031092592834178 * 0.5);
      add_orbit3(r, 0.45929258829272315602881551449417,
                 0.09509163426728462479389610438858 * 0.5);
      add_orbit6(r, 0.26311282963463811342178578628464,
                 0.72849239295540428124100037917606,
                 0.02723031417443499426484469007390 * 0.5);
      break;
    default:
      throw std::invalid_argument("triangle_rule: supported degrees are 2, 4, 6, 8");
  }
  return r;
}

// Gauss-Legendre nodes on [-1,1] by Newton iteration, mapped to [0,1].
QuadRule make_edge_rule(int degree) {
  if (degree < 1 || degree > 40)
    throw std::invalid_argument("edge_rule: degree must be in [1, 40]");
  const int n = (degree + 2) / 2;  // 2n-1 >= degree
  QuadRule r;
  r.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n and P_n' by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points.push_back({0.5 * (1.0 - x), 0.0});  // descending cos -> ascending t
    r.weights.push_back(0.5 * w);
  }
  return r;
}

}  // namespace

const QuadRule& triangle_rule(int degree) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make_triangle_rule(degree)).first;
  return it->second;
}

const QuadRule& edge_rule(int degree) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make_edge_rule(degree)).first;
  return it->second;
}

}  // namespace dwdg
