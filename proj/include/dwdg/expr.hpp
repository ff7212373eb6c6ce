#pragma once

#include <memory>
#include <string>

#include "dwdg/geometry.hpp"

namespace dwdg {

/// Compiled arithmetic expression in the variables x1, x2 (aliases x, y) and
/// the constants pi and eps. Supports + - * / ^ (right-associative power),
/// unary minus, parentheses, and the functions exp, atan, sqrt, sin, cos,
/// log, abs.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double eval(double x1, double x2, double eps) const;
  double operator()(Vec2 p, double eps) const { return eval(p.x, p.y, eps); }

  /// Bind eps now and get a plain scalar field.
  ScalarField bind(double eps) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace dwdg
