#include "dwdg/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dwdg {

struct Expression::Node {
  enum class Kind { constant, var_x1, var_x2, var_eps, unary, binary } kind;
  double value = 0.0;
  char op = 0;                       // for binary: + - * / ^
  std::function<double(double)> fn;  // for unary
  std::shared_ptr<const Node> a, b;

  double eval(double x1, double x2, double eps) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::var_x1: return x1;
      case Kind::var_x2: return x2;
      case Kind::var_eps: return eps;
      case Kind::unary: return fn(a->eval(x1, x2, eps));
      case Kind::binary: {
        const double l = a->eval(x1, x2, eps);
        const double r = b->eval(x1, x2, eps);
        switch (op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': return l * r;
          case '/': return l / r;
          case '^': return std::pow(l, r);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

NodePtr make_var(Node::Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

NodePtr make_unary(std::function<double(double)> fn, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->fn = std::move(fn);
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(char op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size())
      throw std::invalid_argument("expression: unexpected input at '" + s_.substr(pos_) + "'");
    return e;
  }

 private:
  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      skip_ws();
      if (peek() == '+' || peek() == '-') {
        const char op = get();
        left = make_binary(op, left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = factor();
    for (;;) {
      skip_ws();
      if (peek() == '*' || peek() == '/') {
        const char op = get();
        left = make_binary(op, left, factor());
      } else {
        return left;
      }
    }
  }

  // unary minus binds looser than '^': -x^2 is -(x^2)
  NodePtr factor() {
    skip_ws();
    if (peek() == '-') {
      get();
      return make_unary([](double v) { return -v; }, factor());
    }
    if (peek() == '+') {
      get();
      return factor();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_ws();
    if (peek() == '^') {
      get();
      return make_binary('^', base, factor());  // right associative
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      get();
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw std::invalid_argument("expression: unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    std::size_t len = 0;
    const double v = std::stod(s_.substr(pos_), &len);
    pos_ += len;
    return make_const(v);
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "x1" || name == "x") return make_var(Node::Kind::var_x1);
    if (name == "x2" || name == "y") return make_var(Node::Kind::var_x2);
    if (name == "eps") return make_var(Node::Kind::var_eps);
    if (name == "pi") return make_const(M_PI);
    skip_ws();
    if (peek() == '(') {
      get();
      NodePtr arg = expr();
      expect(')');
      if (name == "exp") return make_unary([](double v) { return std::exp(v); }, arg);
      if (name == "atan") return make_unary([](double v) { return std::atan(v); }, arg);
      if (name == "sqrt") return make_unary([](double v) { return std::sqrt(v); }, arg);
      if (name == "sin") return make_unary([](double v) { return std::sin(v); }, arg);
      if (name == "cos") return make_unary([](double v) { return std::cos(v); }, arg);
      if (name == "log") return make_unary([](double v) { return std::log(v); }, arg);
      if (name == "abs") return make_unary([](double v) { return std::abs(v); }, arg);
      throw std::invalid_argument("expression: unknown function '" + name + "'");
    }
    throw std::invalid_argument("expression: unknown identifier '" + name + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return s_[pos_++]; }
  void expect(char c) {
    skip_ws();
    if (peek() != c)
      throw std::invalid_argument("expression: expected '" + std::string(1, c) + "'");
    get();
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::eval(double x1, double x2, double eps) const {
  return root_->eval(x1, x2, eps);
}

ScalarField Expression::bind(double eps) const {
  auto root = root_;
  return [root, eps](Vec2 p) { return root->eval(p.x, p.y, eps); };
}

}  // namespace dwdg
