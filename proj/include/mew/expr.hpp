#pragma once

// Scalar expressions in the planar coordinates x, y.
//
// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | power
//   power  := atom ("^" integer)?
//   atom   := number | "x" | "y" | "pi" | ident "(" expr ("," expr)? ")" | "(" expr ")"
//
// Functions: sin, cos, exp, ln, sqrt (one argument) and pow (two arguments).

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mew/jet.hpp"

namespace mew {

struct Point {
  double x = 0.0;
  double y = 0.0;
  std::array<double, 2> array() const { return {x, y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

enum class NodeKind { Number, Pi, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Function { Sin, Cos, Exp, Ln, Sqrt, Pow };

struct ExprNode {
  NodeKind kind;
  std::size_t offset = 0;  // byte offset of the node in its source text
  double number = 0.0;     // Number
  int exponent = 0;        // Pow
  Function function = Function::Sin;
  std::vector<std::shared_ptr<const ExprNode>> children;
};

/// Immutable, cheaply copyable expression tree.
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const ExprNode> root, std::string source = {});

  const ExprNode& root() const { return *root_; }
  const std::string& source() const { return source_; }

  /// Plain pointwise evaluation.
  double evaluate(Point p) const;

  /// Jet of the expression at `base`, truncated at `order`.
  Jet<double> eval_jet(Point base, int order) const;

  /// Structural equality (offsets are ignored).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
};

Expr parse(std::string_view source);

/// Render with the minimal parentheses needed for `parse` to rebuild the same tree.
std::string print(const Expr& e);

// Tree builders, used for composite expressions built in code.
Expr number(double v);
Expr var_x();
Expr var_y();
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

}  // namespace mew
