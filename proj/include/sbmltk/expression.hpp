#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/error.hpp"

namespace sbmltk {

enum class ExprKind { Number, Symbol, Add, Sub, Mul, Div, Pow, Neg };

/// Immutable arithmetic tree for kinetic laws. Shared by the MathML reader
/// and the shorthand infix parser, so both front ends produce the same shape.
///
/// Number leaves are never negative: `Expression::number(-2)` yields
/// Neg(Number(2)). This keeps the infix and MathML renderings reversible.
class Expression {
 public:
  Expression();  // Number(0)

  static Expression number(double value);
  static Expression symbol(std::string name);
  static Expression binary(ExprKind kind, Expression lhs, Expression rhs);
  static Expression negate(Expression operand);

  ExprKind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  const std::vector<Expression>& children() const { return node_->children; }
  const Expression& lhs() const { return node_->children.at(0); }
  const Expression& rhs() const { return node_->children.at(1); }

  bool is_binary() const;
  std::size_t depth() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node {
    ExprKind kind;
    double value = 0.0;
    std::string name;
    std::vector<Expression> children;
  };
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Expression operator+(Expression a, Expression b);
Expression operator-(Expression a, Expression b);
Expression operator*(Expression a, Expression b);
Expression operator/(Expression a, Expression b);
Expression pow(Expression base, Expression exponent);

using Environment = std::map<std::string, double, std::less<>>;

/// Throws UnboundSymbol for free symbols and NonFiniteResult whenever an
/// intermediate value leaves the finite range (division by zero included).
double eval_expression(const Expression& e, const Environment& env);

/// Infix text with minimal parentheses; `parse_infix(print_infix(e)) == e`.
/// Precedence: `^` (right-assoc) > unary minus > `*` `/` > `+` `-`.
std::string print_infix(const Expression& e);

class InfixParseError : public Error {
 public:
  InfixParseError(std::size_t column, std::string expected);

  std::size_t column() const { return column_; }  // 1-based
  const std::string& expected() const { return expected_; }

 private:
  std::size_t column_;
  std::string expected_;
};

/// Throws InfixParseError.
Expression parse_infix(std::string_view text);

void collect_symbols(const Expression& e, std::set<std::string>& out);

/// Rewrites every Symbol through `rename`; symbols absent from the map stay.
Expression rename_symbols(const Expression& e, const std::map<std::string, std::string>& rename);

}  // namespace sbmltk
