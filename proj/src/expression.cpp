#include "sbmltk/expression.hpp"

#include <cctype>
#include <cmath>

#include "sbmltk/text.hpp"

namespace sbmltk {

Expression::Expression() : Expression(number(0.0)) {}

Expression Expression::number(double value) {
  if (std::signbit(value)) return negate(number(-value));
  return Expression(std::make_shared<const Node>(Node{ExprKind::Number, value, {}, {}}));
}

Expression Expression::symbol(std::string name) {
  return Expression(
      std::make_shared<const Node>(Node{ExprKind::Symbol, 0.0, std::move(name), {}}));
}

Expression Expression::binary(ExprKind kind, Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const Node>(
      Node{kind, 0.0, {}, {std::move(lhs), std::move(rhs)}}));
}

Expression Expression::negate(Expression operand) {
  return Expression(
      std::make_shared<const Node>(Node{ExprKind::Neg, 0.0, {}, {std::move(operand)}}));
}

bool Expression::is_binary() const {
  switch (kind()) {
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Pow:
      return true;
    default:
      return false;
  }
}

std::size_t Expression::depth() const {
  std::size_t deepest = 0;
  for (const auto& child : children()) deepest = std::max(deepest, child.depth());
  return deepest + 1;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Number: return a.value() == b.value();
    case ExprKind::Symbol: return a.name() == b.name();
    default: return a.children() == b.children();
  }
}

Expression operator+(Expression a, Expression b) {
  return Expression::binary(ExprKind::Add, std::move(a), std::move(b));
}
Expression operator-(Expression a, Expression b) {
  return Expression::binary(ExprKind::Sub, std::move(a), std::move(b));
}
Expression operator*(Expression a, Expression b) {
  return Expression::binary(ExprKind::Mul, std::move(a), std::move(b));
}
Expression operator/(Expression a, Expression b) {
  return Expression::binary(ExprKind::Div, std::move(a), std::move(b));
}
Expression pow(Expression base, Expression exponent) {
  return Expression::binary(ExprKind::Pow, std::move(base), std::move(exponent));
}

namespace {

double checked(double v, const char* op) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteResult, std::string("non-finite result in ") + op);
  }
  return v;
}

}  // namespace

double eval_expression(const Expression& e, const Environment& env) {
  switch (e.kind()) {
    case ExprKind::Number:
      return e.value();
    case ExprKind::Symbol: {
      auto it = env.find(e.name());
      if (it == env.end()) throw Error(ErrorCode::UnboundSymbol, "unbound symbol " + e.name());
      return checked(it->second, "symbol binding");
    }
    case ExprKind::Neg:
      return -eval_expression(e.lhs(), env);
    case ExprKind::Add:
      return checked(eval_expression(e.lhs(), env) + eval_expression(e.rhs(), env), "addition");
    case ExprKind::Sub:
      return checked(eval_expression(e.lhs(), env) - eval_expression(e.rhs(), env),
                     "subtraction");
    case ExprKind::Mul:
      return checked(eval_expression(e.lhs(), env) * eval_expression(e.rhs(), env),
                     "multiplication");
    case ExprKind::Div:
      return checked(eval_expression(e.lhs(), env) / eval_expression(e.rhs(), env), "division");
    case ExprKind::Pow:
      return checked(std::pow(eval_expression(e.lhs(), env), eval_expression(e.rhs(), env)),
                     "power");
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Infix printing

namespace {

int precedence(const Expression& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
  }
}

char op_char(ExprKind kind) {
  switch (kind) {
    case ExprKind::Add: return '+';
    case ExprKind::Sub: return '-';
    case ExprKind::Mul: return '*';
    case ExprKind::Div: return '/';
    case ExprKind::Pow: return '^';
    default: return '?';
  }
}

void print_into(const Expression& e, std::string& out);

void print_wrapped(const Expression& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(e, out);
  if (parens) out += ')';
}

void print_into(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number:
      out += format_real(e.value());
      return;
    case ExprKind::Symbol:
      out += e.name();
      return;
    case ExprKind::Neg:
      out += '-';
      print_wrapped(e.lhs(), precedence(e.lhs()) < 3, out);
      return;
    case ExprKind::Pow:
      print_wrapped(e.lhs(), precedence(e.lhs()) <= 4, out);
      out += '^';
      print_wrapped(e.rhs(), precedence(e.rhs()) < 4, out);
      return;
    default: {
      int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      out += op_char(e.kind());
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Infix parsing (recursive descent over the grammar above)

class InfixParser {
 public:
  explicit InfixParser(std::string_view text) : text_(text) {}

  Expression parse() {
    auto e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("operator or end of expression");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    throw InfixParseError(pos_ + 1, expected);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression parse_sum() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = std::move(lhs) + parse_term();
      else if (accept('-')) lhs = std::move(lhs) - parse_term();
      else return lhs;
    }
  }

  Expression parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = std::move(lhs) * parse_unary();
      else if (accept('/')) lhs = std::move(lhs) / parse_unary();
      else return lhs;
    }
  }

  Expression parse_unary() {
    if (accept('-')) return Expression::negate(parse_unary());
    return parse_power();
  }

  Expression parse_power() {
    auto base = parse_primary();
    if (accept('^')) return pow(std::move(base), parse_power_rhs());
    return base;
  }

  Expression parse_power_rhs() {
    if (accept('-')) return Expression::negate(parse_power_rhs());
    return parse_power();
  }

  Expression parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("number, identifier or '('");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_sum();
      if (!accept(')')) fail("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      auto start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return Expression::symbol(std::string(text_.substr(start, pos_ - start)));
    }
    fail("number, identifier or '('");
  }

  Expression parse_number() {
    auto start = pos_;
    auto digits = [&] {
      auto from = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - from;
    };
    auto mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail("digits");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      auto save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    auto value = parse_real(text_.substr(start, pos_ - start));
    if (!value || !std::isfinite(*value)) {
      pos_ = start;
      fail("finite number");
    }
    return Expression::number(*value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string print_infix(const Expression& e) {
  std::string out;
  print_into(e, out);
  return out;
}

InfixParseError::InfixParseError(std::size_t column, std::string expected)
    : Error(ErrorCode::SyntaxError,
            "column " + std::to_string(column) + ": expected " + expected),
      column_(column),
      expected_(std::move(expected)) {}

Expression parse_infix(std::string_view text) { return InfixParser(text).parse(); }

void collect_symbols(const Expression& e, std::set<std::string>& out) {
  if (e.kind() == ExprKind::Symbol) {
    out.insert(e.name());
    return;
  }
  for (const auto& child : e.children()) collect_symbols(child, out);
}

Expression rename_symbols(const Expression& e, const std::map<std::string, std::string>& rename) {
  switch (e.kind()) {
    case ExprKind::Number:
      return e;
    case ExprKind::Symbol: {
      auto it = rename.find(e.name());
      return it == rename.end() ? e : Expression::symbol(it->second);
    }
    case ExprKind::Neg:
      return Expression::negate(rename_symbols(e.lhs(), rename));
    default:
      return Expression::binary(e.kind(), rename_symbols(e.lhs(), rename),
                                rename_symbols(e.rhs(), rename));
  }
}

}  // namespace sbmltk
