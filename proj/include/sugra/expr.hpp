#pragma once

// Symbolic scalar expressions over a coordinate chart.
//
// Expr is an immutable handle to a shared node; subexpressions are shared
// freely and never mutated after construction. Construction applies only
// light simplification: literal zero/one absorption, flattening of nested
// sums and products, and folding of constant operands.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sugra/errors.hpp"

namespace sugra {

using Point = std::vector<double>;

class Chart {
 public:
  static constexpr std::size_t kMaxDim = 11;

  Chart();
  explicit Chart(std::vector<std::string> names);

  std::size_t dim() const { return names_->size(); }
  const std::string& name(std::size_t i) const { return (*names_)[i]; }
  const std::vector<std::string>& names() const { return *names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const Chart& other) const;

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

enum class ExprKind : std::uint8_t { Const, Coord, Add, Mul, Neg, Div, IntPow, Sqrt, Exp, Sin, Cos };

class Expr {
 public:
  // The literal zero.
  Expr();

  static Expr constant(double c);
  static Expr coord(std::size_t index);
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr neg(Expr a);
  static Expr div(Expr num, Expr den);
  static Expr pow(Expr base, int exponent);
  static Expr sqrt(Expr a);
  static Expr exp(Expr a);
  static Expr sin(Expr a);
  static Expr cos(Expr a);

  ExprKind kind() const;
  double value() const;          // Const only
  std::size_t coord_index() const;  // Coord only
  int exponent() const;          // IntPow only
  std::span<const Expr> args() const;

  // Bit i set when the expression may depend on coordinate i.
  std::uint32_t deps() const;
  bool depends_on(std::size_t i) const { return (deps() >> i) & 1u; }
  std::size_t hash() const;

  bool is_const() const { return kind() == ExprKind::Const; }
  bool is_zero() const { return is_const() && value() == 0.0; }
  bool is_one() const { return is_const() && value() == 1.0; }

  // Node identity, stable for the lifetime of the node.
  const void* id() const { return node_.get(); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node node);

  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(double c, const Expr& a);
Expr operator+(double c, const Expr& a);

// Structural equality (same tree up to node sharing).
bool structurally_equal(const Expr& a, const Expr& b);

// Symbolic partial derivative with respect to chart coordinate i.
Expr diff(const Expr& e, std::size_t i);

// Numeric evaluation; throws DomainError on sqrt of a negative number or
// division by zero.
double eval(const Expr& e, std::span<const double> point);

class DomainError : public Error {
 public:
  DomainError(const std::string& what, Expr offending)
      : Error(what), offending_(std::move(offending)) {}
  const Expr& offending() const { return offending_; }

 private:
  Expr offending_;
};

// Parse an expression over the chart's coordinate names.
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? base ('^' signed-integer)?
//   base   := number | ident | '(' expr ')' | func '(' expr ')'
Expr parse_expr(std::string_view text, const Chart& chart);

// Text that parse_expr reads back to an equivalent expression.
std::string to_string(const Expr& e, const Chart& chart);

// Count of distinct nodes reachable from e.
std::size_t node_count(const Expr& e);

}  // namespace sugra
