#pragma once

// A batch of expressions flattened into a linear program for repeated
// evaluation. Structurally identical subexpressions are evaluated once.

#include <cstdint>
#include <span>
#include <vector>

#include "sugra/expr.hpp"

namespace sugra {

class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> outputs);

  std::size_t output_count() const { return outputs_.size(); }
  std::size_t op_count() const { return ops_.size(); }

  // scratch is resized as needed and may be reused across calls.
  void run(std::span<const double> point, std::span<double> out,
           std::vector<double>& scratch) const;
  std::vector<double> run(std::span<const double> point) const;

 private:
  struct Op {
    ExprKind kind;
    int iarg;          // coordinate index or exponent
    double value;
    std::uint32_t first;  // into args_
    std::uint32_t count;
  };
  std::vector<Op> ops_;
  std::vector<std::uint32_t> args_;
  std::vector<std::uint32_t> outputs_;
  std::vector<Expr> source_;  // per op, for error reporting
};

}  // namespace sugra
