#include "sugra/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

namespace sugra {

Tape::Tape(std::span<const Expr> outputs) {
  // Expression nodes map to ops by identity; structurally equal nodes with
  // distinct identities are merged through their structural hash.
  std::unordered_map<const void*, std::uint32_t> by_node;
  std::unordered_map<std::size_t, std::uint32_t> by_hash;  // first op with a hash
  std::vector<std::uint32_t> next_same_hash;
  std::vector<std::uint32_t> children;
  constexpr std::uint32_t kNone = ~std::uint32_t{0};

  auto same_op = [&](std::uint32_t idx, const Expr& e) {
    const Op& op = ops_[idx];
    if (op.kind != e.kind() || op.count != children.size()) return false;
    if (e.kind() == ExprKind::Const) {
      double v = e.value();
      if (std::memcmp(&v, &op.value, sizeof v) != 0) return false;
    }
    if (e.kind() == ExprKind::Coord && op.iarg != static_cast<int>(e.coord_index())) return false;
    if (e.kind() == ExprKind::IntPow && op.iarg != e.exponent()) return false;
    return std::equal(children.begin(), children.end(), args_.begin() + op.first);
  };

  struct Frame {
    const Expr* e;
    bool expanded;
  };
  std::vector<Frame> stack;
  for (const auto& out : outputs) {
    stack.push_back({&out, false});
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      const Expr& e = *f.e;
      if (by_node.count(e.id())) continue;
      if (!f.expanded) {
        stack.push_back({f.e, true});
        for (const auto& a : e.args()) {
          if (!by_node.count(a.id())) stack.push_back({&a, false});
        }
        continue;
      }
      children.clear();
      for (const auto& a : e.args()) children.push_back(by_node.at(a.id()));
      auto head = by_hash.find(e.hash());
      std::uint32_t found = kNone;
      for (std::uint32_t i = head == by_hash.end() ? kNone : head->second; i != kNone; i = next_same_hash[i]) {
        if (same_op(i, e)) {
          found = i;
          break;
        }
      }
      if (found != kNone) {
        by_node.emplace(e.id(), found);
        continue;
      }
      int iarg = 0;
      if (e.kind() == ExprKind::Coord) iarg = static_cast<int>(e.coord_index());
      if (e.kind() == ExprKind::IntPow) iarg = e.exponent();
      Op op{e.kind(), iarg, e.kind() == ExprKind::Const ? e.value() : 0.0, static_cast<std::uint32_t>(args_.size()),
            static_cast<std::uint32_t>(children.size())};
      args_.insert(args_.end(), children.begin(), children.end());
      auto idx = static_cast<std::uint32_t>(ops_.size());
      ops_.push_back(op);
      source_.push_back(e);
      by_node.emplace(e.id(), idx);
      if (head == by_hash.end()) {
        by_hash.emplace(e.hash(), idx);
        next_same_hash.push_back(kNone);
      } else {
        next_same_hash.push_back(head->second);
        head->second = idx;
      }
    }
    outputs_.push_back(by_node.at(out.id()));
  }
}

void Tape::run(std::span<const double> point, std::span<double> out,
               std::vector<double>& scratch) const {
  scratch.resize(ops_.size());
  double* r = scratch.data();
  const std::uint32_t* args = args_.data();
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    const std::uint32_t* a = args + op.first;
    double v = 0.0;
    switch (op.kind) {
      case ExprKind::Const: v = op.value; break;
      case ExprKind::Coord:
        if (static_cast<std::size_t>(op.iarg) >= point.size()) {
          throw DomainError("point has too few coordinates", source_[i]);
        }
        v = point[op.iarg];
        break;
      case ExprKind::Add:
        for (std::uint32_t k = 0; k < op.count; ++k) v += r[a[k]];
        break;
      case ExprKind::Mul:
        v = 1.0;
        for (std::uint32_t k = 0; k < op.count; ++k) v *= r[a[k]];
        break;
      case ExprKind::Neg: v = -r[a[0]]; break;
      case ExprKind::Div:
        if (r[a[1]] == 0.0) throw DomainError("division by zero", source_[i]);
        v = r[a[0]] / r[a[1]];
        break;
      case ExprKind::IntPow: {
        double b = r[a[0]];
        if (b == 0.0 && op.iarg < 0) throw DomainError("division by zero", source_[i]);
        int n = op.iarg < 0 ? -op.iarg : op.iarg;
        double p = 1.0;
        while (n) {
          if (n & 1) p *= b;
          b *= b;
          n >>= 1;
        }
        v = op.iarg < 0 ? 1.0 / p : p;
        break;
      }
      case ExprKind::Sqrt:
        if (r[a[0]] < 0.0) throw DomainError("square root of a negative number", source_[i]);
        v = std::sqrt(r[a[0]]);
        break;
      case ExprKind::Exp: v = std::exp(r[a[0]]); break;
      case ExprKind::Sin: v = std::sin(r[a[0]]); break;
      case ExprKind::Cos: v = std::cos(r[a[0]]); break;
    }
    r[i] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = r[outputs_[k]];
}

std::vector<double> Tape::run(std::span<const double> point) const {
  std::vector<double> out(outputs_.size());
  std::vector<double> scratch;
  run(point, out, scratch);
  return out;
}

}  // namespace sugra
