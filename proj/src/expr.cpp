#include "sugra/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "sugra/tape.hpp"

namespace sugra {

struct Expr::Node {
  ExprKind kind = ExprKind::Const;
  double value = 0.0;
  int iarg = 0;
  std::uint32_t deps = 0;
  std::size_t hash = 0;
  std::vector<Expr> args;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_double(double d) {
  if (d == 0.0) d = 0.0;  // fold -0.0
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return std::hash<std::uint64_t>{}(bits);
}

}  // namespace

// ---- Chart ----------------------------------------------------------------

Chart::Chart() : names_(std::make_shared<const std::vector<std::string>>()) {}

Chart::Chart(std::vector<std::string> names) {
  if (names.empty() || names.size() > kMaxDim) {
    throw StructureError("chart dimension must be between 1 and " + std::to_string(kMaxDim));
  }
  static const char* reserved[] = {"sin", "cos", "exp", "sqrt"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& n = names[i];
    bool ok = !n.empty() && (std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_');
    for (char c : n) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    if (!ok) throw StructureError("invalid coordinate name '" + n + "'");
    for (const char* r : reserved) {
      if (n == r) throw StructureError("coordinate name '" + n + "' is reserved");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (names[j] == n) throw StructureError("duplicate coordinate name '" + n + "'");
    }
  }
  names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_->size(); ++i) {
    if ((*names_)[i] == name) return i;
  }
  return std::nullopt;
}

bool Chart::operator==(const Chart& other) const {
  return names_ == other.names_ || *names_ == *other.names_;
}

// ---- construction ---------------------------------------------------------

Expr Expr::make(Node node) {
  std::size_t h = std::hash<int>{}(static_cast<int>(node.kind));
  h = mix(h, hash_double(node.value));
  h = mix(h, std::hash<int>{}(node.iarg));
  std::uint32_t deps = node.kind == ExprKind::Coord ? (1u << node.iarg) : 0u;
  for (const auto& a : node.args) {
    h = mix(h, a.hash());
    deps |= a.deps();
  }
  node.hash = h;
  node.deps = deps;
  return Expr(std::make_shared<const Node>(std::move(node)));
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double c) {
  static const std::shared_ptr<const Node> zero = [] {
    Node n;
    n.hash = mix(std::hash<int>{}(0), hash_double(0.0));
    n.hash = mix(n.hash, std::hash<int>{}(0));
    return std::make_shared<const Node>(n);
  }();
  if (c == 0.0) return Expr(zero);
  Node n;
  n.kind = ExprKind::Const;
  n.value = c;
  return make(std::move(n));
}

Expr Expr::coord(std::size_t index) {
  if (index >= 32) throw StructureError("coordinate index out of range");
  Node n;
  n.kind = ExprKind::Coord;
  n.iarg = static_cast<int>(index);
  return make(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  double c = 0.0;
  bool have_const = false;
  for (auto& t : terms) {
    if (t.kind() == ExprKind::Add) {
      for (const auto& s : t.args()) {
        if (s.is_const()) {
          c += s.value();
          have_const = true;
        } else {
          flat.push_back(s);
        }
      }
    } else if (t.is_const()) {
      c += t.value();
      have_const = true;
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (have_const && c != 0.0) flat.insert(flat.begin(), constant(c));
  if (flat.empty()) return constant(0.0);
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = ExprKind::Add;
  n.args = std::move(flat);
  return make(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  double c = 1.0;
  for (auto& f : factors) {
    if (f.kind() == ExprKind::Mul) {
      for (const auto& s : f.args()) {
        if (s.is_const()) {
          c *= s.value();
        } else {
          flat.push_back(s);
        }
      }
    } else if (f.is_const()) {
      c *= f.value();
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (c == 0.0) return constant(0.0);
  if (c != 1.0) flat.insert(flat.begin(), constant(c));
  if (flat.empty()) return constant(1.0);
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = ExprKind::Mul;
  n.args = std::move(flat);
  return make(std::move(n));
}

Expr Expr::neg(Expr a) {
  if (a.is_const()) return constant(-a.value());
  if (a.kind() == ExprKind::Neg) return a.args()[0];
  Node n;
  n.kind = ExprKind::Neg;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::div(Expr num, Expr den) {
  if (num.is_zero()) return num;
  if (den.is_one()) return num;
  if (num.is_const() && den.is_const() && den.value() != 0.0) {
    return constant(num.value() / den.value());
  }
  Node n;
  n.kind = ExprKind::Div;
  n.args = {std::move(num), std::move(den)};
  return make(std::move(n));
}

Expr Expr::pow(Expr base, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.is_one()) return base;
  if (base.is_zero() && exponent > 0) return base;
  if (base.is_const() && !(base.value() == 0.0 && exponent < 0)) {
    return constant(std::pow(base.value(), exponent));
  }
  Node n;
  n.kind = ExprKind::IntPow;
  n.iarg = exponent;
  n.args = {std::move(base)};
  return make(std::move(n));
}

Expr Expr::sqrt(Expr a) {
  if (a.is_const() && a.value() >= 0.0) return constant(std::sqrt(a.value()));
  Node n;
  n.kind = ExprKind::Sqrt;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::exp(Expr a) {
  if (a.is_const()) return constant(std::exp(a.value()));
  Node n;
  n.kind = ExprKind::Exp;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::sin(Expr a) {
  if (a.is_const()) return constant(std::sin(a.value()));
  Node n;
  n.kind = ExprKind::Sin;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::cos(Expr a) {
  if (a.is_const()) return constant(std::cos(a.value()));
  Node n;
  n.kind = ExprKind::Cos;
  n.args = {std::move(a)};
  return make(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
std::size_t Expr::coord_index() const { return static_cast<std::size_t>(node_->iarg); }
int Expr::exponent() const { return node_->iarg; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::uint32_t Expr::deps() const { return node_->deps; }
std::size_t Expr::hash() const { return node_->hash; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }
Expr operator*(double c, const Expr& a) { return Expr::mul({Expr::constant(c), a}); }
Expr operator+(double c, const Expr& a) { return Expr::add({Expr::constant(c), a}); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Const: return a.value() == b.value();
    case ExprKind::Coord: return a.coord_index() == b.coord_index();
    case ExprKind::IntPow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default: break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!structurally_equal(a.args()[i], b.args()[i])) return false;
  }
  return true;
}

// ---- differentiation ------------------------------------------------------

namespace {

class Differentiator {
 public:
  explicit Differentiator(std::size_t var) : var_(var) {}

  Expr operator()(const Expr& e) {
    if (!e.depends_on(var_)) return Expr::constant(0.0);
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.id(), d);
    keep_.push_back(e);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    auto a = e.args();
    switch (e.kind()) {
      case ExprKind::Const: return Expr::constant(0.0);
      case ExprKind::Coord: return Expr::constant(e.coord_index() == var_ ? 1.0 : 0.0);
      case ExprKind::Add: {
        std::vector<Expr> terms;
        for (const auto& t : a) terms.push_back((*this)(t));
        return Expr::add(std::move(terms));
      }
      case ExprKind::Mul: {
        std::vector<Expr> terms;
        for (std::size_t k = 0; k < a.size(); ++k) {
          Expr dk = (*this)(a[k]);
          if (dk.is_zero()) continue;
          std::vector<Expr> f(a.begin(), a.end());
          f[k] = dk;
          terms.push_back(Expr::mul(std::move(f)));
        }
        return Expr::add(std::move(terms));
      }
      case ExprKind::Neg: return Expr::neg((*this)(a[0]));
      case ExprKind::Div: {
        Expr dn = (*this)(a[0]);
        Expr dd = (*this)(a[1]);
        Expr first = Expr::div(dn, a[1]);
        if (dd.is_zero()) return first;
        Expr second = Expr::div(Expr::mul({a[0], dd}), Expr::pow(a[1], 2));
        return Expr::add({first, Expr::neg(second)});
      }
      case ExprKind::IntPow: {
        int k = e.exponent();
        return Expr::mul({Expr::constant(k), Expr::pow(a[0], k - 1), (*this)(a[0])});
      }
      case ExprKind::Sqrt:
        return Expr::div((*this)(a[0]), Expr::mul({Expr::constant(2.0), e}));
      case ExprKind::Exp: return Expr::mul({e, (*this)(a[0])});
      case ExprKind::Sin: return Expr::mul({Expr::cos(a[0]), (*this)(a[0])});
      case ExprKind::Cos: return Expr::neg(Expr::mul({Expr::sin(a[0]), (*this)(a[0])}));
    }
    return Expr::constant(0.0);
  }

  std::size_t var_;
  std::unordered_map<const void*, Expr> memo_;
  std::vector<Expr> keep_;  // pins memo keys for the lifetime of the pass
};

}  // namespace

Expr diff(const Expr& e, std::size_t i) { return Differentiator(i)(e); }

double eval(const Expr& e, std::span<const double> point) {
  Expr out[1] = {e};
  Tape tape(out);
  return tape.run(point)[0];
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const void*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr x = stack.back();
    stack.pop_back();
    if (!seen.insert(x.id()).second) continue;
    for (const auto& a : x.args()) stack.push_back(a);
  }
  return seen.size();
}

}  // namespace sugra
