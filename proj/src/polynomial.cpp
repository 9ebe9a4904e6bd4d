#include <array>
#include <map>

#include "sugra/catalog.hpp"

namespace sugra {

namespace {

using Monomial = std::array<int, 3>;
using Poly = std::map<Monomial, Expr>;

void accumulate(Poly& p, const Monomial& m, const Expr& c) {
  if (c.is_zero()) return;
  auto it = p.find(m);
  if (it == p.end()) {
    p.emplace(m, c);
  } else {
    it->second = Expr::add({it->second, c});
  }
}

Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) accumulate(out, m, c);
  return out;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      accumulate(out, {ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, Expr::mul({ca, cb}));
    }
  }
  return out;
}

Poly scale(const Poly& a, const Expr& f) {
  Poly out;
  for (const auto& [m, c] : a) accumulate(out, m, Expr::mul({f, c}));
  return out;
}

class Extractor {
 public:
  Extractor(std::size_t u, std::array<std::size_t, 3> x, std::size_t v) : u_(u), x_(x), v_(v) {
    for (auto i : x) xmask_ |= 1u << i;
  }

  Poly operator()(const Expr& e) const {
    if (e.depends_on(v_)) throw InputError("right-hand side depends on v");
    if (e.deps() & ~(xmask_ | (1u << u_))) {
      throw InputError("right-hand side depends on coordinates other than u and x");
    }
    if (!(e.deps() & xmask_)) return Poly{{Monomial{0, 0, 0}, e}};
    auto a = e.args();
    switch (e.kind()) {
      case ExprKind::Coord: {
        Monomial m{0, 0, 0};
        for (int i = 0; i < 3; ++i) {
          if (e.coord_index() == x_[i]) m[i] = 1;
        }
        return Poly{{m, Expr::constant(1.0)}};
      }
      case ExprKind::Add: {
        Poly out;
        for (const auto& t : a) out = add(out, (*this)(t));
        return out;
      }
      case ExprKind::Mul: {
        Poly out{{Monomial{0, 0, 0}, Expr::constant(1.0)}};
        for (const auto& t : a) out = mul(out, (*this)(t));
        return out;
      }
      case ExprKind::Neg: return scale((*this)(a[0]), Expr::constant(-1.0));
      case ExprKind::Div:
        if (a[1].deps() & xmask_) break;
        return scale((*this)(a[0]), Expr::div(Expr::constant(1.0), a[1]));
      case ExprKind::IntPow: {
        if (e.exponent() < 0) break;
        Poly base = (*this)(a[0]);
        Poly out{{Monomial{0, 0, 0}, Expr::constant(1.0)}};
        for (int k = 0; k < e.exponent(); ++k) out = mul(out, base);
        return out;
      }
      default: break;
    }
    throw InputError("right-hand side is not polynomial in the transverse coordinates");
  }

 private:
  std::size_t u_;
  std::array<std::size_t, 3> x_;
  std::size_t v_;
  std::uint32_t xmask_ = 0;
};

// Second antiderivative in x1 with zero integration constants.
Poly integrate_twice(const Poly& p) {
  Poly out;
  for (const auto& [m, c] : p) {
    const double a = m[0];
    accumulate(out, {m[0] + 2, m[1], m[2]}, Expr::mul({Expr::constant(1.0 / ((a + 1.0) * (a + 2.0))), c}));
  }
  return out;
}

// x2 and x3 second derivatives summed.
Poly transverse_laplacian(const Poly& p) {
  Poly out;
  for (const auto& [m, c] : p) {
    for (int i = 1; i <= 2; ++i) {
      if (m[i] < 2) continue;
      Monomial d = m;
      d[i] -= 2;
      accumulate(out, d, Expr::mul({Expr::constant(static_cast<double>(m[i]) * (m[i] - 1)), c}));
    }
  }
  return out;
}

Expr to_expr(const Poly& p, std::array<std::size_t, 3> x) {
  std::vector<Expr> terms;
  for (const auto& [m, c] : p) {
    std::vector<Expr> f{c};
    for (int i = 0; i < 3; ++i) f.push_back(Expr::pow(Expr::coord(x[i]), m[i]));
    terms.push_back(Expr::mul(std::move(f)));
  }
  return Expr::add(std::move(terms));
}

}  // namespace

Expr solve_walker_H(const Expr& rhs, std::size_t u, std::array<std::size_t, 3> x, std::size_t v) {
  Poly r = Extractor(u, x, v)(rhs);
  for (auto it = r.begin(); it != r.end();) {
    it = it->second.is_zero() ? r.erase(it) : std::next(it);
  }
  bool constant = true;
  for (const auto& [m, c] : r) constant = constant && m == Monomial{0, 0, 0};
  if (constant) {
    Expr c0 = r.empty() ? Expr() : r.begin()->second;
    std::vector<Expr> sq;
    for (auto i : x) sq.push_back(Expr::pow(Expr::coord(i), 2));
    return Expr::mul({Expr::constant(-1.0 / 6.0), c0, Expr::add(std::move(sq))});
  }
  // With s = -rhs, H = sum_k (-1)^k P^(k+1) D^k s solves (d11 + D) H = s,
  // where P integrates twice in x1 and D = d22 + d33.
  Poly dk = scale(r, Expr::constant(-1.0));
  Poly H;
  for (int k = 0; !dk.empty(); ++k) {
    Poly t = dk;
    for (int j = 0; j <= k; ++j) t = integrate_twice(t);
    H = add(H, (k & 1) ? scale(t, Expr::constant(-1.0)) : t);
    dk = transverse_laplacian(dk);
  }
  return to_expr(H, x);
}

}  // namespace sugra
