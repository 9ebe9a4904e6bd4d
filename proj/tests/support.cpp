#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace sugra::testing {

Point random_point(std::size_t n, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

std::vector<Point> random_points(std::size_t count, std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_point(n, rng, lo, hi));
  return out;
}

namespace {

double coefficient(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return std::round(u(rng) * 8.0) / 4.0 + 0.125;
}

std::size_t pick(std::span<const std::size_t> coords, Rng& rng) {
  return coords[std::uniform_int_distribution<std::size_t>(0, coords.size() - 1)(rng)];
}

}  // namespace

Expr random_expr(std::span<const std::size_t> coords, Rng& rng, int depth) {
  if (coords.empty()) return Expr::constant(coefficient(rng));
  if (depth <= 0) {
    return Expr::add({Expr::constant(coefficient(rng)), Expr::mul({Expr::constant(coefficient(rng)), Expr::coord(pick(coords, rng))})});
  }
  switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
    case 0: return Expr::add({random_expr(coords, rng, depth - 1), random_expr(coords, rng, depth - 1)});
    case 1: return Expr::mul({random_expr(coords, rng, depth - 1), random_expr(coords, rng, depth - 1)});
    case 2: return Expr::sin(random_expr(coords, rng, depth - 1));
    case 3: return Expr::cos(random_expr(coords, rng, depth - 1));
    case 4: return Expr::exp(Expr::mul({Expr::constant(0.5), Expr::sin(random_expr(coords, rng, depth - 1))}));
    case 5: return Expr::div(random_expr(coords, rng, depth - 1), Expr::add({Expr::constant(2.0), Expr::cos(random_expr(coords, rng, depth - 1))}));
    default: return Expr::pow(random_expr(coords, rng, depth - 1), 2);
  }
}

Expr random_polynomial(std::span<const std::size_t> coords, Rng& rng, int degree) {
  std::vector<Expr> terms{Expr::constant(coefficient(rng))};
  const int n = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int t = 0; t < n; ++t) {
    std::vector<Expr> f{Expr::constant(coefficient(rng))};
    const int d = std::uniform_int_distribution<int>(1, std::max(1, degree))(rng);
    for (int k = 0; k < d; ++k) f.push_back(Expr::coord(pick(coords, rng)));
    terms.push_back(Expr::mul(std::move(f)));
  }
  return Expr::add(std::move(terms));
}

KForm random_form(const Chart& chart, int degree, std::span<const std::size_t> coords, Rng& rng, int terms,
                  int coeff_depth) {
  KForm out(chart, degree);
  if (degree > static_cast<int>(coords.size())) return out;
  for (int t = 0; t < terms; ++t) {
    std::vector<std::size_t> pool(coords.begin(), coords.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(degree);
    out = out + KForm::monomial(chart, random_expr(coords, rng, coeff_depth), pool);
  }
  return out;
}

Metric random_metric(const Chart& chart, std::vector<std::size_t> block, Signature sig, Rng& rng) {
  const std::size_t n = block.size();
  ExprMatrix g(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<int>(i) < sig.p ? 1.0 : -1.0;
    g(i, i) = Expr::mul({Expr::constant(s), Expr::add({Expr::constant(1.0),
                                                       Expr::mul({Expr::constant(0.15), Expr::sin(random_expr(block, rng, 1))})})});
    for (std::size_t j = 0; j < i; ++j) {
      if (u(rng) < 0.0) continue;
      Expr e = Expr::mul({Expr::constant(0.3 / static_cast<double>(n)), Expr::cos(random_expr(block, rng, 1))});
      g(i, j) = e;
      g(j, i) = e;
    }
  }
  return Metric(chart, std::move(block), std::move(g), sig);
}

Chart numbered_chart(std::size_t n, const std::string& prefix) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return Chart(names);
}

double max_abs(const KForm& a, std::span<const double> p) {
  double m = 0.0;
  for (const auto& [mask, v] : evaluate_form(a, p)) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const KForm& a, const KForm& b, std::span<const double> p) { return max_abs(a - b, p); }

double fd_diff(const std::function<double(const Point&)>& f, const Point& p, std::size_t i, double h) {
  Point a = p, b = p;
  a[i] += h;
  b[i] -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

Eigen::MatrixXd FdCurvature::dmetric(const Point& p, std::size_t local) const {
  const std::size_t i = m_.block()[local];
  auto central = [&](double h) {
    Point a = p, b = p;
    a[i] += h;
    b[i] -= h;
    return Eigen::MatrixXd((m_.evaluate(a) - m_.evaluate(b)) / (2.0 * h));
  };
  return (4.0 * central(h_ / 2.0) - central(h_)) / 3.0;
}

std::vector<double> FdCurvature::christoffel(const Point& p) const {
  const std::size_t n = m_.dim();
  Eigen::MatrixXd ginv = m_.evaluate(p).inverse();
  std::vector<Eigen::MatrixXd> dg;
  for (std::size_t l = 0; l < n; ++l) dg.push_back(dmetric(p, l));
  std::vector<double> G(n * n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        G[(k * n + i) * n + j] = 0.5 * s;
      }
    }
  }
  return G;
}

std::vector<double> FdCurvature::dchristoffel(const Point& p, std::size_t local) const {
  const std::size_t i = m_.block()[local];
  auto central = [&](double h) {
    Point a = p, b = p;
    a[i] += h;
    b[i] -= h;
    auto ga = christoffel(a), gb = christoffel(b);
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] = (ga[k] - gb[k]) / (2.0 * h);
    return ga;
  };
  auto d1 = central(h_), d2 = central(h_ / 2.0);
  for (std::size_t k = 0; k < d1.size(); ++k) d1[k] = (4.0 * d2[k] - d1[k]) / 3.0;
  return d1;
}

Eigen::MatrixXd FdCurvature::ricci(const Point& p) const {
  const std::size_t n = m_.dim();
  auto G = christoffel(p);
  auto at = [&](const std::vector<double>& v, std::size_t k, std::size_t i, std::size_t j) { return v[(k * n + i) * n + j]; };
  std::vector<std::vector<double>> dG;
  for (std::size_t l = 0; l < n; ++l) dG.push_back(dchristoffel(p, l));
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        s += at(dG[k], k, i, j) - at(dG[j], k, i, k);
        for (std::size_t l = 0; l < n; ++l) s += at(G, k, k, l) * at(G, l, i, j) - at(G, k, j, l) * at(G, l, i, k);
      }
      R(i, j) = s;
    }
  }
  return R;
}

}  // namespace sugra::testing
