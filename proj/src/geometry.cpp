#include "sugra/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace sugra {

namespace {

// Metric derivatives along block coordinates: dg[l](a,b) = d_l g_ab.
std::vector<ExprMatrix> metric_gradient(const Metric& m) {
  const std::size_t n = m.dim();
  std::vector<ExprMatrix> dg(n, ExprMatrix(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        Expr d = diff(m.entry(a, b), m.block()[l]);
        dg[l](a, b) = d;
        dg[l](b, a) = d;
      }
    }
  }
  return dg;
}

Expr sum(std::vector<Expr> terms) { return Expr::add(std::move(terms)); }

// Christoffel symbols of the first kind, G_lij.
Expr first_kind(const std::vector<ExprMatrix>& dg, std::size_t l, std::size_t i, std::size_t j) {
  return Expr::mul({Expr::constant(0.5), sum({dg[i](l, j), dg[j](l, i), Expr::neg(dg[l](i, j))})});
}

}  // namespace

Christoffel christoffel(const Metric& m) {
  const std::size_t n = m.dim();
  auto dg = metric_gradient(m);
  const auto& ginv = m.inverse();
  Christoffel G(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::vector<Expr> lower(n);
      for (std::size_t l = 0; l < n; ++l) lower[l] = first_kind(dg, l, i, j);
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<Expr> t;
        for (std::size_t l = 0; l < n; ++l) t.push_back(Expr::mul({ginv(k, l), lower[l]}));
        Expr v = sum(std::move(t));
        G(k, i, j) = v;
        G(k, j, i) = v;
      }
    }
  }
  return G;
}

ExprMatrix ricci(const Metric& m) {
  const std::size_t n = m.dim();
  const auto& ginv = m.inverse();
  auto dg = metric_gradient(m);
  Christoffel G = christoffel(m);

  // d_c g^ab = -g^ap d_c g_pq g^qb
  std::vector<ExprMatrix> dginv(n, ExprMatrix(n));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        std::vector<Expr> t;
        for (std::size_t p = 0; p < n; ++p) {
          if (ginv(a, p).is_zero()) continue;
          for (std::size_t q = 0; q < n; ++q) {
            t.push_back(Expr::mul({ginv(a, p), dg[c](p, q), ginv(q, b)}));
          }
        }
        Expr v = Expr::neg(sum(std::move(t)));
        dginv[c](a, b) = v;
        dginv[c](b, a) = v;
      }
    }
  }

  // Second derivatives d_c d_l g_ab, computed on demand.
  std::vector<std::vector<ExprMatrix>> ddg(n, std::vector<ExprMatrix>(n));
  std::vector<std::vector<bool>> have(n, std::vector<bool>(n, false));
  auto second = [&](std::size_t c, std::size_t l) -> const ExprMatrix& {
    std::size_t a0 = std::min(c, l), b0 = std::max(c, l);
    if (!have[a0][b0]) {
      ExprMatrix M(n);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
          Expr v = diff(dg[a0](a, b), m.block()[b0]);
          M(a, b) = v;
          M(b, a) = v;
        }
      }
      ddg[a0][b0] = std::move(M);
      have[a0][b0] = true;
    }
    return ddg[a0][b0];
  };
  // d_c G_lij
  auto d_first = [&](std::size_t c, std::size_t l, std::size_t i, std::size_t j) {
    return Expr::mul({Expr::constant(0.5),
                      sum({second(c, i)(l, j), second(c, j)(l, i), Expr::neg(second(c, l)(i, j))})});
  };
  // d_c G^k_ij
  auto d_gamma = [&](std::size_t c, std::size_t k, std::size_t i, std::size_t j) {
    std::vector<Expr> t;
    for (std::size_t l = 0; l < n; ++l) {
      if (!dginv[c](k, l).is_zero()) t.push_back(Expr::mul({dginv[c](k, l), first_kind(dg, l, i, j)}));
      if (!ginv(k, l).is_zero()) t.push_back(Expr::mul({ginv(k, l), d_first(c, l, i, j)}));
    }
    return sum(std::move(t));
  };

  ExprMatrix R(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::vector<Expr> t;
      for (std::size_t k = 0; k < n; ++k) {
        t.push_back(d_gamma(k, k, i, j));
        t.push_back(Expr::neg(d_gamma(j, k, i, k)));
        for (std::size_t l = 0; l < n; ++l) {
          t.push_back(Expr::mul({G(k, k, l), G(l, i, j)}));
          t.push_back(Expr::neg(Expr::mul({G(k, j, l), G(l, i, k)})));
        }
      }
      Expr v = sum(std::move(t));
      R(i, j) = v;
      R(j, i) = v;
    }
  }
  return R;
}

Expr laplace_beltrami(const Metric& m, const Expr& s) {
  const std::size_t n = m.dim();
  const auto& ginv = m.inverse();
  Christoffel G = christoffel(m);
  std::vector<Expr> ds(n);
  for (std::size_t k = 0; k < n; ++k) ds[k] = diff(s, m.block()[k]);
  std::vector<Expr> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (ginv(i, j).is_zero()) continue;
      std::vector<Expr> inner{diff(ds[i], m.block()[j])};
      for (std::size_t k = 0; k < n; ++k) inner.push_back(Expr::neg(Expr::mul({G(k, i, j), ds[k]})));
      t.push_back(Expr::mul({ginv(i, j), sum(std::move(inner))}));
    }
  }
  return sum(std::move(t));
}

// ---- CurvatureEvaluator -----------------------------------------------------

CurvatureEvaluator::CurvatureEvaluator(const Metric& m)
    : metric_(m), ricci_(sugra::ricci(m)), tape_(ricci_.flat()) {}

Eigen::MatrixXd CurvatureEvaluator::ricci(std::span<const double> point) const {
  const std::size_t n = metric_.dim();
  std::vector<double> vals(n * n), scratch;
  tape_.run(point, vals, scratch);
  Eigen::MatrixXd R(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) R(i, j) = vals[i * n + j];
  }
  return R;
}

double CurvatureEvaluator::ricci_trace(std::span<const double> point) const {
  Eigen::MatrixXd ginv = metric_.evaluate(point).inverse();
  return (ginv.cwiseProduct(ricci(point))).sum();
}

double CurvatureEvaluator::scalar_curvature(std::span<const double> point) const {
  return -ricci_trace(point);
}

double ricci_trace(const Metric& m, std::span<const double> point) {
  return CurvatureEvaluator(m).ricci_trace(point);
}

double scalar_curvature(const Metric& m, std::span<const double> point) {
  return CurvatureEvaluator(m).scalar_curvature(point);
}

// ---- Walker -------------------------------------------------------------------

WalkerData flat_walker(Chart chart, Expr H, std::size_t u, std::array<std::size_t, 3> x, std::size_t v) {
  WalkerData w;
  w.chart = std::move(chart);
  w.u = u;
  w.x = x;
  w.v = v;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) w.rho[i][j] = Expr::constant(i == j ? -1.0 : 0.0);
  }
  w.H = std::move(H);
  return w;
}

namespace {

std::vector<std::size_t> walker_block(const WalkerData& w) {
  std::vector<std::size_t> b{w.u, w.x[0], w.x[1], w.x[2], w.v};
  std::vector<std::size_t> sorted = b;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] >= w.chart.dim()) throw StructureError("Walker coordinate outside chart");
    if (i && sorted[i] == sorted[i - 1]) throw StructureError("Walker coordinates must be distinct");
  }
  return sorted;
}

}  // namespace

Metric walker_metric(const WalkerData& w, std::span<const Point> probes) {
  auto block = walker_block(w);
  auto local = [&](std::size_t c) {
    return static_cast<std::size_t>(std::find(block.begin(), block.end(), c) - block.begin());
  };
  ExprMatrix g(5);
  const std::size_t u = local(w.u), v = local(w.v);
  g(u, v) = g(v, u) = Expr::constant(1.0);
  g(u, u) = w.H;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t xi = local(w.x[i]);
    g(u, xi) = g(xi, u) = w.A[i];
    for (std::size_t j = 0; j < 3; ++j) {
      if (!structurally_equal(w.rho[i][j], w.rho[j][i])) throw StructureError("rho is not symmetric");
      g(xi, local(w.x[j])) = w.rho[i][j];
    }
  }
  if (!probes.empty()) {
    Metric rho = walker_transverse_metric(w);
    for (const auto& p : probes) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.evaluate(p), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().maxCoeff() >= 0.0) {
        throw GeometryError("transverse metric is not negative definite at a probe point");
      }
    }
  }
  return Metric(w.chart, block, std::move(g), Signature{1, 4});
}

Metric walker_transverse_metric(const WalkerData& w) {
  std::vector<std::size_t> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return w.x[a] < w.x[b]; });
  std::vector<std::size_t> block;
  ExprMatrix rho(3);
  for (std::size_t i = 0; i < 3; ++i) {
    block.push_back(w.x[order[i]]);
    for (std::size_t j = 0; j < 3; ++j) rho(i, j) = w.rho[order[i]][order[j]];
  }
  return Metric(w.chart, block, std::move(rho), Signature{0, 3});
}

void check_ricci_isotropic(const WalkerData& w, std::span<const Point> probes, double tol) {
  if (w.H.depends_on(w.v)) throw GeometryError("H depends on v");
  for (const auto& a : w.A) {
    if (!a.is_zero()) throw GeometryError("A is not zero");
  }
  CurvatureEvaluator rho(walker_transverse_metric(w));
  for (const auto& p : probes) {
    if (rho.ricci(p).cwiseAbs().maxCoeff() > tol) throw GeometryError("transverse metric is not Ricci-flat");
  }
}

// ---- products -----------------------------------------------------------------

Metric product_metric(const ProductStructure& ps) {
  const Metric& L = ps.lorentz;
  const Metric& R = ps.riemann;
  if (!(L.chart() == R.chart())) throw StructureError("product factors live on different charts");
  const Chart& chart = L.chart();
  if (L.block_mask() & R.block_mask()) throw StructureError("product factor blocks overlap");
  if (L.dim() + R.dim() != chart.dim()) throw StructureError("product factor blocks do not cover the chart");
  for (const auto& e : L.entries().flat()) {
    if (e.deps() & ~L.block_mask()) throw StructureError("Lorentzian factor depends on Riemannian coordinates");
  }
  for (const auto& e : R.entries().flat()) {
    if (e.deps() & ~R.block_mask()) throw StructureError("Riemannian factor depends on Lorentzian coordinates");
  }
  const std::size_t n = chart.dim();
  std::vector<std::size_t> block(n);
  for (std::size_t i = 0; i < n; ++i) block[i] = i;
  ExprMatrix h(n);
  for (const Metric* f : {&L, &R}) {
    for (std::size_t i = 0; i < f->dim(); ++i) {
      for (std::size_t j = 0; j < f->dim(); ++j) h(f->block()[i], f->block()[j]) = f->entry(i, j);
    }
  }
  std::vector<Expr> singular(L.singular_set().begin(), L.singular_set().end());
  singular.insert(singular.end(), R.singular_set().begin(), R.singular_set().end());
  Signature sig{L.signature().p + R.signature().p, L.signature().q + R.signature().q};
  return Metric(chart, block, std::move(h), sig, std::move(singular));
}

}  // namespace sugra
