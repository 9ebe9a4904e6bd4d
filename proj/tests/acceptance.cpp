// Acceptance checks. Usage: sugra_acceptance [N ...]; with no arguments all ten
// criteria run. Each prints one line "criterion N: PASS|FAIL  detail" and the
// exit code is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "sugra/background_file.hpp"
#include "sugra/report.hpp"
#include "support.hpp"

using namespace sugra;
using testing::max_abs_diff;
using testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a measured value against its bound; keeps the worst excess.
  void bound(const std::string& what, double value, double limit) {
    if (!(value < limit)) {
      if (pass) detail << what << " = " << value << " (limit " << limit << ") ";
      pass = false;
    }
  }
  void require(const std::string& what, bool ok) {
    if (!ok) {
      detail << what << ' ';
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

Expr sgn(int e) { return Expr::constant(e % 2 ? -1.0 : 1.0); }

const char* const kNullFluxIds[] = {"alpha-ppwave",     "beta-nu-ppwave", "gamma-delta-ppwave", "varpi-epsilon-ppwave",
                                    "general-combined", "alphabeta-trig", "alphabeta-poly"};

void criterion1(Outcome& o) {
  auto t0 = Clock::now();
  Rng rng(101);
  Chart c = testing::numbered_chart(11);
  auto L = range(0, 5), R = range(5, 11);
  ProductStructure ps{testing::random_metric(c, L, {1, 4}, rng), testing::random_metric(c, R, {0, 6}, rng)};
  Metric h = product_metric(ps);
  const int p = 5, q = 6, st = 4, s = 6;
  KForm volL = volume_form(ps.lorentz), volR = volume_form(ps.riemann);
  double worst = 0.0;
  auto pts = testing::random_points(2, 11, rng);
  for (const auto& x : pts) {
    worst = std::max(worst, max_abs_diff(hodge(volL, h), volR.scaled(sgn(st)), x));
    worst = std::max(worst, max_abs_diff(hodge(volR, h), volL.scaled(sgn(s + p * q)), x));
  }
  // 100 Lorentzian and 100 Riemannian factor forms, used in pairs.
  for (int t = 0; t < 100; ++t) {
    const int kt = t % 6, k = t % 7;
    KForm a = testing::random_form(c, kt, L, rng, 2), b = testing::random_form(c, k, R, rng, 2);
    KForm sa = hodge(a, ps.lorentz), sb = hodge(b, ps.riemann);
    KForm ha = hodge(a, h), hb = hodge(b, h), hab = hodge(wedge(a, b), h);
    for (const auto& x : pts) {
      worst = std::max(worst, max_abs_diff(ha, wedge(sa, volR), x));
      worst = std::max(worst, max_abs_diff(hb, wedge(sb, volL).scaled(sgn(p * q)), x));
      worst = std::max(worst, max_abs_diff(hab, wedge(sa, sb).scaled(sgn(k * (p - kt))), x));
    }
  }
  const double secs = seconds_since(t0);
  o.bound("max residual", worst, 1e-9);
  o.bound("seconds", secs, 10.0);
  o.detail << "max residual " << worst << ", " << secs << " s";
}

void criterion2(Outcome& o) {
  Rng rng(102);
  double worst = 0.0;
  struct Case {
    std::size_t n;
    Signature sig;
  };
  for (Case sc : {Case{5, {1, 4}}, Case{6, {0, 6}}, Case{11, {1, 10}}}) {
    Chart c = testing::numbered_chart(sc.n);
    auto all = range(0, sc.n);
    Metric m = testing::random_metric(c, all, sc.sig, rng);
    KForm vol = volume_form(m);
    for (int t = 0; t < 100; ++t) {
      const int k = t % (static_cast<int>(sc.n) + 1);
      KForm a = testing::random_form(c, k, all, rng, 2), b = testing::random_form(c, k, all, rng, 2);
      KForm lhs = wedge(a, hodge(b, m));
      KForm ssa = hodge(hodge(a, m), m);
      Expr sign = sgn(k * (static_cast<int>(sc.n) - k) + sc.sig.q);
      Point x = testing::random_point(sc.n, rng);
      o.require("signature", m.signature_holds_at(x));
      worst = std::max(worst, max_abs_diff(lhs, vol.scaled(Expr::constant(form_inner(a, b, m, x))), x));
      worst = std::max(worst, max_abs_diff(ssa, a.scaled(sign), x));
    }
  }
  o.bound("max residual", worst, 1e-9);
  o.detail << "max residual " << worst;
}

void criterion3(Outcome& o) {
  Rng rng(103);
  const Chart chart({"u", "x1", "x2", "x3", "v"});
  const std::vector<std::size_t> ux{0, 1, 2, 3};
  double exact = 0.0, fd = 0.0;
  for (int t = 0; t < 20; ++t) {
    Expr H = testing::random_polynomial(ux, rng, 4);
    WalkerData w = flat_walker(chart, H);
    Metric g = walker_metric(w);
    ExprMatrix ric = ricci(g);
    Expr expect = Expr::constant(-0.5) * laplace_beltrami(walker_transverse_metric(w), H);
    testing::FdCurvature oracle(g);
    for (int k = 0; k < 5; ++k) {
      Point x = testing::random_point(5, rng);
      Eigen::MatrixXd num = oracle.ricci(x);
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
          const double want = (i == 0 && j == 0) ? eval(expect, x) : 0.0;
          const double got = eval(ric(i, j), x);
          exact = std::max(exact, std::abs(got - want));
          fd = std::max(fd, std::abs(got - num(i, j)));
        }
      }
    }
  }
  o.bound("symbolic vs -1/2 Lap H", exact, 1e-8);
  o.bound("symbolic vs finite differences", fd, 1e-5);
  o.detail << "max |Ric - expected| " << exact << ", max |Ric - FD| " << fd;
}

void criterion4(Outcome& o) {
  auto t0 = Clock::now();
  for (const auto& e : catalog()) {
    auto r = verify(build_background(e.id), {100, 42});
    for (const auto& row : r.rows) {
      if (!row.pass) {
        o.pass = false;
        o.detail << e.id << ' ' << row.equation << '/' << row.block << " max " << row.max << "; ";
      }
    }
  }
  const double secs = seconds_since(t0);
  o.bound("seconds", secs, 60.0);
  o.detail << secs << " s";
}

void criterion5(Outcome& o) {
  // Only rows that hold before the perturbation count, so a row that is
  // already broken cannot make the check pass on its own.
  for (const auto& e : catalog()) {
    auto base = verify(build_background(e.id), {100, 42});
    BuildOptions opts;
    opts.perturb = std::make_pair(e.perturb_key, 1.1);
    auto r = verify(build_background(e.id, opts), {100, 42});
    double worst = 0.0;
    std::string where;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (!base.rows[i].pass || r.rows[i].max <= worst) continue;
      worst = r.rows[i].max;
      where = r.rows[i].equation + "/" + r.rows[i].block;
    }
    o.require(e.id + " residual " + std::to_string(worst), worst > 1e-3);
    o.detail << e.id << ' ' << where << ' ' << worst << "; ";
  }
}

void criterion6(Outcome& o) {
  auto bg = build_background("kahler-theta", {{{"K", "1"}}, {}});
  ResidualEngine eng(bg);
  const Metric& gR = bg.factors.riemann;
  KForm omega(bg.chart, 2);
  for (std::size_t s = 0; s < 3; ++s) omega = omega + KForm::monomial(bg.chart, -gR.entry(2 * s, 2 * s), {5 + 2 * s, 6 + 2 * s});
  double lam = 0.0, mu = 0.0, norm = 0.0, contr = 0.0, scal = 0.0;
  for (const auto& x : eng.sample({100, 42})) {
    Eigen::MatrixXd ric = eng.curvature().ricci(x);
    Eigen::MatrixXd h = eng.metric().evaluate(x);
    lam = std::max(lam, (ric.topLeftCorner(5, 5) - 1.0 * h.topLeftCorner(5, 5)).cwiseAbs().maxCoeff());
    mu = std::max(mu, (ric.bottomRightCorner(6, 6) + 1.0 * h.bottomRightCorner(6, 6)).cwiseAbs().maxCoeff());
    mu = std::max(mu, ric.topRightCorner(5, 6).cwiseAbs().maxCoeff());
    norm = std::max(norm, std::abs(form_inner(omega, omega, gR, x) - 3.0));
    Eigen::MatrixXd T = eng.contraction(x).bottomRightCorner(6, 6);
    contr = std::max(contr, (T - (2.0 / 3.0) * form_inner(bg.flux.theta, bg.flux.theta, gR, x) * gR.evaluate(x))
                                .cwiseAbs()
                                .maxCoeff());
    scal = std::max(scal, std::abs(eng.scalar_curvature(x) - 1.0));
  }
  o.bound("Lorentzian Einstein constant 1", lam, 1e-8);
  o.bound("Riemannian Einstein constant -1", mu, 1e-8);
  o.bound("|omega|^2 = 3", norm, 1e-8);
  o.bound("contraction identity", contr, 1e-8);
  o.bound("Scal = 1", scal, 1e-8);
  o.detail << "errors: lambda " << lam << ", mu " << mu << ", |omega|^2 " << norm << ", contraction " << contr
           << ", Scal " << scal;
}

void criterion7(Outcome& o) {
  struct Expect {
    const char* id;
    ReducedCase which;
    std::optional<double> kappa;
  };
  const Expect expect[] = {{"alpha-ppwave", ReducedCase::Case1, {}},
                           {"beta-nu-ppwave", ReducedCase::Case2, {}},
                           {"gamma-delta-ppwave", ReducedCase::Case3, {}},
                           {"varpi-epsilon-ppwave", ReducedCase::Case4, {}},
                           {"alphabeta-trig", ReducedCase::Case6, 1.0},
                           {"alphabeta-poly", ReducedCase::Case6, 0.0},
                           {"kahler-theta", ReducedCase::Case5, {}}};
  for (const auto& e : expect) {
    auto bg = build_background(e.id);
    auto d = diagnose_reduced_case(bg.flux, bg.factors, ResidualEngine(bg).sample({100, 42}));
    o.require(std::string(e.id) + " is " + to_string(d.which), d.which == e.which);
    if (e.kappa) {
      const double got = d.kappa ? *d.kappa : NAN;
      o.require(std::string(e.id) + " kappa " + std::to_string(got), std::abs(got - *e.kappa) < 1e-6);
    }
    for (const auto& r : d.residuals) {
      if (!(r.max < 1e-8)) {
        o.pass = false;
        o.detail << e.id << " '" << r.name << "' = " << r.max << "; ";
      }
    }
  }
}

void criterion8(Outcome& o) {
  Rng rng(108);
  double norm = 0.0, scal = 0.0, iso = 0.0;
  for (const char* id : kNullFluxIds) {
    auto bg = build_background(id);
    ResidualEngine eng(bg);
    auto pts = eng.sample({100, 42});
    for (const auto& x : pts) {
      norm = std::max(norm, std::abs(eng.flux_norm_sq(x)));
      scal = std::max(scal, std::abs(eng.scalar_curvature(x)));
    }
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
      const Point& x = pts[static_cast<std::size_t>(t) % pts.size()];
      Eigen::MatrixXd h = eng.metric().evaluate(x);
      Eigen::MatrixXd ric_endo = h.inverse() * eng.curvature().ricci(x);
      Eigen::VectorXd X(11), Y(11);
      for (int i = 0; i < 11; ++i) {
        X(i) = u(rng);
        Y(i) = u(rng);
      }
      Eigen::VectorXd rX = ric_endo * X, rY = ric_endo * Y;
      iso = std::max(iso, std::abs(rX.dot(h * rY)));
    }
  }
  o.bound("|Phi|^2", norm, 1e-10);
  o.bound("Scal", scal, 1e-8);
  o.bound("h(ric X, ric Y)", iso, 1e-9);
  o.detail << "max |Phi|^2 " << norm << ", max |Scal| " << scal << ", max |h(ric X, ric Y)| " << iso;
}

void criterion9(Outcome& o) {
  Rng rng(109);
  const Chart chart({"u", "x1", "x2", "x3", "v"});
  const std::vector<std::size_t> ux{0, 1, 2, 3};
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Expr rhs = testing::random_polynomial(ux, rng, 4);
    Expr H = solve_walker_H(rhs, 0, {1, 2, 3}, 4);
    Metric rho = walker_transverse_metric(flat_walker(chart, H));
    Expr check = laplace_beltrami(rho, H) - rhs;
    for (int k = 0; k < 20; ++k) worst = std::max(worst, std::abs(eval(check, testing::random_point(5, rng, -1.0, 1.0))));
  }
  Expr f = parse_expr("2 + sin(u)", chart);
  Expr H = solve_walker_H(-(f * f), 0, {1, 2, 3}, 4);
  Expr profile = parse_expr("(2 + sin(u))^2/6 * (x1^2 + x2^2 + x3^2)", chart);
  double exact = 0.0;
  for (int k = 0; k < 20; ++k) {
    Point x = testing::random_point(5, rng, -1.0, 1.0);
    exact = std::max(exact, std::abs(eval(H, x) - eval(profile, x)));
  }
  o.bound("Lap H - rhs", worst, 1e-10);
  o.bound("profile difference", exact, 1e-14);
  o.detail << "max |Lap H - rhs| " << worst << ", profile difference " << exact;
}

void criterion10(Outcome& o) {
  double worst = 0.0;
  for (const auto& e : catalog()) {
    auto file = parse_background_file(std::string(SUGRA_BACKGROUND_DIR) + "/" + e.id + ".bg").background;
    auto built = build_background(e.id);
    auto a = verify(file, {100, 42}), b = verify(built, {100, 42});
    o.require(e.id + " row count", a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < std::min(a.rows.size(), b.rows.size()); ++i) {
      worst = std::max(worst, std::abs(a.rows[i].max - b.rows[i].max));
      worst = std::max(worst, std::abs(a.rows[i].mean - b.rows[i].mean));
    }
    Report r1{e.id, e.description, 42, 100, 1e-8, a, 0};
    Report r2{e.id, e.description, 42, 100, 1e-8, verify(file, {100, 42}, {1e-8, 2}), 0};
    o.require(e.id + " JSON differs between runs", format_json(r1) == format_json(r2));
  }
  o.bound("file vs builder", worst, 1e-12);
  o.detail << "max file/builder difference " << worst;
}

using Check = void (*)(Outcome&);
const Check kChecks[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9, criterion10};

bool run(int n) {
  Outcome o;
  try {
    kChecks[n - 1](o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "usage: sugra_acceptance [1-10 ...]\n");
      return 2;
    }
    which.push_back(n);
  }
  if (which.empty()) {
    for (int n = 1; n <= 10; ++n) which.push_back(n);
  }
  int failures = 0;
  for (int n : which) failures += run(n) ? 0 : 1;
  return failures;
}
