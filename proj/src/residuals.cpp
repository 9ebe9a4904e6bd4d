#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "sugra/sugra.hpp"

namespace sugra {

namespace {

struct RowSpec {
  const char* equation;
  const char* block;
};

constexpr std::array<RowSpec, 10> kRows{{{"closedness", "all"},
                                         {"maxwell", "all"},
                                         {"maxwell", "(2~,6)"},
                                         {"maxwell", "(3~,5)"},
                                         {"maxwell", "(4~,4)"},
                                         {"maxwell", "(5~,3)"},
                                         {"einstein", "HH"},
                                         {"einstein", "VV"},
                                         {"einstein", "VH"},
                                         {"trace", "all"}}};

std::string component_name(const Chart& chart, IndexMask m) {
  std::string s;
  for (auto i : mask_indices(m)) {
    if (!s.empty()) s += ',';
    s += chart.name(i);
  }
  return "(" + s + ")";
}

Background checked(const Background& bg) {
  validate_flux(bg.flux, bg.factors);
  if (bg.box.size() != bg.chart.dim()) throw InputError("sample box does not match chart dimension");
  return bg;
}

KForm maxwell_of(const KForm& flux, const Metric& h) {
  KForm lhs = ext_d(hodge(flux, h));
  return lhs - wedge(flux, flux).scaled(Expr::constant(0.5));
}

std::vector<IndexMask> masks_of(const KForm& a) {
  std::vector<IndexMask> out;
  for (const auto& [m, c] : a.terms()) out.push_back(m);
  return out;
}

std::vector<Expr> coefficients_of(std::initializer_list<const KForm*> forms) {
  std::vector<Expr> out;
  for (const KForm* f : forms) {
    for (const auto& [m, c] : f->terms()) out.push_back(c);
  }
  return out;
}

NumericForm contract_basis(const NumericForm& a, std::size_t i) {
  NumericForm out;
  const IndexMask bit = IndexMask{1} << i;
  for (const auto& [m, v] : a) {
    if (!(m & bit)) continue;
    bool odd = mask_size(m & (bit - 1)) & 1;
    out[m & ~bit] += odd ? -v : v;
  }
  return out;
}

double sanitize(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : std::abs(v); }

}  // namespace

bool ResidualReport::pass() const {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

const ResidualRow* ResidualReport::find(const std::string& equation, const std::string& block) const {
  for (const auto& r : rows) {
    if (r.equation == equation && r.block == block) return &r;
  }
  return nullptr;
}

struct ResidualEngine::PointResult {
  std::array<double, kRows.size()> value{};
  std::array<std::string, kRows.size()> component;
};

ResidualEngine::ResidualEngine(const Background& bg)
    : bg_(checked(bg)),
      h_(product_metric(bg_.factors)),
      flux_(assemble_flux(bg_.flux)),
      dflux_(ext_d(flux_)),
      maxwell_(maxwell_of(flux_, h_)),
      curv_(h_),
      tape_(coefficients_of({&flux_, &dflux_, &maxwell_})),
      flux_masks_(masks_of(flux_)),
      dflux_masks_(masks_of(dflux_)),
      maxwell_masks_(masks_of(maxwell_)) {}

bool ResidualEngine::evaluable(const Point& p) const {
  try {
    tape_.run(p);
    curv_.ricci(p);
    Eigen::MatrixXd g = h_.evaluate(p);
    return std::isfinite(g.sum()) && std::abs(g.determinant()) > 0.0;
  } catch (const DomainError&) {
    return false;
  }
}

std::vector<Point> ResidualEngine::sample(const SamplePlan& plan) const {
  return sample_points(bg_, plan, [this](const Point& p) { return evaluable(p); });
}

Eigen::MatrixXd ResidualEngine::contraction(const Point& p) const {
  const std::size_t n = h_.dim();
  Eigen::MatrixXd ginv = h_.evaluate(p).inverse();
  NumericForm phi = evaluate_form(flux_, p);
  std::vector<NumericForm> ip(n);
  for (std::size_t i = 0; i < n; ++i) ip[i] = contract_basis(phi, i);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      T(i, j) = T(j, i) = numeric_form_inner(ip[i], ip[j], ginv, h_.block());
    }
  }
  return T;
}

double ResidualEngine::flux_norm_sq(const Point& p) const { return sugra::flux_norm_sq(flux_, h_, p); }

double ResidualEngine::scalar_curvature(const Point& p) const { return curv_.scalar_curvature(p); }

Eigen::MatrixXd ResidualEngine::einstein(const Point& p) const {
  return curv_.ricci(p) + 0.5 * contraction(p) - (flux_norm_sq(p) / 6.0) * h_.evaluate(p);
}

ResidualEngine::PointResult ResidualEngine::evaluate(const Point& p, std::vector<double>& scratch) const {
  PointResult r;
  const Chart& chart = bg_.chart;
  const IndexMask L = bg_.factors.lorentz.block_mask();
  std::vector<double> vals(tape_.output_count());
  tape_.run(p, vals, scratch);

  auto note = [&](std::size_t row, double v, std::string comp) {
    v = sanitize(v);
    if (v > r.value[row] || (r.component[row].empty() && v >= r.value[row])) {
      r.value[row] = v;
      r.component[row] = std::move(comp);
    }
  };

  std::size_t k = flux_masks_.size();
  for (auto m : dflux_masks_) note(0, vals[k++], component_name(chart, m));
  for (auto m : maxwell_masks_) {
    double v = vals[k++];
    note(1, v, component_name(chart, m));
    int t = mask_size(m & L);
    if (t >= 2 && t <= 5) note(2 + static_cast<std::size_t>(t - 2), v, component_name(chart, m));
  }

  Eigen::MatrixXd g = h_.evaluate(p);
  Eigen::MatrixXd ginv = g.inverse();
  NumericForm phi;
  for (std::size_t i = 0; i < flux_masks_.size(); ++i) phi[flux_masks_[i]] = vals[i];
  const std::size_t n = h_.dim();
  std::vector<NumericForm> ip(n);
  for (std::size_t i = 0; i < n; ++i) ip[i] = contract_basis(phi, i);
  const double norm = numeric_form_inner(phi, phi, ginv, h_.block());
  Eigen::MatrixXd R = curv_.ricci(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double T = numeric_form_inner(ip[i], ip[j], ginv, h_.block());
      double e = R(i, j) + 0.5 * T - norm / 6.0 * g(i, j);
      bool li = (L >> i) & 1u, lj = (L >> j) & 1u;
      std::size_t row = (!li && !lj) ? 6 : (li && lj) ? 7 : 8;
      note(row, e, "(" + chart.name(i) + "," + chart.name(j) + ")");
    }
  }
  const double scal = -(ginv.cwiseProduct(R)).sum();
  note(9, scal - norm / 6.0, "scalar");
  return r;
}

ResidualReport ResidualEngine::run(std::span<const Point> points, const VerifyOptions& opts) const {
  std::vector<PointResult> results(points.size());
  unsigned jobs = opts.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.jobs;
  jobs = std::min<unsigned>(jobs, std::max<std::size_t>(1, points.size()));
  if (jobs <= 1) {
    std::vector<double> scratch;
    for (std::size_t i = 0; i < points.size(); ++i) results[i] = evaluate(points[i], scratch);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) {
      threads.emplace_back([&, t] {
        try {
          std::vector<double> scratch;
          for (std::size_t i = t; i < points.size(); i += jobs) results[i] = evaluate(points[i], scratch);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ResidualReport report;
  for (std::size_t row = 0; row < kRows.size(); ++row) {
    ResidualRow out;
    out.equation = kRows[row].equation;
    out.block = kRows[row].block;
    out.tolerance = opts.tolerance;
    double total = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double v = results[i].value[row];
      total += v;
      if (first || v > out.max) {
        out.max = v;
        out.worst_point = points[i];
        out.worst_component = results[i].component[row];
        first = false;
      }
    }
    out.mean = points.empty() ? 0.0 : total / static_cast<double>(points.size());
    out.pass = out.max < opts.tolerance;
    report.rows.push_back(std::move(out));
  }
  return report;
}

ResidualReport verify(const Background& bg, const SamplePlan& plan, const VerifyOptions& opts) {
  ResidualEngine engine(bg);
  auto points = engine.sample(plan);
  return engine.run(points, opts);
}

namespace {

std::vector<ResidualRow> rows_for(const Background& bg, const SamplePlan& plan, double tol, const char* eq) {
  VerifyOptions opts;
  opts.tolerance = tol;
  std::vector<ResidualRow> out;
  for (auto& r : verify(bg, plan, opts).rows) {
    if (r.equation == eq) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ResidualRow> closedness_residual(const Background& bg, const SamplePlan& plan, double tol) {
  return rows_for(bg, plan, tol, "closedness");
}
std::vector<ResidualRow> maxwell_residual(const Background& bg, const SamplePlan& plan, double tol) {
  return rows_for(bg, plan, tol, "maxwell");
}
std::vector<ResidualRow> einstein_residual(const Background& bg, const SamplePlan& plan, double tol) {
  return rows_for(bg, plan, tol, "einstein");
}
std::vector<ResidualRow> trace_check(const Background& bg, const SamplePlan& plan, double tol) {
  return rows_for(bg, plan, tol, "trace");
}

}  // namespace sugra
