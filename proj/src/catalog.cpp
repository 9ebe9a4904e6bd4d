#include "sugra/catalog.hpp"

#include <cmath>
#include <set>

namespace sugra {

namespace {

constexpr std::size_t U = 0, X1 = 1, X2 = 2, X3 = 3, V = 4;
constexpr std::size_t Y1 = 5, Y2 = 6, Y3 = 7, Y4 = 8, Y5 = 9, Y6 = 10;

Chart walker_chart() { return Chart({"u", "x1", "x2", "x3", "v", "y1", "y2", "y3", "y4", "y5", "y6"}); }

Expr c(double v) { return Expr::constant(v); }
Expr x(std::size_t i) { return Expr::coord(i); }

KForm mono(const Chart& chart, Expr coeff, std::vector<std::size_t> idx) {
  return KForm::monomial(chart, std::move(coeff), std::move(idx));
}

Metric flat_riemann(const Chart& chart) {
  ExprMatrix g(6);
  for (std::size_t i = 0; i < 6; ++i) g(i, i) = c(-1.0);
  return Metric(chart, {Y1, Y2, Y3, Y4, Y5, Y6}, std::move(g), Signature{0, 6});
}

std::vector<std::pair<double, double>> unit_box(std::size_t n) { return std::vector<std::pair<double, double>>(n, {-1.0, 1.0}); }

class Params {
 public:
  Params(const CatalogInfo& info, const BuildOptions& opts, const Chart& chart)
      : info_(info), opts_(opts), chart_(chart) {
    std::set<std::string> known;
    for (const auto& p : info.params) known.insert(p.name);
    for (const auto& [k, v] : opts.params) {
      if (!known.count(k)) throw InputError("unknown parameter '" + k + "' for " + info.id);
    }
    if (opts.perturb && !known.count(opts.perturb->first)) {
      throw InputError("unknown perturbation key '" + opts.perturb->first + "' for " + info.id);
    }
  }

  // Override or default, scaled by the perturbation factor when it names this parameter.
  Expr get(const std::string& name, const Expr& derived = Expr()) const {
    const CatalogParam* decl = nullptr;
    for (const auto& p : info_.params) {
      if (p.name == name) decl = &p;
    }
    if (!decl) throw InputError("undeclared parameter '" + name + "'");
    Expr value = derived;
    auto it = opts_.params.find(name);
    try {
      if (it != opts_.params.end()) {
        value = parse_expr(it->second, chart_);
      } else if (!decl->default_value.empty()) {
        value = parse_expr(decl->default_value, chart_);
      }
    } catch (const ParseError& e) {
      throw InputError("parameter '" + name + "': " + e.what());
    }
    if (opts_.perturb && opts_.perturb->first == name) value = Expr::mul({c(opts_.perturb->second), value});
    return value;
  }

  double number(const std::string& name, const Expr& derived = Expr()) const {
    Expr e = get(name, derived);
    if (e.deps()) throw InputError("parameter '" + name + "' must be a constant");
    return eval(e, {});
  }

 private:
  const CatalogInfo& info_;
  const BuildOptions& opts_;
  const Chart& chart_;
};

Background walker_background(const CatalogInfo& info, const Chart& chart, const Expr& H, FluxSpec flux,
                             Metric riemann, std::vector<std::pair<double, double>> box,
                             std::vector<Expr> singular = {}) {
  Metric lorentz = walker_metric(flat_walker(chart, H));
  return Background{info.id,
                    info.description,
                    chart,
                    ProductStructure{std::move(lorentz), std::move(riemann)},
                    std::move(flux),
                    std::move(box),
                    std::move(singular)};
}

Expr profile(const Params& p, const Expr& rhs) {
  return Expr::mul({p.get("H"), solve_walker_H(rhs, U, {X1, X2, X3}, V)});
}

const CatalogParam kProfileScale{"H", "1", "overall factor on the pp-wave profile"};

Background build_alpha(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  Expr f = p.get("f");
  if (f.deps() & ~(1u << U)) throw InputError("parameter 'f' may depend on u only");
  FluxSpec fs(chart);
  fs.alpha = mono(chart, f, {U, X1, X2, X3});
  // Lap_rho H = |f vol_rho|^2 = -f^2
  Expr H = profile(p, -Expr::pow(f, 2));
  return walker_background(info, chart, H, fs, flat_riemann(chart), unit_box(11));
}

Background build_beta_nu(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  FluxSpec fs(chart);
  fs.beta = mono(chart, c(1.0), {U, X1, X2});
  fs.nu = mono(chart, c(1.0), {Y1});
  // Lap_rho H = |dx1^dx2|^2 |nu|^2 = -1
  Expr H = profile(p, c(-1.0));
  return walker_background(info, chart, H, fs, flat_riemann(chart), unit_box(11));
}

Background build_gamma_delta(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  FluxSpec fs(chart);
  fs.gamma = mono(chart, c(1.0), {U, X1});
  fs.delta = mono(chart, c(1.0), {Y1, Y2}) + mono(chart, c(1.0), {Y3, Y4}) + mono(chart, c(1.0), {Y5, Y6});
  // Lap_rho H = |dx1|^2 |delta|^2 = -3
  Expr H = profile(p, c(-3.0));
  return walker_background(info, chart, H, fs, flat_riemann(chart), unit_box(11));
}

Background build_varpi_epsilon(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  Expr E = p.get("E");
  if (E.deps() & ~(1u << U)) throw InputError("parameter 'E' may depend on u only");
  FluxSpec fs(chart);
  fs.varpi = mono(chart, c(1.0), {U});
  fs.epsilon = mono(chart, E, {Y1, Y2, Y3});
  // Lap_rho H = |epsilon|^2 = -E^2
  Expr H = profile(p, -Expr::pow(E, 2));
  return walker_background(info, chart, H, fs, flat_riemann(chart), unit_box(11));
}

Background build_general(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  Expr f[4];
  for (int i = 0; i < 4; ++i) {
    f[i] = p.get("f" + std::to_string(i + 1));
    if (f[i].deps() & ~(1u << U)) throw InputError("parameters f1..f4 may depend on u only");
  }
  FluxSpec fs(chart);
  fs.alpha = mono(chart, f[0], {U, X1, X2, X3});
  fs.beta = mono(chart, f[1], {U, X1, X2});
  fs.nu = mono(chart, c(1.0), {Y3});
  fs.gamma = mono(chart, f[2], {U, X1});
  fs.delta = mono(chart, c(1.0), {Y2, Y3});
  fs.varpi = mono(chart, f[3], {U});
  fs.epsilon = mono(chart, c(1.0), {Y1, Y2, Y3});
  // Each piece contributes |Lorentzian part|^2 |Riemannian part|^2 = -f_i^2.
  std::vector<Expr> sq;
  for (auto& fi : f) sq.push_back(Expr::pow(fi, 2));
  Expr H = profile(p, -Expr::add(std::move(sq)));
  return walker_background(info, chart, H, fs, flat_riemann(chart), unit_box(11));
}

Background build_alphabeta_trig(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  const double kappa = p.number("kappa");
  if (kappa == 0.0) throw InputError("parameter 'kappa' must be nonzero");
  FluxSpec fs(chart);
  Expr ex = Expr::exp(x(X1));
  fs.phi = Expr::sin(x(Y1));
  fs.alpha = mono(chart, ex, {U, X1, X2, X3});
  fs.beta = mono(chart, Expr::mul({c(kappa), ex}), {U, X2, X3});
  fs.nu = mono(chart, Expr::mul({c(1.0 / kappa), Expr::cos(x(Y1))}), {Y1});
  // Lap_rho H = |omega|^2 |nu|^2 - f^2 phi^2 = -exp(2 x1)
  Expr H = Expr::mul({p.get("H"), c(0.25), Expr::exp(Expr::mul({c(2.0), x(X1)}))});
  return walker_background(info, chart, H, fs, flat_riemann(chart), unit_box(11));
}

Background build_alphabeta_poly(const CatalogInfo& info, const Params& p) {
  Chart chart = walker_chart();
  const double L = p.number("L");
  if (!(L > 0.0)) throw InputError("parameter 'L' must be positive");
  FluxSpec fs(chart);
  fs.alpha = mono(chart, x(X1), {U, X1, X2, X3});
  fs.beta = mono(chart, c(1.0), {U, X2, X3});
  fs.nu = mono(chart, -x(Y1), {Y1}) +
          mono(chart, Expr::sqrt(Expr::add({c(L * L), Expr::neg(Expr::pow(x(Y1), 2))})), {Y2});
  // Lap_rho H = |omega|^2 |nu|^2 - f^2 = -L^2 - x1^2
  Expr H = profile(p, Expr::add({c(-L * L), Expr::neg(Expr::pow(x(X1), 2))}));
  auto box = unit_box(11);
  box[Y1] = {-L, L};
  std::vector<Expr> singular{Expr::add({c(L), Expr::neg(x(Y1))}), Expr::add({c(L), x(Y1)})};
  return walker_background(info, chart, H, fs, flat_riemann(chart), box, singular);
}

Background build_kahler_theta(const CatalogInfo& info, const Params& p) {
  Chart chart({"t", "x1", "x2", "x3", "z", "y1", "y2", "y3", "y4", "y5", "y6"});
  const double K = p.number("K");
  if (!(K > 0.0)) throw InputError("parameter 'K' must be positive");
  const double cc = p.number("c", c(std::sqrt(2.0 * K)));
  const double L = p.number("L", c(2.0 / std::sqrt(K)));
  if (!(L > 0.0)) throw InputError("parameter 'L' must be positive");

  // (L^2/z^2)(dt^2 - dx^2 - dz^2)
  Expr conf = Expr::div(c(L * L), Expr::pow(x(4), 2));
  ExprMatrix gl(5);
  gl(0, 0) = conf;
  for (std::size_t i = 1; i < 5; ++i) gl(i, i) = Expr::neg(conf);
  Metric lorentz(chart, {0, 1, 2, 3, 4}, std::move(gl), Signature{1, 4}, {x(4)});

  // Three round spheres of curvature K in stereographic charts, sign-reversed.
  ExprMatrix gr(6);
  std::vector<Expr> area;
  for (std::size_t s = 0; s < 3; ++s) {
    const std::size_t a = Y1 + 2 * s, b = a + 1;
    Expr r2 = Expr::add({Expr::pow(x(a), 2), Expr::pow(x(b), 2)});
    Expr w = Expr::div(c(4.0), Expr::pow(Expr::add({c(1.0), Expr::mul({c(K), r2})}), 2));
    gr(2 * s, 2 * s) = Expr::neg(w);
    gr(2 * s + 1, 2 * s + 1) = Expr::neg(w);
    area.push_back(w);
  }
  Metric riemann(chart, {Y1, Y2, Y3, Y4, Y5, Y6}, std::move(gr), Signature{0, 6});

  // c *omega = c/2 omega^omega on a product of surfaces with their area forms.
  FluxSpec fs(chart);
  fs.theta = mono(chart, Expr::mul({c(cc), area[0], area[1]}), {Y1, Y2, Y3, Y4}) +
             mono(chart, Expr::mul({c(cc), area[0], area[2]}), {Y1, Y2, Y5, Y6}) +
             mono(chart, Expr::mul({c(cc), area[1], area[2]}), {Y3, Y4, Y5, Y6});

  auto box = unit_box(11);
  box[4] = {0.5, 1.5};
  return Background{info.id,
                    info.description,
                    chart,
                    ProductStructure{std::move(lorentz), std::move(riemann)},
                    std::move(fs),
                    std::move(box),
                    {}};
}

using Builder = Background (*)(const CatalogInfo&, const Params&);

struct Entry {
  CatalogInfo info;
  Builder build;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"alpha-ppwave",
        "pp-wave, flux f(u) du^dx1^dx2^dx3, H = f^2/6 |x|^2, flat R^6",
        {{"f", "u", "flux profile, a function of u"}, kProfileScale},
        "H"},
       build_alpha},
      {{"beta-nu-ppwave",
        "pp-wave, flux du^dx1^dx2^dy1 on R x R^5, H = |x|^2/6",
        {kProfileScale},
        "H"},
       build_beta_nu},
      {{"gamma-delta-ppwave",
        "pp-wave, flux du^dx1^delta with delta the flat Kahler form on R^6, H = |x|^2/2",
        {kProfileScale},
        "H"},
       build_gamma_delta},
      {{"varpi-epsilon-ppwave",
        "pp-wave, flux E du^dy1^dy2^dy3, H = E^2/6 |x|^2",
        {{"E", "1", "flux strength, a function of u"}, kProfileScale},
        "H"},
       build_varpi_epsilon},
      {{"general-combined",
        "pp-wave, flux du^(f1 dx1^dx2^dx3 + f2 dx1^dx2^dy3 + f3 dx1^dy2^dy3 + f4 dy1^dy2^dy3), "
        "H = (f1^2+f2^2+f3^2+f4^2)/6 |x|^2",
        {{"f1", "1", "function of u"},
         {"f2", "1", "function of u"},
         {"f3", "1", "function of u"},
         {"f4", "1", "function of u"},
         kProfileScale},
        "H"},
       build_general},
      {{"alphabeta-trig",
        "pp-wave on S^1 x R^5, flux exp(x1) du^dx2^dx3^(sin y1 dx1 + cos y1 dy1), H = exp(2 x1)/4",
        {{"kappa", "1", "nonzero constant; nu = cos(y1)/kappa dy1"}, kProfileScale},
        "H"},
       build_alphabeta_trig},
      {{"alphabeta-poly",
        "pp-wave on (-L,L) x R^5, flux du^dx2^dx3^(x1 dx1 - y1 dy1 + sqrt(L^2-y1^2) dy2), "
        "H = x1^4/12 + L^2 x1^2/2",
        {{"L", "1", "positive constant"}, kProfileScale},
        "H"},
       build_alphabeta_poly},
      {{"kahler-theta",
        "AdS5 x (S^2)^3 with flux c *omega, omega the Kahler form; c^2 = 2K = 8/L^2",
        {{"K", "1", "sphere curvature"},
         {"c", "", "flux constant, default sqrt(2K)"},
         {"L", "", "AdS radius, default 2/sqrt(K)"}},
        "c"},
       build_kahler_theta},
  };
  return list;
}

}  // namespace

const std::vector<CatalogInfo>& catalog() {
  static const std::vector<CatalogInfo> infos = [] {
    std::vector<CatalogInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const CatalogInfo* find_catalog_entry(const std::string& id) {
  for (const auto& info : catalog()) {
    if (info.id == id) return &info;
  }
  return nullptr;
}

Background build_background(const std::string& id, const BuildOptions& opts) {
  for (const auto& e : entries()) {
    if (e.info.id != id) continue;
    Chart chart = id == "kahler-theta" ? Chart({"t", "x1", "x2", "x3", "z", "y1", "y2", "y3", "y4", "y5", "y6"})
                                       : walker_chart();
    Params params(e.info, opts, chart);
    return e.build(e.info, params);
  }
  throw InputError("unknown background id '" + id + "'");
}

}  // namespace sugra
