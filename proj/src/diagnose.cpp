#include <algorithm>
#include <cmath>

#include "sugra/sugra.hpp"
#include "sugra/tape.hpp"

namespace sugra {

std::string to_string(ReducedCase c) {
  switch (c) {
    case ReducedCase::ProductFactor: return "product-factor";
    case ReducedCase::General: return "general";
    default: return "case-" + std::to_string(static_cast<int>(c));
  }
}

bool ReducedCaseDiagnosis::pass(double tol) const {
  if (!consistent) return false;
  for (const auto& r : residuals) {
    if (!(r.max < tol)) return false;
  }
  return true;
}

namespace {

class Diagnoser {
 public:
  Diagnoser(const FluxSpec& fs, const ProductStructure& ps, std::span<const Point> points)
      : fs_(fs), ps_(ps), points_(points), chart_(ps.lorentz.chart()) {}

  KForm scalar(const Expr& f) const { return KForm::scalar(chart_, f); }
  KForm star5(const KForm& a) const { return hodge(a, ps_.lorentz); }
  KForm star6(const KForm& a) const { return hodge(a, ps_.riemann); }

  // Coefficient values of the forms at every point, aligned on the union of masks.
  std::vector<std::vector<double>> samples(const std::vector<KForm>& forms) const {
    std::vector<IndexMask> masks;
    for (const auto& f : forms) {
      for (const auto& [m, c] : f.terms()) {
        if (std::find(masks.begin(), masks.end(), m) == masks.end()) masks.push_back(m);
      }
    }
    std::vector<Expr> coeffs;
    for (const auto& f : forms) {
      for (auto m : masks) coeffs.push_back(f.coefficient(m));
    }
    Tape tape(coeffs);
    std::vector<std::vector<double>> out;
    for (const auto& p : points_) out.push_back(tape.run(p));
    return out;
  }

  double max_abs(const KForm& a) const {
    double mx = 0.0;
    for (const auto& row : samples({a})) {
      for (double v : row) mx = std::max(mx, std::isnan(v) ? INFINITY : std::abs(v));
    }
    return mx;
  }

  void zero(const std::string& name, const KForm& a) { out_.residuals.push_back({name, max_abs(a)}); }

  // Least-squares c with A = c B jointly over all pairs; records the residual.
  double fit(const std::string& name, const std::vector<std::pair<KForm, KForm>>& eqs) {
    double ab = 0.0, bb = 0.0;
    std::vector<std::vector<std::vector<double>>> data;
    for (const auto& [A, B] : eqs) {
      if (A.degree() != B.degree()) throw StructureError("fitted equation has mismatched degrees");
      auto s = samples({A, B});
      for (const auto& row : s) {
        const std::size_t half = row.size() / 2;
        for (std::size_t i = 0; i < half; ++i) {
          ab += row[i] * row[half + i];
          bb += row[half + i] * row[half + i];
        }
      }
      data.push_back(std::move(s));
    }
    double c = bb > 0.0 ? ab / bb : 0.0;
    if (std::abs(c) < kZeroFitThreshold) c = 0.0;
    double mx = 0.0;
    for (const auto& s : data) {
      for (const auto& row : s) {
        const std::size_t half = row.size() / 2;
        for (std::size_t i = 0; i < half; ++i) mx = std::max(mx, std::abs(row[i] - c * row[half + i]));
      }
    }
    out_.residuals.push_back({name, mx});
    return c;
  }

  ReducedCaseDiagnosis run() {
    const bool tA = !fs_.alpha.is_zero() && !fs_.phi.is_zero();
    const bool tB = !fs_.beta.is_zero() && !fs_.nu.is_zero();
    const bool tG = !fs_.gamma.is_zero() && !fs_.delta.is_zero();
    const bool tW = !fs_.varpi.is_zero() && !fs_.epsilon.is_zero();
    const bool tT = !fs_.theta.is_zero() && !fs_.psi.is_zero();
    const int present = tA + tB + tG + tW + tT;

    const KForm phi = scalar(fs_.phi), psi = scalar(fs_.psi);
    const auto& al = fs_.alpha;
    const auto& be = fs_.beta;
    const auto& nu = fs_.nu;
    const auto& ga = fs_.gamma;
    const auto& de = fs_.delta;
    const auto& va = fs_.varpi;
    const auto& ep = fs_.epsilon;
    const auto& th = fs_.theta;

    if (present == 1 && tA) {
      out_.which = ReducedCase::Case1;
      zero("d phi", ext_d(phi));
      zero("d alpha", ext_d(al));
      zero("d *5 alpha", ext_d(star5(al)));
    } else if (present == 1 && tB) {
      out_.which = ReducedCase::Case2;
      zero("d beta", ext_d(be));
      zero("d *5 beta", ext_d(star5(be)));
      zero("d nu", ext_d(nu));
      zero("d *6 nu", ext_d(star6(nu)));
    } else if (present == 1 && tG) {
      out_.which = ReducedCase::Case3;
      zero("d gamma", ext_d(ga));
      zero("d delta", ext_d(de));
      zero("d *6 delta", ext_d(star6(de)));
      KForm gg = wedge(ga, ga);
      if (gg.is_zero()) {
        zero("d *5 gamma", ext_d(star5(ga)));
      } else {
        double k = fit("d *5 gamma = kappa gamma^gamma, kappa *6 delta = 1/2 delta^delta",
                       {{ext_d(star5(ga)), gg}, {wedge(de, de).scaled(Expr::constant(0.5)), star6(de)}});
        out_.kappa = k;
      }
    } else if (present == 1 && tW) {
      out_.which = ReducedCase::Case4;
      zero("d varpi", ext_d(va));
      zero("d *5 varpi", ext_d(star5(va)));
      zero("d epsilon", ext_d(ep));
      zero("d *6 epsilon", ext_d(star6(ep)));
    } else if (present == 1 && tT) {
      out_.which = ReducedCase::Case5;
      zero("d psi", ext_d(psi));
      zero("d theta", ext_d(th));
      zero("d *6 theta", ext_d(star6(th)));
    } else if (present == 2 && tA && tB) {
      out_.which = ReducedCase::Case6;
      zero("d alpha", ext_d(al));
      zero("d *5 beta", ext_d(star5(be)));
      zero("d nu", ext_d(nu));
      out_.kappa = fit("d phi = kappa nu, d beta = -kappa alpha", {{ext_d(phi), nu}, {ext_d(be), -al}});
      out_.lambda = fit("d *5 alpha = -lambda *5 beta, d *6 nu = lambda *6 phi",
                        {{ext_d(star5(al)), -star5(be)}, {ext_d(star6(nu)), star6(phi)}});
      out_.residuals.push_back({"<beta, X _| alpha>", orthogonality(be, al)});
    } else if (present == 2 && tW && tT) {
      out_.which = ReducedCase::Case7;
      zero("d theta", ext_d(th));
      zero("d varpi", ext_d(va));
      zero("d *6 epsilon", ext_d(star6(ep)));
      out_.kappa = fit("d psi = kappa varpi, d epsilon = kappa theta", {{ext_d(psi), va}, {ext_d(ep), th}});
      out_.lambda = fit("d *5 varpi = lambda *5 psi, d *6 theta = lambda *6 epsilon",
                        {{ext_d(star5(va)), star5(psi)}, {ext_d(star6(th)), star6(ep)}});
    } else if (present == 2 && tA && tT) {
      out_.which = ReducedCase::Case8;
      out_.consistent = false;
      out_.residuals.push_back({"min(|phi alpha|, |psi theta|)",
                                std::min(max_abs(al.scaled(fs_.phi)), max_abs(th.scaled(fs_.psi)))});
    } else if (present == 2 && tB && tW) {
      out_.which = ReducedCase::Case9;
      zero("d beta", ext_d(be));
      zero("d nu", ext_d(nu));
      zero("d varpi", ext_d(va));
      zero("d epsilon", ext_d(ep));
      zero("d *6 nu", ext_d(star6(nu)));
      zero("d *5 beta", ext_d(star5(be)));
      zero("d *5 varpi", ext_d(star5(va)));
      KForm en = wedge(ep, nu);
      if (en.is_zero()) {
        zero("d *6 epsilon", ext_d(star6(ep)));
      } else {
        out_.kappa = fit("d *6 epsilon = kappa epsilon^nu, kappa *5 varpi = beta^varpi",
                         {{ext_d(star6(ep)), en}, {wedge(be, va), star5(va)}});
      }
    } else if (!tT && common_factor(tA, tB, tG, tW)) {
      out_.which = ReducedCase::ProductFactor;
      closedness_by_type();
      const KForm s6phi = star6(phi);
      zero("maxwell (2~,6)", wedge(ext_d(star5(al)), s6phi) + wedge(star5(be), ext_d(star6(nu))));
      zero("maxwell (3~,5)", wedge(ext_d(star5(be)), star6(nu)) - wedge(star5(ga), ext_d(star6(de))));
      zero("maxwell (4~,4)", wedge(ext_d(star5(ga)), star6(de)) + wedge(star5(va), ext_d(star6(ep))));
      zero("maxwell (5~,3)", wedge(ext_d(star5(va)), star6(ep)));
    } else {
      out_.which = ReducedCase::General;
      closedness_by_type();
      for (auto& [name, form] : maxwell_by_type()) zero(name, form);
    }
    return out_;
  }

  // Typed Maxwell residuals assembled from the factor Hodge stars.
  std::vector<std::pair<std::string, KForm>> maxwell_by_type() const {
    const KForm phi = scalar(fs_.phi), psi = scalar(fs_.psi);
    const auto& al = fs_.alpha;
    const auto& be = fs_.beta;
    const auto& nu = fs_.nu;
    const auto& ga = fs_.gamma;
    const auto& de = fs_.delta;
    const auto& va = fs_.varpi;
    const auto& ep = fs_.epsilon;
    const auto& th = fs_.theta;
    const Expr half = Expr::constant(0.5);
    KForm l26 = wedge(ext_d(star5(al)), star6(phi)) + wedge(star5(be), ext_d(star6(nu)));
    KForm r26 = wedge(wedge(ga, th), de).scaled(fs_.psi);
    KForm l35 = wedge(ext_d(star5(be)), star6(nu)) - wedge(star5(ga), ext_d(star6(de)));
    KForm r35 = wedge(wedge(be, th), nu).scaled(fs_.psi) + wedge(wedge(wedge(ga, va), ep), de);
    KForm l44 = wedge(ext_d(star5(ga)), star6(de)) + wedge(star5(va), ext_d(star6(ep)));
    KForm r44 = wedge(al, th).scaled(Expr::mul({fs_.psi, fs_.phi})) + wedge(wedge(wedge(be, va), ep), nu) +
                wedge(wedge(wedge(ga, ga), de), de).scaled(half);
    KForm l53 = wedge(ext_d(star5(va)), star6(ep)) - wedge(star5(psi), ext_d(star6(th)));
    KForm r53 = wedge(wedge(al, va), ep).scaled(fs_.phi) + wedge(wedge(wedge(be, ga), de), nu);
    return {{"maxwell (2~,6)", l26 - r26},
            {"maxwell (3~,5)", l35 - r35},
            {"maxwell (4~,4)", l44 - r44},
            {"maxwell (5~,3)", l53 - r53}};
  }

 private:
  void closedness_by_type() {
    const KForm phi = scalar(fs_.phi), psi = scalar(fs_.psi);
    zero("closedness (5~,0)", wedge(phi, ext_d(fs_.alpha)));
    zero("closedness (4~,1)", wedge(fs_.alpha, ext_d(phi)) + wedge(ext_d(fs_.beta), fs_.nu));
    zero("closedness (3~,2)", wedge(ext_d(fs_.gamma), fs_.delta) - wedge(fs_.beta, ext_d(fs_.nu)));
    zero("closedness (2~,3)", wedge(fs_.gamma, ext_d(fs_.delta)) + wedge(ext_d(fs_.varpi), fs_.epsilon));
    zero("closedness (1~,4)", wedge(fs_.varpi, ext_d(fs_.epsilon)) - wedge(ext_d(psi), fs_.theta));
    zero("closedness (0~,5)", wedge(psi, ext_d(fs_.theta)));
  }

  // A Lorentzian 1-form dividing every present Lorentzian piece.
  bool common_factor(bool tA, bool tB, bool tG, bool tW) const {
    std::vector<KForm> candidates;
    if (tW) candidates.push_back(fs_.varpi);
    for (auto i : ps_.lorentz.block()) candidates.push_back(KForm::monomial(chart_, Expr::constant(1.0), {i}));
    for (const auto& w : candidates) {
      bool ok = (!tA || wedge(w, fs_.alpha).is_zero()) && (!tB || wedge(w, fs_.beta).is_zero()) &&
                (!tG || wedge(w, fs_.gamma).is_zero()) && (!tW || wedge(w, fs_.varpi).is_zero());
      if (ok) return true;
    }
    return false;
  }

  // max over points and Lorentzian coordinate vectors X of |<beta, X _| alpha>|.
  double orthogonality(const KForm& beta, const KForm& alpha) const {
    double mx = 0.0;
    for (auto i : ps_.lorentz.block()) {
      std::vector<Expr> X(chart_.dim());
      X[i] = Expr::constant(1.0);
      KForm ia = interior(X, alpha);
      if (ia.is_zero() || beta.is_zero()) continue;
      for (const auto& p : points_) mx = std::max(mx, std::abs(form_inner(beta, ia, ps_.lorentz, p)));
    }
    return mx;
  }

  const FluxSpec& fs_;
  const ProductStructure& ps_;
  std::span<const Point> points_;
  Chart chart_;
  ReducedCaseDiagnosis out_;
};

}  // namespace

ReducedCaseDiagnosis diagnose_reduced_case(const FluxSpec& fs, const ProductStructure& ps,
                                           std::span<const Point> points) {
  validate_flux(fs, ps);
  return Diagnoser(fs, ps, points).run();
}

std::vector<std::pair<std::string, KForm>> maxwell_by_factors(const FluxSpec& fs, const ProductStructure& ps) {
  validate_flux(fs, ps);
  return Diagnoser(fs, ps, {}).maxwell_by_type();
}

}  // namespace sugra
