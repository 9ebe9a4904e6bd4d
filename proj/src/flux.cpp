#include <Eigen/Dense>

#include "sugra/sugra.hpp"
#include "sugra/tape.hpp"

namespace sugra {

FluxSpec::FluxSpec(const Chart& chart)
    : alpha(chart, 4),
      beta(chart, 3),
      nu(chart, 1),
      gamma(chart, 2),
      delta(chart, 2),
      varpi(chart, 1),
      epsilon(chart, 3),
      theta(chart, 4) {}

namespace {

struct PieceRef {
  const char* name;
  const KForm* form;
  int degree;
  bool lorentz;
};

std::vector<PieceRef> pieces(const FluxSpec& fs) {
  return {{"alpha", &fs.alpha, 4, true},   {"beta", &fs.beta, 3, true},
          {"nu", &fs.nu, 1, false},        {"gamma", &fs.gamma, 2, true},
          {"delta", &fs.delta, 2, false},  {"varpi", &fs.varpi, 1, true},
          {"epsilon", &fs.epsilon, 3, false}, {"theta", &fs.theta, 4, false}};
}

}  // namespace

void validate_flux(const FluxSpec& fs, const ProductStructure& ps) {
  const IndexMask L = ps.lorentz.block_mask();
  const IndexMask R = ps.riemann.block_mask();
  for (const auto& p : pieces(fs)) {
    if (!(p.form->chart() == ps.lorentz.chart())) {
      throw StructureError(std::string("flux piece ") + p.name + " lives on a different chart");
    }
    if (p.form->degree() != p.degree) {
      throw StructureError(std::string("flux piece ") + p.name + " must have degree " + std::to_string(p.degree));
    }
    const IndexMask own = p.lorentz ? L : R;
    if ((p.form->support() & ~own) || (p.form->coefficient_deps() & ~own)) {
      throw StructureError(std::string("flux piece ") + p.name + " leaves the " +
                           (p.lorentz ? "Lorentzian" : "Riemannian") + " factor");
    }
  }
  if (fs.phi.deps() & ~R) throw StructureError("flux piece phi leaves the Riemannian factor");
  if (fs.psi.deps() & ~L) throw StructureError("flux piece psi leaves the Lorentzian factor");
}

KForm assemble_flux(const FluxSpec& fs) {
  KForm out = fs.alpha.scaled(fs.phi);
  out = out + wedge(fs.beta, fs.nu);
  out = out + wedge(fs.gamma, fs.delta);
  out = out + wedge(fs.varpi, fs.epsilon);
  out = out + fs.theta.scaled(fs.psi);
  return out;
}

double flux_norm_sq(const FluxSpec& fs, const ProductStructure& ps, std::span<const double> point) {
  const Metric& gl = ps.lorentz;
  const Metric& gr = ps.riemann;
  auto norm = [&](const KForm& a, const Metric& m) { return a.is_zero() ? 0.0 : form_inner(a, a, m, point); };
  const double phi = eval(fs.phi, point);
  const double psi = eval(fs.psi, point);
  return phi * phi * norm(fs.alpha, gl) + norm(fs.beta, gl) * norm(fs.nu, gr) +
         norm(fs.gamma, gl) * norm(fs.delta, gr) + norm(fs.varpi, gl) * norm(fs.epsilon, gr) +
         psi * psi * norm(fs.theta, gr);
}

double flux_norm_sq(const KForm& flux, const Metric& h, std::span<const double> point) {
  return form_inner(flux, flux, h, point);
}

std::string component_type(IndexMask component, IndexMask lorentz) {
  return "(" + std::to_string(mask_size(component & lorentz)) + "~," +
         std::to_string(mask_size(component & ~lorentz)) + ")";
}

}  // namespace sugra
