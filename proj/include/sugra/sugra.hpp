#pragma once

// Flux ansatz on a product M~(5) x M(6), the eleven-dimensional field
// equations as pointwise residuals, and the reduced-case diagnosis.
//
//   Phi = phi alpha + beta ^ nu + gamma ^ delta + varpi ^ epsilon + psi theta
//
// Tilded pieces (alpha, beta, gamma, varpi, psi) live on the Lorentzian
// factor, the others on the Riemannian factor.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sugra/geometry.hpp"

namespace sugra {

struct FluxSpec {
  explicit FluxSpec(const Chart& chart);

  Expr phi = Expr::constant(1.0);
  KForm alpha;    // 4-form, Lorentzian
  KForm beta;     // 3-form, Lorentzian
  KForm nu;       // 1-form, Riemannian
  KForm gamma;    // 2-form, Lorentzian
  KForm delta;    // 2-form, Riemannian
  KForm varpi;    // 1-form, Lorentzian
  KForm epsilon;  // 3-form, Riemannian
  Expr psi = Expr::constant(1.0);
  KForm theta;    // 4-form, Riemannian
};

// Throws StructureError when a piece has the wrong degree or touches the
// other factor's coordinates, either in its differentials or coefficients.
void validate_flux(const FluxSpec& fs, const ProductStructure& ps);

KForm assemble_flux(const FluxSpec& fs);

// |Phi|^2 from the factor norms of the pieces.
double flux_norm_sq(const FluxSpec& fs, const ProductStructure& ps, std::span<const double> point);
// |Phi|^2 from the assembled form and the product metric.
double flux_norm_sq(const KForm& flux, const Metric& h, std::span<const double> point);

struct Background {
  std::string id;
  std::string description;
  Chart chart;
  ProductStructure factors;
  FluxSpec flux;
  std::vector<std::pair<double, double>> box;  // per chart coordinate
  std::vector<Expr> singular;                  // in addition to the metrics' singular sets
  double margin = 0.05;
};

struct SamplePlan {
  std::size_t points = 100;
  std::uint64_t seed = 42;
};

// Uniform points in the box, rejecting points within the margin of a singular
// set, points where the product metric has the wrong signature, and points
// where `accept` (if given) returns false. Deterministic in the seed.
std::vector<Point> sample_points(const Background& bg, const SamplePlan& plan,
                                 const std::function<bool(const Point&)>& accept = {});

struct ResidualRow {
  std::string equation;
  std::string block;
  double max = 0.0;
  double mean = 0.0;
  Point worst_point;
  std::string worst_component;
  double tolerance = 1e-8;
  bool pass = true;
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  bool pass() const;
  const ResidualRow* find(const std::string& equation, const std::string& block) const;
};

struct VerifyOptions {
  double tolerance = 1e-8;
  unsigned jobs = 1;
};

// Symbolic field equations of a background, compiled for evaluation at points.
class ResidualEngine {
 public:
  explicit ResidualEngine(const Background& bg);

  const Background& background() const { return bg_; }
  const Metric& metric() const { return h_; }
  const KForm& flux() const { return flux_; }
  const KForm& closedness_form() const { return dflux_; }    // dPhi
  const KForm& maxwell_form() const { return maxwell_; }     // d*Phi - 1/2 Phi^Phi
  const CurvatureEvaluator& curvature() const { return curv_; }

  // True when every compiled quantity evaluates without a domain error.
  bool evaluable(const Point& p) const;
  std::vector<Point> sample(const SamplePlan& plan) const;

  // Einstein residual Ric + 1/2 <e_i _| Phi, e_j _| Phi> - 1/6 h |Phi|^2.
  Eigen::MatrixXd einstein(const Point& p) const;
  // <e_i _| Phi, e_j _| Phi>
  Eigen::MatrixXd contraction(const Point& p) const;
  double flux_norm_sq(const Point& p) const;
  double scalar_curvature(const Point& p) const;

  ResidualReport run(std::span<const Point> points, const VerifyOptions& opts = {}) const;

 private:
  struct PointResult;
  PointResult evaluate(const Point& p, std::vector<double>& scratch) const;

  Background bg_;
  Metric h_;
  KForm flux_;
  KForm dflux_;
  KForm maxwell_;
  CurvatureEvaluator curv_;
  Tape tape_;
  std::vector<IndexMask> flux_masks_, dflux_masks_, maxwell_masks_;
};

ResidualReport verify(const Background& bg, const SamplePlan& plan, const VerifyOptions& opts = {});

// Individual equations, each as a subset of the full report.
std::vector<ResidualRow> closedness_residual(const Background& bg, const SamplePlan& plan, double tol = 1e-8);
std::vector<ResidualRow> maxwell_residual(const Background& bg, const SamplePlan& plan, double tol = 1e-8);
std::vector<ResidualRow> einstein_residual(const Background& bg, const SamplePlan& plan, double tol = 1e-8);
std::vector<ResidualRow> trace_check(const Background& bg, const SamplePlan& plan, double tol = 1e-8);

// Type of a form component on the product: (number of Lorentzian indices,
// number of Riemannian indices), printed as "(a~,b)".
std::string component_type(IndexMask component, IndexMask lorentz);

// ---- reduced cases ----------------------------------------------------------

enum class ReducedCase { Case1 = 1, Case2, Case3, Case4, Case5, Case6, Case7, Case8, Case9, ProductFactor, General };

std::string to_string(ReducedCase c);

struct SubResidual {
  std::string name;
  double max = 0.0;
};

struct ReducedCaseDiagnosis {
  ReducedCase which = ReducedCase::General;
  std::optional<double> kappa;
  std::optional<double> lambda;
  std::vector<SubResidual> residuals;
  // False when the case is inconsistent as stated (both terms of case 8 nonzero).
  bool consistent = true;
  bool pass(double tol) const;
};

// Fitted constants whose magnitude is below this are treated as zero.
inline constexpr double kZeroFitThreshold = 1e-10;

// The four typed Maxwell residuals assembled piece by piece from the factor
// Hodge stars, keyed "maxwell (a~,b)". Their sum is the full Maxwell residual.
std::vector<std::pair<std::string, KForm>> maxwell_by_factors(const FluxSpec& fs, const ProductStructure& ps);

ReducedCaseDiagnosis diagnose_reduced_case(const FluxSpec& fs, const ProductStructure& ps,
                                           std::span<const Point> points);

}  // namespace sugra
