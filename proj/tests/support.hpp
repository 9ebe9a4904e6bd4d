#pragma once

// Shared test helpers: random expressions, forms and metrics, and the
// finite-difference oracles that the symbolic machinery is checked against.

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "sugra/catalog.hpp"

namespace sugra::testing {

using Rng = std::mt19937_64;

Point random_point(std::size_t n, Rng& rng, double lo = -0.5, double hi = 0.5);
std::vector<Point> random_points(std::size_t count, std::size_t n, Rng& rng, double lo = -0.5, double hi = 0.5);

// Smooth expression in the coordinates listed in `coords`, bounded and
// nonsingular on [-1, 1]^n. Depth 0 gives an affine function.
Expr random_expr(std::span<const std::size_t> coords, Rng& rng, int depth = 2);
// Polynomial of total degree <= `degree` with small integer-ish coefficients.
Expr random_polynomial(std::span<const std::size_t> coords, Rng& rng, int degree);

// Up to `terms` monomials of the given degree on `coords`.
KForm random_form(const Chart& chart, int degree, std::span<const std::size_t> coords, Rng& rng, int terms = 4,
                  int coeff_depth = 1);

// Coordinate-dependent metric on `block` with the given signature, close
// enough to diag(+1..+1, -1..-1) that the signature holds on [-0.5, 0.5]^n.
Metric random_metric(const Chart& chart, std::vector<std::size_t> block, Signature sig, Rng& rng);

Chart numbered_chart(std::size_t n, const std::string& prefix = "c");

// Max |coefficient| of a form at a point, and of the difference of two forms.
double max_abs(const KForm& a, std::span<const double> p);
double max_abs_diff(const KForm& a, const KForm& b, std::span<const double> p);

// Central difference of f along coordinate i.
double fd_diff(const std::function<double(const Point&)>& f, const Point& p, std::size_t i, double h = 1e-5);

// Curvature from metric values only: central differences with step h,
// Richardson-extrapolated once, in the convention
//   R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik.
class FdCurvature {
 public:
  explicit FdCurvature(Metric m, double h = 1e-4) : m_(std::move(m)), h_(h) {}

  // G^k_ij at local block indices, flattened as (k * n + i) * n + j.
  std::vector<double> christoffel(const Point& p) const;
  Eigen::MatrixXd ricci(const Point& p) const;

 private:
  Eigen::MatrixXd dmetric(const Point& p, std::size_t local) const;
  std::vector<double> dchristoffel(const Point& p, std::size_t local) const;

  Metric m_;
  double h_;
};

}  // namespace sugra::testing
