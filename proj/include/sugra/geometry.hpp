#pragma once

// Levi-Civita curvature of a Metric, Walker metrics and product metrics.
//
// Ricci convention: R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik.
// For a Walker pp-wave this gives Ric = -1/2 Lap_rho(H) du^2.

#include <array>
#include <span>

#include "sugra/exterior.hpp"
#include "sugra/tape.hpp"

namespace sugra {

// Christoffel symbols of the second kind, G^k_ij, indexed locally in the block.
class Christoffel {
 public:
  explicit Christoffel(std::size_t n) : n_(n), data_(n * n * n) {}
  std::size_t dim() const { return n_; }
  const Expr& operator()(std::size_t k, std::size_t i, std::size_t j) const { return data_[(k * n_ + i) * n_ + j]; }
  Expr& operator()(std::size_t k, std::size_t i, std::size_t j) { return data_[(k * n_ + i) * n_ + j]; }
  std::span<const Expr> flat() const { return data_; }

 private:
  std::size_t n_;
  std::vector<Expr> data_;
};

Christoffel christoffel(const Metric& m);
ExprMatrix ricci(const Metric& m);
Expr laplace_beltrami(const Metric& m, const Expr& s);

// Symbolic Ricci tensor compiled once for repeated numeric evaluation.
class CurvatureEvaluator {
 public:
  explicit CurvatureEvaluator(const Metric& m);

  const Metric& metric() const { return metric_; }
  const ExprMatrix& ricci_symbolic() const { return ricci_; }

  Eigen::MatrixXd ricci(std::span<const double> point) const;
  // h^ij R_ij.
  double ricci_trace(std::span<const double> point) const;
  // Scalar curvature normalised against the sign-reversed metric, -h^ij R_ij.
  // With this normalisation a round sphere written with a negative-definite
  // metric has positive scalar curvature.
  double scalar_curvature(std::span<const double> point) const;

 private:
  Metric metric_;
  ExprMatrix ricci_;
  Tape tape_;
};

double ricci_trace(const Metric& m, std::span<const double> point);
double scalar_curvature(const Metric& m, std::span<const double> point);

// g = 2 du dv + rho_ij dx^i dx^j + 2 A_i dx^i du + H du^2
struct WalkerData {
  Chart chart;
  std::size_t u = 0;
  std::array<std::size_t, 3> x{1, 2, 3};
  std::size_t v = 4;
  std::array<std::array<Expr, 3>, 3> rho;
  std::array<Expr, 3> A;
  Expr H;
};

// Flat transverse metric rho = -(dx1^2 + dx2^2 + dx3^2), A = 0.
WalkerData flat_walker(Chart chart, Expr H, std::size_t u = 0, std::array<std::size_t, 3> x = {1, 2, 3},
                       std::size_t v = 4);

// Throws GeometryError if rho is not negative definite at one of the probes.
Metric walker_metric(const WalkerData& w, std::span<const Point> probes = {});

// The transverse metric rho as a metric on the x block.
Metric walker_transverse_metric(const WalkerData& w);

// Throws GeometryError unless dH/dv = 0, A = 0 and rho is Ricci-flat at the probes.
void check_ricci_isotropic(const WalkerData& w, std::span<const Point> probes, double tol = 1e-9);

struct ProductStructure {
  Metric lorentz;
  Metric riemann;
};

// Block-diagonal metric on the whole chart. Throws StructureError when the
// blocks overlap or do not cover the chart, or when a factor depends on the
// other factor's coordinates.
Metric product_metric(const ProductStructure& ps);

}  // namespace sugra
