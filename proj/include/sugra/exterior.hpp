#pragma once

// Differential forms and (pseudo-)Riemannian metrics on a chart.
//
// A KForm stores its components on strictly increasing index tuples, encoded
// as bitmasks over the chart coordinates. A Metric acts on a block of chart
// coordinates; its entries may still depend on coordinates outside the block,
// which then behave as parameters. A metric whose block is the whole chart is
// an ordinary metric on the chart.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "sugra/expr.hpp"

namespace sugra {

using IndexMask = std::uint32_t;

std::vector<std::size_t> mask_indices(IndexMask m);
IndexMask indices_mask(std::span<const std::size_t> idx);
inline int mask_size(IndexMask m) { return __builtin_popcount(m); }

class KForm {
 public:
  KForm(Chart chart, int degree);

  static KForm scalar(Chart chart, Expr f);
  // coeff * dx^{i1} ^ ... ^ dx^{ik} for indices in any order.
  static KForm monomial(Chart chart, Expr coeff, std::vector<std::size_t> indices);

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  const std::map<IndexMask, Expr>& terms() const { return terms_; }
  Expr coefficient(IndexMask m) const;
  bool is_zero() const { return terms_.empty(); }

  // Union of all index masks and of all coefficient dependencies.
  IndexMask support() const;
  std::uint32_t coefficient_deps() const;

  void add_term(IndexMask m, const Expr& c);

  KForm operator+(const KForm& o) const;
  KForm operator-(const KForm& o) const;
  KForm operator-() const;
  KForm scaled(const Expr& f) const;

 private:
  Chart chart_;
  int degree_;
  std::map<IndexMask, Expr> terms_;
};

// Sign of moving the (disjoint) index sets a and b into increasing order.
int wedge_sign(IndexMask a, IndexMask b);

KForm wedge(const KForm& a, const KForm& b);
KForm ext_d(const KForm& a);
// Contraction with the vector field whose components are X (one per chart coordinate).
KForm interior(std::span<const Expr> X, const KForm& a);

struct Signature {
  int p = 0;  // positive eigenvalues
  int q = 0;  // negative eigenvalues
  bool operator==(const Signature&) const = default;
};

class ExprMatrix {
 public:
  ExprMatrix() = default;
  explicit ExprMatrix(std::size_t n) : n_(n), data_(n * n) {}
  std::size_t size() const { return n_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  Expr& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const Expr> flat() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<Expr> data_;
};

class Tape;

class Metric {
 public:
  // entries is indexed by position within block and must be symmetric.
  // singular lists expressions whose zero sets the metric is not defined on.
  Metric(Chart chart, std::vector<std::size_t> block, ExprMatrix entries, Signature signature,
         std::vector<Expr> singular = {});

  const Chart& chart() const;
  std::span<const std::size_t> block() const;
  IndexMask block_mask() const;
  std::size_t dim() const;
  Signature signature() const;
  std::span<const Expr> singular_set() const;

  const ExprMatrix& entries() const;
  const Expr& entry(std::size_t i, std::size_t j) const;
  // Symbolic inverse (adjugate over determinant), determinant and sqrt|det|.
  const ExprMatrix& inverse() const;
  const Expr& det() const;
  const Expr& sqrt_abs_det() const;

  // Connected components of the sparsity pattern, as local index lists.
  const std::vector<std::vector<std::size_t>>& components() const;

  Eigen::MatrixXd evaluate(std::span<const double> point) const;
  // Negative-eigenvalue count matches the declared signature at the point.
  bool signature_holds_at(std::span<const double> point) const;

  // Local position of a chart index, or -1 when outside the block.
  int local_index(std::size_t chart_index) const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

// Pointwise inner product of two k-forms supported on the metric's block,
// normalised as the sum over increasing index tuples.
double form_inner(const KForm& a, const KForm& b, const Metric& m, std::span<const double> point);

// Hodge star on the metric's block, defined by a ^ *b = <a,b> vol with
// vol = sqrt|det| dx^{o1} ^ ... ^ dx^{on} for the given orientation (a
// permutation of the block; empty means block order).
KForm hodge(const KForm& a, const Metric& m, std::span<const std::size_t> orientation = {});

// Riemannian volume form for the given orientation.
KForm volume_form(const Metric& m, std::span<const std::size_t> orientation = {});

// Numeric form at a point: mask -> value.
using NumericForm = std::map<IndexMask, double>;
NumericForm evaluate_form(const KForm& a, std::span<const double> point);

// Inner product of numeric forms against a numeric inverse metric restricted
// to the block given by `block` (chart indices, in the order used by ginv).
double numeric_form_inner(const NumericForm& a, const NumericForm& b, const Eigen::MatrixXd& ginv,
                          std::span<const std::size_t> block);

}  // namespace sugra
