#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "sugra/exterior.hpp"
#include "sugra/tape.hpp"

namespace sugra {

namespace {

// Determinants of submatrices by Laplace expansion along the first row,
// memoised on (rows, cols); literal zero entries are skipped.
class MinorDet {
 public:
  explicit MinorDet(const ExprMatrix& a) : a_(a) {}

  Expr operator()(IndexMask rows, IndexMask cols) {
    if (rows == 0) return Expr::constant(1.0);
    std::uint64_t key = (std::uint64_t{rows} << 32) | cols;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const std::size_t r0 = static_cast<std::size_t>(__builtin_ctz(rows));
    std::vector<Expr> terms;
    int pos = 0;
    for (IndexMask c = cols; c; c &= c - 1, ++pos) {
      const std::size_t j = static_cast<std::size_t>(__builtin_ctz(c));
      const Expr& e = a_(r0, j);
      if (e.is_zero()) continue;
      Expr minor = (*this)(rows & (rows - 1), cols & ~(IndexMask{1} << j));
      if (minor.is_zero()) continue;
      Expr t = Expr::mul({e, minor});
      terms.push_back((pos & 1) ? Expr::neg(t) : t);
    }
    Expr d = Expr::add(std::move(terms));
    memo_.emplace(key, d);
    return d;
  }

 private:
  const ExprMatrix& a_;
  std::unordered_map<std::uint64_t, Expr> memo_;
};

// Action of the k-th compound matrix on a k-vector b:
//   out(C) = sum over R of det M[C, R] b(R),
// computed one index at a time. The intermediate T(J; L) is M applied to the
// first |J| slots of b, antisymmetric in both the raised set J and the
// remaining set L, so each step is a single contraction with a row of M.
class CompoundAction {
 public:
  CompoundAction(const ExprMatrix& m, std::map<IndexMask, Expr> b) : m_(m), b_(std::move(b)) {}

  Expr operator()(IndexMask C) { return at(C, 0); }

 private:
  Expr at(IndexMask J, IndexMask L) {
    if (J == 0) {
      auto it = b_.find(L);
      return it == b_.end() ? Expr::constant(0.0) : it->second;
    }
    const std::uint64_t key = (std::uint64_t{J} << 32) | L;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const std::size_t i = 31u - static_cast<std::size_t>(__builtin_clz(J));
    const IndexMask rest = J & ~(IndexMask{1} << i);
    std::vector<Expr> terms;
    for (std::size_t r = 0; r < m_.size(); ++r) {
      const IndexMask bit = IndexMask{1} << r;
      if (L & bit) continue;
      const Expr& g = m_(i, r);
      if (g.is_zero()) continue;
      Expr t = at(rest, L | bit);
      if (t.is_zero()) continue;
      Expr prod = Expr::mul({g, t});
      terms.push_back(mask_size(L & (bit - 1)) & 1 ? Expr::neg(prod) : prod);
    }
    Expr out = Expr::add(std::move(terms));
    memo_.emplace(key, out);
    return out;
  }

  const ExprMatrix& m_;
  std::map<IndexMask, Expr> b_;
  std::unordered_map<std::uint64_t, Expr> memo_;
};

int index_sum_parity(IndexMask m) {
  int s = 0;
  for (auto i : mask_indices(m)) s += static_cast<int>(i);
  return s & 1;
}

int permutation_sign(std::vector<std::size_t> v) {
  int s = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] > v[j]) s = -s;
    }
  }
  return s;
}

}  // namespace

struct Metric::Data {
  Chart chart;
  std::vector<std::size_t> block;
  IndexMask block_mask = 0;
  ExprMatrix g;
  ExprMatrix ginv;
  Expr det;
  Expr sqrt_abs_det;
  Signature sig;
  std::vector<Expr> singular;
  std::vector<std::vector<std::size_t>> components;
  std::vector<IndexMask> component_masks;
  Tape tape;
  int local[32];
};

Metric::Metric(Chart chart, std::vector<std::size_t> block, ExprMatrix entries, Signature signature,
               std::vector<Expr> singular) {
  auto d = std::make_shared<Data>();
  const std::size_t n = block.size();
  if (n == 0) throw StructureError("metric block is empty");
  if (entries.size() != n) throw StructureError("metric entries do not match block size");
  if (signature.p < 0 || signature.q < 0 || static_cast<std::size_t>(signature.p + signature.q) != n) {
    throw StructureError("signature does not match metric dimension");
  }
  std::fill(std::begin(d->local), std::end(d->local), -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (block[i] >= chart.dim()) throw StructureError("metric block outside chart");
    if (i > 0 && block[i] <= block[i - 1]) {
      throw StructureError("metric block must be strictly increasing");
    }
    d->local[block[i]] = static_cast<int>(i);
    d->block_mask |= IndexMask{1} << block[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!structurally_equal(entries(i, j), entries(j, i))) {
        throw StructureError("metric entries are not symmetric");
      }
    }
  }

  // Components of the sparsity graph.
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!entries(i, j).is_zero()) parent[find(i)] = find(j);
    }
  }
  std::vector<int> comp_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    if (comp_of[r] < 0) {
      comp_of[r] = static_cast<int>(d->components.size());
      d->components.emplace_back();
      d->component_masks.push_back(0);
    }
    d->components[comp_of[r]].push_back(i);
    d->component_masks[comp_of[r]] |= IndexMask{1} << i;
  }

  MinorDet minors(entries);
  ExprMatrix ginv(n);
  std::vector<Expr> dets;
  for (std::size_t c = 0; c < d->components.size(); ++c) {
    const auto& idx = d->components[c];
    const IndexMask cm = d->component_masks[c];
    Expr dc = minors(cm, cm);
    if (dc.is_zero()) throw GeometryError("metric determinant vanishes identically");
    dets.push_back(dc);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) {
        Expr cof = minors(cm & ~(IndexMask{1} << idx[b]), cm & ~(IndexMask{1} << idx[a]));
        if (cof.is_zero()) continue;
        Expr v = Expr::div(cof, dc);
        ginv(idx[a], idx[b]) = ((a + b) & 1) ? Expr::neg(v) : v;
      }
    }
  }
  // Make the symbolic inverse exactly symmetric.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) ginv(j, i) = ginv(i, j);
  }
  d->det = Expr::mul(dets);
  d->sqrt_abs_det = Expr::sqrt((signature.q & 1) ? Expr::neg(d->det) : d->det);
  d->chart = std::move(chart);
  d->block = std::move(block);
  d->g = std::move(entries);
  d->ginv = std::move(ginv);
  d->sig = signature;
  d->singular = std::move(singular);
  d->tape = Tape(d->g.flat());
  d_ = std::move(d);
}

const Chart& Metric::chart() const { return d_->chart; }
std::span<const std::size_t> Metric::block() const { return d_->block; }
IndexMask Metric::block_mask() const { return d_->block_mask; }
std::size_t Metric::dim() const { return d_->block.size(); }
Signature Metric::signature() const { return d_->sig; }
std::span<const Expr> Metric::singular_set() const { return d_->singular; }
const ExprMatrix& Metric::entries() const { return d_->g; }
const Expr& Metric::entry(std::size_t i, std::size_t j) const { return d_->g(i, j); }
const ExprMatrix& Metric::inverse() const { return d_->ginv; }
const Expr& Metric::det() const { return d_->det; }
const Expr& Metric::sqrt_abs_det() const { return d_->sqrt_abs_det; }
const std::vector<std::vector<std::size_t>>& Metric::components() const { return d_->components; }

int Metric::local_index(std::size_t chart_index) const {
  return chart_index < 32 ? d_->local[chart_index] : -1;
}

Eigen::MatrixXd Metric::evaluate(std::span<const double> point) const {
  const std::size_t n = dim();
  Eigen::MatrixXd out(n, n);
  std::vector<double> vals(n * n);
  std::vector<double> scratch;
  d_->tape.run(point, vals, scratch);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = vals[i * n + j];
  }
  return out;
}

bool Metric::signature_holds_at(std::span<const double> point) const {
  Eigen::MatrixXd g = evaluate(point);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff();
  int neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= 1e-12 * scale) return false;
    if (ev(i) < 0) ++neg;
  }
  return neg == d_->sig.q;
}

namespace {

int orientation_sign(const Metric& m, std::span<const std::size_t> orientation) {
  if (orientation.empty()) return 1;
  if (orientation.size() != m.dim()) throw StructureError("orientation is not a permutation of the block");
  std::vector<std::size_t> local;
  IndexMask seen = 0;
  for (auto c : orientation) {
    int l = m.local_index(c);
    if (l < 0 || (seen >> l) & 1u) throw StructureError("orientation is not a permutation of the block");
    seen |= IndexMask{1} << l;
    local.push_back(static_cast<std::size_t>(l));
  }
  return permutation_sign(local);
}

IndexMask to_local(const Metric& m, IndexMask chart_mask) {
  IndexMask out = 0;
  for (auto i : mask_indices(chart_mask)) out |= IndexMask{1} << m.local_index(i);
  return out;
}

IndexMask to_chart(const Metric& m, IndexMask local_mask) {
  IndexMask out = 0;
  for (auto i : mask_indices(local_mask)) out |= IndexMask{1} << m.block()[i];
  return out;
}

void check_form_on_block(const KForm& a, const Metric& m) {
  if (!(a.chart() == m.chart())) throw StructureError("form and metric live on different charts");
  if (a.support() & ~m.block_mask()) throw StructureError("form not supported on the metric block");
}

// Every k-subset of the union of components, drawing counts[c] from component c.
void enumerate_matching(const std::vector<IndexMask>& comps, const std::vector<int>& counts, std::size_t c,
                        IndexMask acc, std::set<IndexMask>& out) {
  if (c == comps.size()) {
    out.insert(acc);
    return;
  }
  auto idx = mask_indices(comps[c]);
  const int want = counts[c];
  std::vector<int> pick(want);
  std::function<void(std::size_t, int, IndexMask)> rec = [&](std::size_t start, int left, IndexMask m) {
    if (left == 0) {
      enumerate_matching(comps, counts, c + 1, acc | m, out);
      return;
    }
    for (std::size_t i = start; i + left <= idx.size(); ++i) rec(i + 1, left - 1, m | (IndexMask{1} << idx[i]));
  };
  rec(0, want, 0);
}

}  // namespace

KForm hodge(const KForm& a, const Metric& m, std::span<const std::size_t> orientation) {
  check_form_on_block(a, m);
  const int osign = orientation_sign(m, orientation);
  const std::size_t n = m.dim();
  const int k = a.degree();
  if (static_cast<std::size_t>(k) > n) throw StructureError("form degree exceeds block dimension");

  std::vector<IndexMask> comps;
  for (const auto& c : m.components()) comps.push_back(indices_mask(c));
  const IndexMask full = n == 32 ? ~IndexMask{0} : ((IndexMask{1} << n) - 1);

  // Raised components a^I. Up to half the dimension the compound of the
  // inverse metric acts directly; above it, the complementary minors of the
  // metric give the same numbers with smaller determinants:
  //   det ginv[I, K] = (-1)^(sum I + sum K) det g[K^c, I^c] / det g.
  const bool dual = 2 * static_cast<std::size_t>(k) > n;
  std::map<IndexMask, Expr> b;
  std::set<IndexMask> candidates;
  for (const auto& [mask, c] : a.terms()) {
    IndexMask lm = to_local(m, mask);
    if (dual) {
      b.emplace(full & ~lm, index_sum_parity(lm) ? Expr::neg(c) : c);
    } else {
      b.emplace(lm, c);
    }
    std::vector<int> counts;
    for (auto cm : comps) counts.push_back(mask_size(lm & cm));
    enumerate_matching(comps, counts, 0, 0, candidates);
  }
  CompoundAction act(dual ? m.entries() : m.inverse(), std::move(b));

  KForm out(a.chart(), static_cast<int>(n) - k);
  for (IndexMask I : candidates) {
    const IndexMask Ic = full & ~I;
    Expr raised = dual ? act(Ic) : act(I);
    if (raised.is_zero()) continue;
    const int sign = osign * wedge_sign(I, Ic) * (dual && index_sum_parity(I) ? -1 : 1);
    Expr coeff = dual ? Expr::mul({Expr::div(raised, m.det()), m.sqrt_abs_det()})
                      : Expr::mul({raised, m.sqrt_abs_det()});
    out.add_term(to_chart(m, Ic), sign > 0 ? coeff : Expr::neg(coeff));
  }
  return out;
}

KForm volume_form(const Metric& m, std::span<const std::size_t> orientation) {
  const int osign = orientation_sign(m, orientation);
  KForm out(m.chart(), static_cast<int>(m.dim()));
  out.add_term(m.block_mask(), osign > 0 ? m.sqrt_abs_det() : Expr::neg(m.sqrt_abs_det()));
  return out;
}

}  // namespace sugra
