#include "sugra/exterior.hpp"

#include <algorithm>

#include "sugra/tape.hpp"

namespace sugra {

std::vector<std::size_t> mask_indices(IndexMask m) {
  std::vector<std::size_t> out;
  while (m) {
    out.push_back(static_cast<std::size_t>(__builtin_ctz(m)));
    m &= m - 1;
  }
  return out;
}

IndexMask indices_mask(std::span<const std::size_t> idx) {
  IndexMask m = 0;
  for (auto i : idx) m |= IndexMask{1} << i;
  return m;
}

int wedge_sign(IndexMask a, IndexMask b) {
  // Count pairs (i in a, j in b) with i > j.
  int inversions = 0;
  while (b) {
    int j = __builtin_ctz(b);
    b &= b - 1;
    inversions += mask_size(a & ~((IndexMask{2} << j) - 1));
  }
  return (inversions & 1) ? -1 : 1;
}

// ---- KForm ----------------------------------------------------------------

KForm::KForm(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  if (degree < 0 || static_cast<std::size_t>(degree) > chart_.dim()) {
    throw StructureError("form degree out of range");
  }
}

KForm KForm::scalar(Chart chart, Expr f) {
  KForm out(std::move(chart), 0);
  out.add_term(0, f);
  return out;
}

KForm KForm::monomial(Chart chart, Expr coeff, std::vector<std::size_t> indices) {
  KForm out(chart, static_cast<int>(indices.size()));
  for (auto i : indices) {
    if (i >= chart.dim()) throw StructureError("form index outside chart");
  }
  // Bubble sort to get the permutation sign.
  int sign = 1;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = 0; j + 1 < indices.size() - i; ++j) {
      if (indices[j] == indices[j + 1]) return out;
      if (indices[j] > indices[j + 1]) {
        std::swap(indices[j], indices[j + 1]);
        sign = -sign;
      }
    }
  }
  for (std::size_t j = 0; j + 1 < indices.size(); ++j) {
    if (indices[j] == indices[j + 1]) return out;
  }
  out.add_term(indices_mask(indices), sign > 0 ? coeff : Expr::neg(coeff));
  return out;
}

Expr KForm::coefficient(IndexMask m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Expr() : it->second;
}

IndexMask KForm::support() const {
  IndexMask s = 0;
  for (const auto& [m, c] : terms_) s |= m;
  return s;
}

std::uint32_t KForm::coefficient_deps() const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d |= c.deps();
  return d;
}

void KForm::add_term(IndexMask m, const Expr& c) {
  if (mask_size(m) != degree_) throw StructureError("term degree does not match form degree");
  if (chart_.dim() < 32 && (m >> chart_.dim()) != 0) throw StructureError("form index outside chart");
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  Expr sum = Expr::add({it->second, c});
  if (sum.is_zero()) {
    terms_.erase(it);
  } else {
    it->second = sum;
  }
}

namespace {

void require_compatible(const KForm& a, const KForm& b, bool same_degree) {
  if (!(a.chart() == b.chart())) throw StructureError("forms live on different charts");
  if (same_degree && a.degree() != b.degree()) throw StructureError("form degrees differ");
}

}  // namespace

KForm KForm::operator+(const KForm& o) const {
  require_compatible(*this, o, true);
  KForm out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

KForm KForm::operator-(const KForm& o) const { return *this + (-o); }

KForm KForm::operator-() const {
  KForm out(chart_, degree_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, Expr::neg(c));
  return out;
}

KForm KForm::scaled(const Expr& f) const {
  KForm out(chart_, degree_);
  if (f.is_zero()) return out;
  for (const auto& [m, c] : terms_) out.add_term(m, Expr::mul({f, c}));
  return out;
}

KForm wedge(const KForm& a, const KForm& b) {
  require_compatible(a, b, false);
  if (static_cast<std::size_t>(a.degree() + b.degree()) > a.chart().dim()) {
    throw StructureError("wedge degree exceeds chart dimension");
  }
  KForm out(a.chart(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      Expr c = Expr::mul({ca, cb});
      out.add_term(ma | mb, wedge_sign(ma, mb) > 0 ? c : Expr::neg(c));
    }
  }
  return out;
}

KForm ext_d(const KForm& a) {
  const std::size_t n = a.chart().dim();
  if (static_cast<std::size_t>(a.degree()) == n) return KForm(a.chart(), static_cast<int>(n));
  KForm out(a.chart(), a.degree() + 1);
  for (const auto& [m, c] : a.terms()) {
    for (std::size_t j = 0; j < n; ++j) {
      IndexMask bit = IndexMask{1} << j;
      if ((m & bit) || !c.depends_on(j)) continue;
      Expr dc = diff(c, j);
      if (dc.is_zero()) continue;
      // dx^j moved past the indices of m that precede it.
      bool odd = mask_size(m & (bit - 1)) & 1;
      out.add_term(m | bit, odd ? Expr::neg(dc) : dc);
    }
  }
  return out;
}

KForm interior(std::span<const Expr> X, const KForm& a) {
  if (X.size() != a.chart().dim()) throw StructureError("vector field has wrong dimension");
  if (a.degree() == 0) return KForm(a.chart(), 0);
  KForm out(a.chart(), a.degree() - 1);
  for (const auto& [m, c] : a.terms()) {
    int pos = 0;
    for (auto i : mask_indices(m)) {
      if (!X[i].is_zero()) {
        Expr t = Expr::mul({X[i], c});
        out.add_term(m & ~(IndexMask{1} << i), (pos & 1) ? Expr::neg(t) : t);
      }
      ++pos;
    }
  }
  return out;
}

NumericForm evaluate_form(const KForm& a, std::span<const double> point) {
  std::vector<Expr> coeffs;
  for (const auto& [m, c] : a.terms()) coeffs.push_back(c);
  Tape tape(coeffs);
  auto values = tape.run(point);
  NumericForm out;
  std::size_t k = 0;
  for (const auto& [m, c] : a.terms()) out[m] = values[k++];
  return out;
}

double numeric_form_inner(const NumericForm& a, const NumericForm& b, const Eigen::MatrixXd& ginv,
                          std::span<const std::size_t> block) {
  int local[32];
  std::fill(std::begin(local), std::end(local), -1);
  for (std::size_t i = 0; i < block.size(); ++i) local[block[i]] = static_cast<int>(i);
  double sum = 0.0;
  for (const auto& [ma, va] : a) {
    if (va == 0.0) continue;
    auto ia = mask_indices(ma);
    for (auto i : ia) {
      if (local[i] < 0) throw StructureError("form not supported on the metric block");
    }
    for (const auto& [mb, vb] : b) {
      if (vb == 0.0) continue;
      auto ib = mask_indices(mb);
      if (ia.size() != ib.size()) throw StructureError("form degrees differ");
      const std::size_t k = ia.size();
      double det = 1.0;
      if (k > 0) {
        Eigen::MatrixXd sub(k, k);
        for (std::size_t r = 0; r < k; ++r) {
          if (local[ib[r]] < 0) throw StructureError("form not supported on the metric block");
          for (std::size_t s = 0; s < k; ++s) sub(r, s) = ginv(local[ia[r]], local[ib[s]]);
        }
        det = k == 1 ? sub(0, 0) : sub.determinant();
      }
      sum += va * vb * det;
    }
  }
  return sum;
}

double form_inner(const KForm& a, const KForm& b, const Metric& m, std::span<const double> point) {
  if (!(a.chart() == m.chart()) || !(b.chart() == m.chart())) {
    throw StructureError("forms and metric live on different charts");
  }
  if (a.degree() != b.degree()) throw StructureError("form degrees differ");
  if ((a.support() | b.support()) & ~m.block_mask()) {
    throw StructureError("form not supported on the metric block");
  }
  Eigen::MatrixXd ginv = m.evaluate(point).inverse();
  return numeric_form_inner(evaluate_form(a, point), evaluate_form(b, point), ginv, m.block());
}

}  // namespace sugra
