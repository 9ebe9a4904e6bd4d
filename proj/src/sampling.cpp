#include <cmath>
#include <random>

#include "sugra/sugra.hpp"
#include "sugra/tape.hpp"

namespace sugra {

std::vector<Point> sample_points(const Background& bg, const SamplePlan& plan,
                                 const std::function<bool(const Point&)>& accept) {
  const std::size_t n = bg.chart.dim();
  if (bg.box.size() != n) throw InputError("sample box does not match chart dimension");
  for (const auto& [lo, hi] : bg.box) {
    if (!(lo <= hi)) throw InputError("sample box has an empty range");
  }
  std::vector<Expr> singular(bg.singular.begin(), bg.singular.end());
  for (const Metric* m : {&bg.factors.lorentz, &bg.factors.riemann}) {
    singular.insert(singular.end(), m->singular_set().begin(), m->singular_set().end());
  }
  Tape singular_tape(singular);

  // Raw 53-bit draws keep the sequence independent of the standard library.
  std::mt19937_64 rng(plan.seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<Point> out;
  out.reserve(plan.points);
  const std::size_t max_attempts = 1000 * plan.points + 1000;
  std::vector<double> scratch, values(singular.size());
  for (std::size_t attempt = 0; out.size() < plan.points; ++attempt) {
    if (attempt >= max_attempts) {
      throw InputError("could not draw enough regular sample points in the box");
    }
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [lo, hi] = bg.box[i];
      p[i] = lo + (hi - lo) * unit();
    }
    try {
      singular_tape.run(p, values, scratch);
      bool near = false;
      for (double v : values) near = near || !(std::abs(v) >= bg.margin);
      if (near) continue;
      if (!bg.factors.lorentz.signature_holds_at(p) || !bg.factors.riemann.signature_holds_at(p)) continue;
    } catch (const DomainError&) {
      continue;
    }
    if (accept && !accept(p)) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace sugra
