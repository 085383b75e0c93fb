#include "pqk/pq_integral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pqk {

namespace detail {

namespace {

double simpson_panel(const RealFunction& f, double a, double fa, double b,
                     double fb, double* fmid) {
  const double m = 0.5 * (a + b);
  *fmid = f(m);
  return (b - a) / 6.0 * (fa + 4.0 * *fmid + fb);
}

double simpson_recurse(const RealFunction& f, double a, double fa, double m,
                       double fm, double b, double fb, double whole,
                       double tol, int depth, std::size_t* evals) {
  double flm, frm;
  const double left = simpson_panel(f, a, fa, m, fm, &flm);
  const double right = simpson_panel(f, m, fm, b, fb, &frm);
  *evals += 2;
  if (*evals > kIntegralNodeBudget) {
    throw numerical_error("adaptive_simpson: evaluation budget exhausted",
                          *evals);
  }
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  return simpson_recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1,
                         evals) +
         simpson_recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1,
                         evals);
}

}  // namespace

double adaptive_simpson(const RealFunction& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b);
  double fm;
  const double whole = simpson_panel(f, a, fa, b, fb, &fm);
  std::size_t evals = 3;
  return simpson_recurse(f, a, fa, 0.5 * (a + b), fm, b, fb, whole, tol, 48,
                         &evals);
}

}  // namespace detail

double pq_integral_from_zero(const RealFunction& f, double a,
                             const PQParams& params, double tol) {
  if (!(a >= 0.0)) {
    throw std::domain_error("pq_integral_from_zero: endpoint must be >= 0");
  }
  if (!(tol > 0.0)) {
    throw std::domain_error("pq_integral_from_zero: tol must be positive");
  }
  if (a == 0.0) return 0.0;
  if (params.classical) return detail::adaptive_simpson(f, 0.0, a, tol);

  const double p = params.p, q = params.q;
  const double r = q / p;
  detail::KahanSum acc;
  double node = a / p;             // q^k a / p^{k+1}
  double weight = (p - q) * a / p; // (p-q) a q^k / p^{k+1}
  double fmax = 0.0;
  for (std::size_t k = 0; k < detail::kIntegralNodeBudget; ++k) {
    const double fv = f(node);
    acc.add(weight * fv);
    fmax = std::max(fmax, std::abs(fv));
    // The sup proxy needs a few samples before the tail bound means much.
    if (k >= 8 && weight / (1.0 - r) * fmax < tol) return acc.value();
    node *= r;
    weight *= r;
  }
  throw numerical_error("pq_integral_from_zero: node budget exhausted",
                        detail::kIntegralNodeBudget);
}

double pq_integral_interval(const RealFunction& f, double a, double b,
                            const PQParams& params, double tol) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw std::domain_error("pq_integral_interval: endpoints must be >= 0");
  }
  if (a > b) {
    throw std::domain_error("pq_integral_interval: requires a <= b");
  }
  if (a == b) return 0.0;
  if (params.classical) return detail::adaptive_simpson(f, a, b, tol);
  return pq_integral_from_zero(f, b, params, tol) -
         pq_integral_from_zero(f, a, params, tol);
}

}  // namespace pqk
