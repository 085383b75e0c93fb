#include "pqk/pq_core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pqk {

namespace {

constexpr std::int64_t kIntegerSumSwitch = 64;
constexpr std::int64_t kFactorialLogSwitch = 30;

void require_nonnegative(std::int64_t n, const char* who) {
  if (n < 0) {
    std::ostringstream msg;
    msg << who << ": negative index " << n;
    throw std::domain_error(msg.str());
  }
}

}  // namespace

PQParams PQParams::make(double p, double q) {
  if (p == 1.0 && q == 1.0) return classical_limit();
  if (!(q > 0.0) || !(q < p) || !(p <= 1.0)) {
    std::ostringstream msg;
    msg << "PQParams: requires 0 < q < p <= 1, got p=" << p << " q=" << q;
    throw std::domain_error(msg.str());
  }
  return PQParams{p, q, false};
}

double pq_integer(std::int64_t n, const PQParams& params) {
  require_nonnegative(n, "pq_integer");
  if (n == 0) return 0.0;
  if (params.classical) return static_cast<double>(n);
  const double p = params.p, q = params.q;
  if (n <= kIntegerSumSwitch) {
    // sum_{i=0}^{n-1} p^{n-1-i} q^i, accumulated from the p^{n-1} end.
    double term = std::pow(p, static_cast<double>(n - 1));
    const double ratio = q / p;
    detail::KahanSum acc;
    for (std::int64_t i = 0; i < n; ++i) {
      acc.add(term);
      term *= ratio;
    }
    return acc.value();
  }
  // p^n (1 - (q/p)^n) / (p - q); the -expm1 factor lies in (0,1), so the
  // product cannot hit the 0 * inf that the q^n-anchored form produces once
  // q^n underflows.
  const double nd = static_cast<double>(n);
  return std::pow(p, nd) * -std::expm1(nd * (std::log(q) - std::log(p))) /
         (p - q);
}

double pq_log_factorial(std::int64_t n, const PQParams& params) {
  require_nonnegative(n, "pq_log_factorial");
  if (params.classical) return std::lgamma(static_cast<double>(n) + 1.0);
  const double p = params.p, q = params.q;
  // [k+1] = q [k] + p^k keeps every bracket O(1) inside the loop.
  double bracket = 0.0;
  double ppow = 1.0;
  double acc = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    bracket = q * bracket + ppow;
    ppow *= p;
    acc += std::log(bracket);
  }
  return acc;
}

double pq_factorial(std::int64_t n, const PQParams& params) {
  require_nonnegative(n, "pq_factorial");
  if (n <= kFactorialLogSwitch) {
    double bracket = 0.0;
    double ppow = 1.0;
    double prod = 1.0;
    for (std::int64_t k = 0; k < n; ++k) {
      if (params.classical) {
        prod *= static_cast<double>(k + 1);
        continue;
      }
      bracket = params.q * bracket + ppow;
      ppow *= params.p;
      prod *= bracket;
    }
    return prod;
  }
  return std::exp(pq_log_factorial(n, params));
}

double pq_binomial(std::int64_t n, std::int64_t k, const PQParams& params) {
  require_nonnegative(n, "pq_binomial");
  require_nonnegative(k, "pq_binomial");
  if (k > n) {
    std::ostringstream msg;
    msg << "pq_binomial: k=" << k << " exceeds n=" << n;
    throw std::domain_error(msg.str());
  }
  return std::exp(pq_log_factorial(n, params) - pq_log_factorial(k, params) -
                  pq_log_factorial(n - k, params));
}

double pq_exponential(double x, ExponentialKind kind, const PQParams& params,
                      double tol) {
  if (!(tol > 0.0) || tol >= 1.0) {
    throw std::domain_error("pq_exponential: tol must lie in (0,1)");
  }
  const double base = params.classical
                          ? 1.0
                          : (kind == ExponentialKind::small_e ? params.p : params.q);
  // term_{k+1} = term_k * base^k * x / [k+1]
  detail::KahanSum acc;
  double term = 1.0;
  double basepow = 1.0;  // base^k
  double bracket = 0.0;  // [k]
  double ppow = 1.0;     // p^k
  int quiet_streak = 0;
  for (std::size_t k = 0; k < detail::kExponentialMaxTerms; ++k) {
    acc.add(term);
    if (std::abs(term) < tol * std::abs(acc.value())) {
      if (++quiet_streak >= 3) return acc.value();
    } else {
      quiet_streak = 0;
    }
    bracket = params.classical ? static_cast<double>(k + 1)
                               : params.q * bracket + ppow;
    ppow *= params.p;
    term *= basepow * x / bracket;
    basepow *= base;
    if (!std::isfinite(term)) {
      throw numerical_error("pq_exponential: series diverged", k + 1);
    }
  }
  throw numerical_error("pq_exponential: no convergence within term budget",
                        detail::kExponentialMaxTerms);
}

}  // namespace pqk
