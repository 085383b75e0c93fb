#pragma once

#include <cstdint>

#include "pqk/errors.hpp"

namespace pqk {

/// Parameter pair 0 < q < p <= 1, or the classical limit p = q = 1.
///
/// `classical` is true iff p = q = 1 exactly; every operation in the library
/// switches to its ordinary (Poisson / Riemann) form in that mode.
struct PQParams {
  double p = 1.0;
  double q = 1.0;
  bool classical = true;

  /// Validates 0 < q < p <= 1. The pair (1,1) is promoted to classical mode.
  static PQParams make(double p, double q);
  static PQParams classical_limit() { return PQParams{1.0, 1.0, true}; }
};

/// [n]_{p,q} = (p^n - q^n)/(p - q), with [0] = 0 and [n]_{1,1} = n.
///
/// Small n uses the homogeneous sum sum_{i<n} p^{n-1-i} q^i; large n uses the
/// algebraically equal q^n expm1(n (log p - log q))/(p-q), which stays stable
/// as q -> p. Both paths agree to ~1e-13 (see tests).
double pq_integer(std::int64_t n, const PQParams& params);

/// [n]_{p,q}! = [1][2]...[n], with [0]! = 1.
/// Accumulated directly up to n = 30, in log domain beyond (all factors are
/// positive, so no sign tracking is required).
double pq_factorial(std::int64_t n, const PQParams& params);

/// log([n]_{p,q}!), the stable primitive behind pq_factorial and the basis
/// weights.
double pq_log_factorial(std::int64_t n, const PQParams& params);

/// Gaussian binomial [n choose k]_{p,q} = [n]!/([k]![n-k]!), log domain.
/// Throws std::domain_error when k > n or either index is negative.
double pq_binomial(std::int64_t n, std::int64_t k, const PQParams& params);

/// The two twin exponentials. small_e carries p^{k(k-1)/2} coefficients and
/// converges only for |x| < p/(p-q); big_E carries q^{k(k-1)/2} and is entire.
/// They satisfy small_e(x) * big_E(-x) = 1.
enum class ExponentialKind { small_e, big_E };

/// Partial sums of sum_k c_k x^k/[k]!; stops once |term| < tol*|partial sum|
/// for 3 consecutive terms. Throws numerical_error (carrying the number of
/// terms examined) if the budget is exhausted first, which is how a
/// small_e argument outside the convergence radius surfaces.
double pq_exponential(double x, ExponentialKind kind, const PQParams& params,
                      double tol = 1e-15);

namespace detail {

/// Compensated (Kahan) accumulator used by the series and integral loops.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value) {
    double y = value - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline constexpr std::size_t kExponentialMaxTerms = 100000;

}  // namespace detail

}  // namespace pqk
