#pragma once

#include <functional>

#include "pqk/pq_core.hpp"

namespace pqk {

using RealFunction = std::function<double(double)>;

/// Jackson-type integral on [0,a]:
///   (p-q) a sum_{k>=0} (q^k/p^{k+1}) f(q^k a / p^{k+1}).
/// Nodes start at a/p (slightly above a when p < 1) and decrease
/// geometrically to 0, so f must be evaluable on (0, a/p].
///
/// Truncation: after node K the remaining mass is bounded by
/// (p-q) a (q/p)^K / (p (1-q/p)) * sup|f|, with the sup proxied by the
/// running max of |f| over visited nodes; stops when that bound drops
/// below tol. Hard budget of 1e6 nodes, exceeded -> numerical_error.
///
/// In classical mode this is adaptive composite Simpson on [0,a].
double pq_integral_from_zero(const RealFunction& f, double a,
                             const PQParams& params, double tol = 1e-12);

/// Integral over [a,b] as the difference of two from-zero integrals
/// (direct adaptive quadrature on [a,b] in classical mode, which is the
/// same value without the cancellation). Requires 0 <= a <= b, a > b is a
/// domain error. For q < p the result is NOT guaranteed nonnegative for
/// positive f; callers that care should check the sign themselves.
double pq_integral_interval(const RealFunction& f, double a, double b,
                            const PQParams& params, double tol = 1e-12);

namespace detail {

inline constexpr std::size_t kIntegralNodeBudget = 1000000;

/// Adaptive Simpson with absolute tolerance; used for every classical-mode
/// integral. Throws numerical_error if the refinement budget is exhausted.
double adaptive_simpson(const RealFunction& f, double a, double b, double tol);

}  // namespace detail

}  // namespace pqk
