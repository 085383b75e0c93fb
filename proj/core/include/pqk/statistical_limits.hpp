#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pqk/szasz_kantorovich.hpp"

namespace pqk {

using IndexPredicate = std::function<bool(std::int64_t)>;
using RealSequence = std::function<double(std::int64_t)>;

/// Exact exception-set counting over the index range 1..horizon.
struct DensityReport {
  std::int64_t horizon = 0;
  std::int64_t exception_count = 0;
  double density_estimate = 0.0;
  double epsilon = 0.0;
};

/// density of {k <= N : member(k)} by exact counting.
DensityReport natural_density(const IndexPredicate& member, std::int64_t N);

/// density of {k <= N : |sequence(k) - L| >= eps}; a statistical limit L
/// shows up as this density tending to 0 along growing horizons.
DensityReport stat_limit_check(const RealSequence& sequence, double L,
                               double eps, std::int64_t N);

/// Parameter sequences (p_n, q_n): a smooth rule plus an optional
/// disturbance pair (p*, q*) applied on an exception index set.
struct ParamSequenceScheme {
  std::string name;
  RealSequence p_rule;
  RealSequence q_rule;
  IndexPredicate exception_set;            // may be empty (no exceptions)
  std::pair<double, double> disturbance{1.0, 1.0};

  PQParams at(std::int64_t n) const;
};

/// q_n = 1 - 1/(n+1), p_n = 1 - 1/(n+1)^2: both tend to 1 and q_n^n stays
/// bounded away from 0, so the operator converges in the ordinary sense.
ParamSequenceScheme smooth_scheme();

/// The smooth rule disturbed to (p*, q*) = (1, 1/2) on perfect squares:
/// convergence survives statistically (the squares have density 0) but not
/// in the ordinary sense.
ParamSequenceScheme disturbed_squares_scheme();

/// Constant q0 < p0: the negative control. q_n converges (statistically and
/// ordinarily) to q0, not 1, and [n] does NOT grow, so the Korovkin error
/// terms do not vanish.
ParamSequenceScheme constant_sub_one_scheme(double p0 = 0.95, double q0 = 0.9);

/// Korovkin error split for the second test function:
///   |K_n(t^2; x) - x^2| = alpha x^2 + beta x + gamma  with
///   alpha = p/q^3 - 1,
///   beta  = (p+[2])/(q[3][n]) + 1/(q^2[n]),
///   gamma = 1/([3][n]^2).
struct KorovkinDecomposition {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};
KorovkinDecomposition korovkin_decomposition(std::int64_t n,
                                             const PQParams& params);

struct KorovkinRow {
  std::int64_t n = 0;
  double p = 1.0;
  double q = 1.0;
  int nu = 0;
  double grid_sup = 0.0;
  /// density of {k <= n : grid_sup_nu(k) >= eps}
  double exception_density = 0.0;
  /// slow-path validation value (series evaluation); NaN when not requested
  double grid_sup_series = 0.0;
};

struct KorovkinReport {
  std::vector<KorovkinRow> rows;
  double eps = 0.0;
  std::vector<std::int64_t> horizons;
  /// per nu in {0,1,2}: exception densities at each horizon
  std::array<std::vector<DensityReport>, 3> horizon_densities;
};

/// Grid sups of |K_n(t^nu; x) - x^nu| along a parameter scheme, via the
/// closed-form moments (optionally validated against the series path), plus
/// exact exception densities for the supplied eps: per row at horizon n and
/// per nu at each requested horizon.
KorovkinReport korovkin_statistical_report(
    const ParamSequenceScheme& scheme, const std::vector<std::int64_t>& n_values,
    const std::vector<double>& grid, const BasisSpec& spec = {},
    const OperatorConfig& cfg = {}, double eps = 0.01,
    const std::vector<std::int64_t>& horizons = {1000, 10000, 100000, 1000000},
    bool validate_with_series = false);

}  // namespace pqk
