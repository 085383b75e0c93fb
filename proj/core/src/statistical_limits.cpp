#include "pqk/statistical_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pqk {

namespace {

void validate_horizon(std::int64_t N, const char* who) {
  if (N < 1) {
    throw std::domain_error(std::string(who) + ": horizon must be >= 1");
  }
}

bool is_perfect_square(std::int64_t n) {
  const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(
      static_cast<double>(n))));
  for (std::int64_t c = std::max<std::int64_t>(r - 1, 0); c <= r + 1; ++c) {
    if (c * c == n) return true;
  }
  return false;
}

double grid_sup_error(int nu, std::int64_t n, const PQParams& params,
                      const std::vector<double>& grid) {
  double sup = 0.0;
  for (double x : grid) {
    const double target = nu == 0 ? 1.0 : (nu == 1 ? x : x * x);
    sup = std::max(sup,
                   std::abs(moment_closed_form(nu, n, params, x) - target));
  }
  return sup;
}

}  // namespace

DensityReport natural_density(const IndexPredicate& member, std::int64_t N) {
  validate_horizon(N, "natural_density");
  if (!member) throw std::domain_error("natural_density: empty predicate");
  std::int64_t count = 0;
  for (std::int64_t k = 1; k <= N; ++k) {
    if (member(k)) ++count;
  }
  return {N, count, static_cast<double>(count) / static_cast<double>(N), 0.0};
}

DensityReport stat_limit_check(const RealSequence& sequence, double L,
                               double eps, std::int64_t N) {
  validate_horizon(N, "stat_limit_check");
  if (!sequence) throw std::domain_error("stat_limit_check: empty sequence");
  if (!(eps > 0.0)) {
    throw std::domain_error("stat_limit_check: eps must be positive");
  }
  std::int64_t count = 0;
  for (std::int64_t k = 1; k <= N; ++k) {
    if (std::abs(sequence(k) - L) >= eps) ++count;
  }
  return {N, count, static_cast<double>(count) / static_cast<double>(N), eps};
}

PQParams ParamSequenceScheme::at(std::int64_t n) const {
  if (n < 1) throw std::domain_error("ParamSequenceScheme: requires n >= 1");
  if (exception_set && exception_set(n)) {
    return PQParams::make(disturbance.first, disturbance.second);
  }
  return PQParams::make(p_rule(n), q_rule(n));
}

ParamSequenceScheme smooth_scheme() {
  ParamSequenceScheme scheme;
  scheme.name = "smooth";
  scheme.p_rule = [](std::int64_t n) {
    const double m = static_cast<double>(n) + 1.0;
    return 1.0 - 1.0 / (m * m);
  };
  scheme.q_rule = [](std::int64_t n) {
    return 1.0 - 1.0 / (static_cast<double>(n) + 1.0);
  };
  scheme.exception_set = nullptr;
  return scheme;
}

ParamSequenceScheme disturbed_squares_scheme() {
  ParamSequenceScheme scheme = smooth_scheme();
  scheme.name = "disturbed-squares";
  scheme.exception_set = [](std::int64_t n) { return is_perfect_square(n); };
  scheme.disturbance = {1.0, 0.5};
  return scheme;
}

ParamSequenceScheme constant_sub_one_scheme(double p0, double q0) {
  PQParams::make(p0, q0);  // validate once up front
  ParamSequenceScheme scheme;
  scheme.name = "constant-sub-one";
  scheme.p_rule = [p0](std::int64_t) { return p0; };
  scheme.q_rule = [q0](std::int64_t) { return q0; };
  scheme.exception_set = nullptr;
  return scheme;
}

KorovkinDecomposition korovkin_decomposition(std::int64_t n,
                                             const PQParams& params) {
  if (n < 1) {
    throw std::domain_error("korovkin_decomposition: requires n >= 1");
  }
  const double p = params.p, q = params.q;
  const double bn = pq_integer(n, params);
  const double b2 = pq_integer(2, params);
  const double b3 = pq_integer(3, params);
  return {p / (q * q * q) - 1.0,
          (p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn),
          1.0 / (b3 * bn * bn)};
}

KorovkinReport korovkin_statistical_report(
    const ParamSequenceScheme& scheme, const std::vector<std::int64_t>& n_values,
    const std::vector<double>& grid, const BasisSpec& spec,
    const OperatorConfig& cfg, double eps,
    const std::vector<std::int64_t>& horizons, bool validate_with_series) {
  if (grid.empty()) {
    throw std::domain_error("korovkin_statistical_report: empty grid");
  }
  for (double x : grid) {
    if (!(x >= 0.0)) {
      throw std::domain_error("korovkin_statistical_report: grid points >= 0");
    }
  }
  if (!(eps > 0.0)) {
    throw std::domain_error("korovkin_statistical_report: eps must be > 0");
  }
  std::int64_t scan_max = 0;
  for (std::int64_t n : n_values) {
    validate_horizon(n, "korovkin_statistical_report");
    scan_max = std::max(scan_max, n);
  }
  for (std::int64_t N : horizons) {
    validate_horizon(N, "korovkin_statistical_report");
    scan_max = std::max(scan_max, N);
  }

  // One pass over 1..scan_max: prefix exception counts per nu.
  std::array<std::vector<std::int64_t>, 3> prefix;
  for (auto& v : prefix) v.assign(static_cast<std::size_t>(scan_max) + 1, 0);
  for (std::int64_t k = 1; k <= scan_max; ++k) {
    const PQParams params = scheme.at(k);
    for (int nu = 0; nu < 3; ++nu) {
      const bool exceeds = grid_sup_error(nu, k, params, grid) >= eps;
      prefix[nu][static_cast<std::size_t>(k)] =
          prefix[nu][static_cast<std::size_t>(k - 1)] + (exceeds ? 1 : 0);
    }
  }

  KorovkinReport report;
  report.eps = eps;
  report.horizons = horizons;
  for (int nu = 0; nu < 3; ++nu) {
    for (std::int64_t N : horizons) {
      const std::int64_t count = prefix[nu][static_cast<std::size_t>(N)];
      report.horizon_densities[static_cast<std::size_t>(nu)].push_back(
          {N, count, static_cast<double>(count) / static_cast<double>(N), eps});
    }
  }

  for (std::int64_t n : n_values) {
    const PQParams params = scheme.at(n);
    for (int nu = 0; nu < 3; ++nu) {
      KorovkinRow row;
      row.n = n;
      row.p = params.p;
      row.q = params.q;
      row.nu = nu;
      row.grid_sup = grid_sup_error(nu, n, params, grid);
      row.exception_density =
          static_cast<double>(prefix[nu][static_cast<std::size_t>(n)]) /
          static_cast<double>(n);
      row.grid_sup_series = std::numeric_limits<double>::quiet_NaN();
      if (validate_with_series) {
        double sup = 0.0;
        for (double x : grid) {
          const double target = nu == 0 ? 1.0 : (nu == 1 ? x : x * x);
          const RealFunction f = [nu](double t) {
            return nu == 0 ? 1.0 : (nu == 1 ? t : t * t);
          };
          sup = std::max(
              sup, std::abs(apply(f, n, params, x, spec, cfg) - target));
        }
        row.grid_sup_series = sup;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace pqk
