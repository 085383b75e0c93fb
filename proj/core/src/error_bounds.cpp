#include "pqk/error_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace pqk {

namespace {

std::vector<double> sample_grid(const RealFunction& f, double domain_end,
                                double grid_step, std::size_t* count) {
  if (!(domain_end > 0.0) || !(grid_step > 0.0)) {
    throw std::domain_error("modulus grid: domain_end and grid_step must be > 0");
  }
  const auto points =
      static_cast<std::size_t>(std::floor(domain_end / grid_step + 1e-9)) + 1;
  std::vector<double> values(points);
  for (std::size_t i = 0; i < points; ++i) {
    values[i] = f(static_cast<double>(i) * grid_step);
  }
  *count = points;
  return values;
}

/// For each index, max of values over the window [i-radius, i+radius]
/// (monotone-deque sliding maximum, linear time).
std::vector<double> window_max(const std::vector<double>& values,
                               std::size_t radius) {
  const std::size_t n = values.size();
  std::vector<double> out(n);
  std::deque<std::size_t> deq;
  std::size_t added = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (added < n && added <= i + radius) {
      while (!deq.empty() && values[deq.back()] <= values[added]) {
        deq.pop_back();
      }
      deq.push_back(added);
      ++added;
    }
    while (deq.front() + radius < i) deq.pop_front();
    out[i] = values[deq.front()];
  }
  return out;
}

}  // namespace

double modulus_of_continuity(const RealFunction& f, double delta,
                             double domain_end, double grid_step) {
  if (!(delta > 0.0)) {
    throw std::domain_error("modulus_of_continuity: delta must be > 0");
  }
  if (grid_step > delta / 8.0) {
    throw std::domain_error(
        "modulus_of_continuity: grid_step must be <= delta/8");
  }
  std::size_t points = 0;
  const std::vector<double> values = sample_grid(f, domain_end, grid_step, &points);
  // largest index offset with offset*step < delta (strict window)
  auto radius = static_cast<std::size_t>(std::floor(delta / grid_step));
  while (radius > 0 && static_cast<double>(radius) * grid_step >= delta) {
    --radius;
  }
  const std::vector<double> maxima = window_max(values, radius);
  double sup = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    sup = std::max(sup, maxima[i] - values[i]);
  }
  return sup;
}

double lipschitz_maximal(const RealFunction& f, double alpha, double x,
                         double domain_end, double grid_step) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::domain_error("lipschitz_maximal: alpha must lie in (0,1]");
  }
  if (!(x >= 0.0)) {
    throw std::domain_error("lipschitz_maximal: x must be >= 0");
  }
  if (!(domain_end > 0.0) || !(grid_step > 0.0)) {
    throw std::domain_error("lipschitz_maximal: bad grid");
  }
  const double fx = f(x);
  const auto points =
      static_cast<std::size_t>(std::floor(domain_end / grid_step + 1e-9)) + 1;
  double sup = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) * grid_step;
    const double dist = std::abs(t - x);
    if (dist < grid_step) continue;
    sup = std::max(sup, std::abs(f(t) - fx) / std::pow(dist, alpha));
  }
  return sup;
}

double measured_holder_constant(const RealFunction& f, double alpha,
                                double domain_end, double grid_step) {
  const auto points =
      static_cast<std::size_t>(std::floor(domain_end / grid_step + 1e-9)) + 1;
  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) * grid_step;
    best = std::max(best, std::pow(1.0 + x, alpha) *
                              lipschitz_maximal(f, alpha, x, domain_end,
                                                grid_step));
  }
  return 1.1 * best;
}

SetE SetE::halfline() { return SetE{Kind::full_halfline, {}, {}}; }

SetE SetE::finite(std::vector<double> points) {
  if (points.empty()) {
    throw std::domain_error("SetE::finite: needs at least one point");
  }
  for (double e : points) {
    if (!(e >= 0.0)) throw std::domain_error("SetE::finite: points must be >= 0");
  }
  return SetE{Kind::finite_points, std::move(points), {}};
}

SetE SetE::interval_list(std::vector<std::pair<double, double>> intervals) {
  if (intervals.empty()) {
    throw std::domain_error("SetE::interval_list: needs at least one interval");
  }
  for (const auto& [lo, hi] : intervals) {
    if (!(lo >= 0.0) || !(hi >= lo)) {
      throw std::domain_error("SetE::interval_list: requires 0 <= lo <= hi");
    }
  }
  return SetE{Kind::intervals, {}, std::move(intervals)};
}

double distance_to_set(double x, const SetE& set) {
  if (!(x >= 0.0)) throw std::domain_error("distance_to_set: x must be >= 0");
  switch (set.kind) {
    case SetE::Kind::full_halfline:
      return 0.0;
    case SetE::Kind::finite_points: {
      if (set.points.empty()) {
        throw std::domain_error("distance_to_set: empty point set");
      }
      double best = std::abs(x - set.points.front());
      for (double e : set.points) best = std::min(best, std::abs(x - e));
      return best;
    }
    case SetE::Kind::intervals: {
      if (set.intervals.empty()) {
        throw std::domain_error("distance_to_set: empty interval list");
      }
      double best = -1.0;
      for (const auto& [lo, hi] : set.intervals) {
        const double d = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
        best = best < 0.0 ? d : std::min(best, d);
      }
      return best;
    }
  }
  throw std::domain_error("distance_to_set: unknown set kind");
}

BoundCertificate modulus_certificate(const RealFunction& f,
                                     const std::string& f_id, std::int64_t n,
                                     const PQParams& params, double x,
                                     const BasisSpec& spec,
                                     const OperatorConfig& cfg,
                                     const ModulusConfig& mod_cfg) {
  const double delta = second_central_moment(n, params, x);
  const double root = std::sqrt(delta);
  const double lhs = std::abs(apply(f, n, params, x, spec, cfg) - f(x));

  BoundCertificate cert;
  cert.context = {"modulus", f_id, n, params.p, params.q, x};
  cert.lhs = lhs;
  double step = std::min(mod_cfg.grid_step, root / 8.0);
  for (int refinement = 0;; ++refinement) {
    cert.rhs = 2.0 * modulus_of_continuity(f, root, mod_cfg.domain_end, step);
    cert.slack = cert.rhs - cert.lhs;
    cert.holds = cert.slack >= -kCertificateSlackTol * (1.0 + std::abs(cert.rhs));
    cert.refinements_used = refinement;
    if (cert.holds || refinement >= mod_cfg.max_refinements) break;
    step *= 0.5;
  }
  return cert;
}

BoundCertificate lipschitz_certificate(const RealFunction& f,
                                       const std::string& f_id, double alpha,
                                       double M, const SetE& set,
                                       std::int64_t n, const PQParams& params,
                                       double x, const BasisSpec& spec,
                                       const OperatorConfig& cfg) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::domain_error("lipschitz_certificate: alpha must lie in (0,1]");
  }
  if (!(M > 0.0)) {
    throw std::domain_error("lipschitz_certificate: M must be positive");
  }
  const double delta = second_central_moment(n, params, x);
  const double dist = distance_to_set(x, set);

  BoundCertificate cert;
  cert.context = {"lipschitz", f_id, n, params.p, params.q, x};
  cert.lhs = std::abs(apply(f, n, params, x, spec, cfg) - f(x));
  cert.rhs = M * (std::pow(delta, 0.5 * alpha) + 2.0 * std::pow(dist, alpha));
  cert.slack = cert.rhs - cert.lhs;
  cert.holds = cert.slack >= -kCertificateSlackTol * (1.0 + std::abs(cert.rhs));
  cert.refinements_used = 0;
  return cert;
}

}  // namespace pqk
