#include "pqk/bivariate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>

#include "pqk/pq_core.hpp"

namespace pqk {

namespace {

std::vector<double> window_max(const std::vector<double>& values,
                               std::size_t radius) {
  const std::size_t n = values.size();
  std::vector<double> out(n);
  std::deque<std::size_t> deq;
  std::size_t added = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (added < n && added <= i + radius) {
      while (!deq.empty() && values[deq.back()] <= values[added])
        deq.pop_back();
      deq.push_back(added);
      ++added;
    }
    while (deq.front() + radius < i) deq.pop_front();
    out[i] = values[deq.front()];
  }
  return out;
}

std::size_t grid_points(double domain_end, double grid_step) {
  if (!(domain_end > 0.0) || !(grid_step > 0.0)) {
    throw std::domain_error(
        "bivariate grid: domain_end and grid_step must be > 0");
  }
  return static_cast<std::size_t>(
             std::floor(domain_end / grid_step + 1e-9)) +
         1;
}

// Largest index offset covered by the closed window |t - x| <= d.
std::size_t closed_radius(double d, double h) {
  return static_cast<std::size_t>(std::floor(d / h + 1e-9));
}

void validate_alpha(double alpha, const char* where) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::domain_error(std::string(where) +
                            ": alpha must lie in (0, 1]");
  }
}

std::vector<double> sample_surface(const BivariateFunction& f,
                                   std::size_t points, double h) {
  std::vector<double> values(points * points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) * h;
    for (std::size_t j = 0; j < points; ++j) {
      values[i * points + j] = f(t, static_cast<double>(j) * h);
    }
  }
  return values;
}

}  // namespace

BivariateFunction BivariateFunction::separable(
    std::vector<SeparableTerm> terms) {
  if (terms.empty()) {
    throw std::domain_error("BivariateFunction::separable: no terms");
  }
  for (const auto& term : terms) {
    if (!term.g || !term.h) {
      throw std::domain_error("BivariateFunction::separable: empty factor");
    }
  }
  BivariateFunction out;
  out.terms_ = std::move(terms);
  return out;
}

BivariateFunction BivariateFunction::generic(
    std::function<double(double, double)> f) {
  if (!f) {
    throw std::domain_error("BivariateFunction::generic: empty function");
  }
  BivariateFunction out;
  out.f_ = std::move(f);
  return out;
}

double BivariateFunction::operator()(double t, double s) const {
  if (!terms_.empty()) {
    detail::KahanSum acc;
    for (const auto& term : terms_) acc.add(term.g(t) * term.h(s));
    return acc.value();
  }
  return f_(t, s);
}

double apply_bivariate(const BivariateFunction& f, std::int64_t n1,
                       std::int64_t n2, const PQParams& params1,
                       const PQParams& params2, double x, double y,
                       const BasisSpec& spec, const OperatorConfig& cfg) {
  if (f.is_separable()) {
    detail::KahanSum acc;
    for (const auto& term : f.terms()) {
      const double gx = apply(term.g, n1, params1, x, spec, cfg);
      const double hy = apply(term.h, n2, params2, y, spec, cfg);
      acc.add(gx * hy);
    }
    return acc.value();
  }
  const auto nodes_x = detail::operator_node_list(n1, params1, x, spec, cfg);
  const auto nodes_y = detail::operator_node_list(n2, params2, y, spec, cfg);
  detail::KahanSum outer;
  for (const auto& nx : nodes_x) {
    detail::KahanSum inner;
    for (const auto& ny : nodes_y) inner.add(ny.weight * f(nx.t, ny.t));
    outer.add(nx.weight * inner.value());
  }
  return outer.value();
}

double bivariate_moment_closed_form(int i, std::int64_t n1, std::int64_t n2,
                                    const PQParams& params1,
                                    const PQParams& params2, double x,
                                    double y) {
  switch (i) {
    case 0:
      return 1.0;
    case 1:
      return moment_closed_form(1, n1, params1, x);
    case 2:
      return moment_closed_form(1, n2, params2, y);
    case 3:
      return moment_closed_form(2, n1, params1, x) +
             moment_closed_form(2, n2, params2, y);
    default:
      throw std::domain_error(
          "bivariate_moment_closed_form: i must be one of 0, 1, 2, 3");
  }
}

double bivariate_modulus(const BivariateFunction& f, double d1, double d2,
                         double domain_end, double grid_step) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw std::domain_error("bivariate_modulus: deltas must be > 0");
  }
  if (grid_step > std::min(d1, d2) / 8.0) {
    throw std::domain_error(
        "bivariate_modulus: grid_step must be <= min(d1,d2)/8");
  }
  const std::size_t points = grid_points(domain_end, grid_step);
  const std::vector<double> values = sample_surface(f, points, grid_step);
  const std::size_t r1 = closed_radius(d1, grid_step);
  const std::size_t r2 = closed_radius(d2, grid_step);

  // Separable max filter: sweep rows with the s-radius, then columns with
  // the t-radius.
  std::vector<double> rows(points * points);
  std::vector<double> line(points);
  for (std::size_t i = 0; i < points; ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i * points),
                points, line.begin());
    const std::vector<double> m = window_max(line, r2);
    std::copy_n(m.begin(), points,
                rows.begin() + static_cast<std::ptrdiff_t>(i * points));
  }
  double sup = 0.0;
  std::vector<double> column(points);
  for (std::size_t j = 0; j < points; ++j) {
    for (std::size_t i = 0; i < points; ++i) column[i] = rows[i * points + j];
    const std::vector<double> m = window_max(column, r1);
    for (std::size_t i = 0; i < points; ++i) {
      sup = std::max(sup, m[i] - values[i * points + j]);
    }
  }
  return sup;
}

double bivariate_lipschitz_maximal(const BivariateFunction& f, double alpha1,
                                   double alpha2, double x, double y,
                                   double domain_end, double grid_step) {
  validate_alpha(alpha1, "bivariate_lipschitz_maximal");
  validate_alpha(alpha2, "bivariate_lipschitz_maximal");
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::domain_error("bivariate_lipschitz_maximal: x, y must be >= 0");
  }
  const std::size_t points = grid_points(domain_end, grid_step);
  const double fxy = f(x, y);

  // Inverse distance powers per axis; 0 marks an excluded strip.
  std::vector<double> inv_t(points, 0.0);
  std::vector<double> inv_s(points, 0.0);
  for (std::size_t i = 0; i < points; ++i) {
    const double g = static_cast<double>(i) * grid_step;
    const double dt = std::abs(g - x);
    if (dt >= grid_step) inv_t[i] = 1.0 / std::pow(dt, alpha1);
    const double ds = std::abs(g - y);
    if (ds >= grid_step) inv_s[i] = 1.0 / std::pow(ds, alpha2);
  }

  double sup = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    if (inv_t[i] == 0.0) continue;
    const double t = static_cast<double>(i) * grid_step;
    for (std::size_t j = 0; j < points; ++j) {
      if (inv_s[j] == 0.0) continue;
      const double s = static_cast<double>(j) * grid_step;
      sup = std::max(sup, std::abs(f(t, s) - fxy) * inv_t[i] * inv_s[j]);
    }
  }
  return sup;
}

double measured_holder_constant_2d(const BivariateFunction& f, double alpha1,
                                   double alpha2, double domain_end,
                                   double grid_step) {
  validate_alpha(alpha1, "measured_holder_constant_2d");
  validate_alpha(alpha2, "measured_holder_constant_2d");
  const std::size_t points = grid_points(domain_end, grid_step);
  const std::vector<double> values = sample_surface(f, points, grid_step);

  std::vector<double> inv_t(points, 0.0);
  std::vector<double> inv_s(points, 0.0);
  for (std::size_t d = 1; d < points; ++d) {
    const double dist = static_cast<double>(d) * grid_step;
    inv_t[d] = 1.0 / std::pow(dist, alpha1);
    inv_s[d] = 1.0 / std::pow(dist, alpha2);
  }

  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double wt = std::pow(1.0 + static_cast<double>(i) * grid_step,
                               alpha1);
    for (std::size_t j = 0; j < points; ++j) {
      const double fxy = values[i * points + j];
      double local = 0.0;
      for (std::size_t k = 0; k < points; ++k) {
        const std::size_t dk = k > i ? k - i : i - k;
        if (dk == 0) continue;
        const double row_scale = inv_t[dk];
        const double* row = values.data() + k * points;
        for (std::size_t l = 0; l < points; ++l) {
          const std::size_t dl = l > j ? l - j : j - l;
          if (dl == 0) continue;
          local = std::max(local,
                           std::abs(row[l] - fxy) * row_scale * inv_s[dl]);
        }
      }
      const double ws = std::pow(1.0 + static_cast<double>(j) * grid_step,
                                 alpha2);
      best = std::max(best, wt * ws * local);
    }
  }
  return 1.1 * best;
}

BivariateBoundCertificate bivariate_modulus_certificate(
    const BivariateFunction& f, const std::string& f_id, std::int64_t n1,
    std::int64_t n2, const PQParams& params1, const PQParams& params2,
    double x, double y, const BasisSpec& spec, const OperatorConfig& cfg,
    const ModulusConfig& mod_cfg) {
  const double delta1 = second_central_moment(n1, params1, x);
  const double delta2 = second_central_moment(n2, params2, y);
  const double root1 = std::sqrt(delta1);
  const double root2 = std::sqrt(delta2);

  BivariateBoundCertificate cert;
  cert.context.theorem = "modulus-2d";
  cert.context.f_id = f_id;
  cert.context.n1 = n1;
  cert.context.n2 = n2;
  cert.context.p1 = params1.p;
  cert.context.q1 = params1.q;
  cert.context.p2 = params2.p;
  cert.context.q2 = params2.q;
  cert.context.x = x;
  cert.context.y = y;

  const double value = apply_bivariate(f, n1, n2, params1, params2, x, y,
                                       spec, cfg);
  cert.lhs = std::abs(value - f(x, y));

  double step = std::min(mod_cfg.grid_step, std::min(root1, root2) / 8.0);
  int refinements = 0;
  for (;;) {
    const double w =
        bivariate_modulus(f, root1, root2, mod_cfg.domain_end, step);
    cert.rhs = 4.0 * w;
    cert.slack = cert.rhs - cert.lhs;
    cert.holds =
        cert.slack >= -kCertificateSlackTol * (1.0 + std::abs(cert.rhs));
    cert.refinements_used = refinements;
    if (cert.holds || refinements >= mod_cfg.max_refinements) break;
    step *= 0.5;
    ++refinements;
  }
  cert.holds_with_doubled_constant =
      !cert.holds &&
      cert.lhs <=
          2.0 * cert.rhs + kCertificateSlackTol * (1.0 + std::abs(cert.rhs));
  return cert;
}

BivariateBoundCertificate bivariate_lipschitz_certificate(
    const BivariateFunction& f, const std::string& f_id, double alpha1,
    double alpha2, double M, const SetE& set, std::int64_t n1,
    std::int64_t n2, const PQParams& params1, const PQParams& params2,
    double x, double y, const BasisSpec& spec, const OperatorConfig& cfg) {
  validate_alpha(alpha1, "bivariate_lipschitz_certificate");
  validate_alpha(alpha2, "bivariate_lipschitz_certificate");
  if (!(M > 0.0)) {
    throw std::domain_error("bivariate_lipschitz_certificate: M must be > 0");
  }
  const double delta1 = second_central_moment(n1, params1, x);
  const double delta2 = second_central_moment(n2, params2, y);
  const double dx = distance_to_set(x, set);
  const double dy = distance_to_set(y, set);
  const double rate1 = std::pow(delta1, alpha1 / 2.0);
  const double rate2 = std::pow(delta2, alpha2 / 2.0);
  const double off_x = std::pow(dx, alpha1);
  const double off_y = std::pow(dy, alpha2);

  BivariateBoundCertificate cert;
  cert.context.theorem = "lipschitz-2d";
  cert.context.f_id = f_id;
  cert.context.n1 = n1;
  cert.context.n2 = n2;
  cert.context.p1 = params1.p;
  cert.context.q1 = params1.q;
  cert.context.p2 = params2.p;
  cert.context.q2 = params2.q;
  cert.context.x = x;
  cert.context.y = y;
  cert.context.alpha1 = alpha1;
  cert.context.alpha2 = alpha2;

  const double value = apply_bivariate(f, n1, n2, params1, params2, x, y,
                                       spec, cfg);
  cert.lhs = std::abs(value - f(x, y));
  cert.rhs = M * (rate1 * rate2 + rate1 * off_y + rate2 * off_x +
                  2.0 * off_x * off_y);
  cert.slack = cert.rhs - cert.lhs;
  cert.holds =
      cert.slack >= -kCertificateSlackTol * (1.0 + std::abs(cert.rhs));
  cert.holds_with_doubled_constant =
      !cert.holds &&
      cert.lhs <=
          2.0 * cert.rhs + kCertificateSlackTol * (1.0 + std::abs(cert.rhs));
  cert.refinements_used = 0;
  return cert;
}

}  // namespace pqk
