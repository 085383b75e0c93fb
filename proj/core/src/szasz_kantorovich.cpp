#include "pqk/szasz_kantorovich.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pqk {

namespace {

void validate_common(std::int64_t n, double x, const OperatorConfig& cfg) {
  if (n < 1) throw std::domain_error("operator: requires n >= 1");
  if (!(x >= 0.0)) throw std::domain_error("operator: requires x >= 0");
  if (!(cfg.series_tol > 0.0) || cfg.series_tol >= 1.0 ||
      !(cfg.integral_tol > 0.0) || cfg.integral_tol >= 1.0) {
    throw std::domain_error("operator: tolerances must lie in (0,1)");
  }
  if (cfg.max_terms < 8) {
    throw std::domain_error("operator: max_terms must be at least 8");
  }
}

double triangular_base(const PQParams& params, const BasisSpec& spec) {
  if (params.classical) return 1.0;
  return spec.power_coefficient == BasisSpec::TriangularPower::q_power
             ? params.q
             : params.p;
}

}  // namespace

KantorovichCell kantorovichCell_impl(std::int64_t n, std::int64_t k,
                                     const PQParams& params) {
  const double bn = pq_integer(n, params);
  if (params.classical) {
    return {static_cast<double>(k) / bn, static_cast<double>(k + 1) / bn};
  }
  double bracket = 0.0;  // [j]
  double ppow = 1.0;
  double qpow = 1.0;  // q^j
  for (std::int64_t j = 0; j < k; ++j) {
    bracket = params.q * bracket + ppow;
    ppow *= params.p;
    qpow *= params.q;
  }
  // here bracket = [k], qpow = q^k, ppow = p^k
  const double bracket_next = params.q * bracket + ppow;
  const double lower = k == 0 ? 0.0 : bracket * params.q / (qpow * bn);
  const double upper = bracket_next / (qpow * bn);
  return {lower, upper};
}

KantorovichCell kantorovich_cell(std::int64_t n, std::int64_t k,
                                 const PQParams& params) {
  if (n < 1) throw std::domain_error("kantorovich_cell: requires n >= 1");
  if (k < 0) throw std::domain_error("kantorovich_cell: requires k >= 0");
  return kantorovichCell_impl(n, k, params);
}

double basis_weight(std::int64_t n, std::int64_t k, const PQParams& params,
                    double x, const BasisSpec& spec, const OperatorConfig& cfg) {
  validate_common(n, x, cfg);
  if (k < 0) throw std::domain_error("basis_weight: requires k >= 0");
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  const double a = pq_integer(n, params) * x;
  if (params.classical) {
    return std::exp(static_cast<double>(k) * std::log(a) -
                    std::lgamma(static_cast<double>(k) + 1.0) - a);
  }
  const double normalizer =
      pq_exponential(a, spec.exponential_kind, params, 1e-15);
  const double kd = static_cast<double>(k);
  const double logw = kd * (std::log(params.q) - std::log(params.p)) +
                      0.5 * kd * (kd - 1.0) * std::log(triangular_base(params, spec)) +
                      kd * std::log(a) - pq_log_factorial(k, params) -
                      std::log(normalizer);
  return std::exp(logw);
}

double apply(const RealFunction& f, std::int64_t n, const PQParams& params,
             double x, const BasisSpec& spec, const OperatorConfig& cfg,
             ApplyDiagnostics* diagnostics) {
  validate_common(n, x, cfg);
  ApplyDiagnostics scratch;
  ApplyDiagnostics* dg = diagnostics ? diagnostics : &scratch;
  *dg = {};

  const double p = params.p, q = params.q;
  const double bn = pq_integer(n, params);
  const double a = bn * x;
  const double cell_tol = cfg.integral_tol / (2.0 * std::max(1.0, bn));

  auto note_cell = [&](double cell) {
    if (cell < 0.0) {
      ++dg->negative_cells;
      if (cfg.negative_cell_policy == NegativeCellPolicy::error) {
        throw std::domain_error("apply: negative cell integral");
      }
    }
  };

  if (x == 0.0) {
    // Only the k = 0 weight survives; cell_0 = [0, 1/[n]].
    const double upper = 1.0 / bn;
    const double cell =
        params.classical
            ? detail::adaptive_simpson(f, 0.0, upper, cell_tol)
            : pq_integral_from_zero(f, upper, params, cell_tol);
    note_cell(cell);
    dg->terms_used = 1;
    return bn * cell;
  }

  double w;  // w_k, starting from 1/N([n]x)
  if (params.classical) {
    w = std::exp(-a);
  } else {
    w = 1.0 / pq_exponential(a, spec.exponential_kind, params, 1e-15);
  }
  const double base = triangular_base(params, spec);
  const double w_ratio_extra = params.classical ? 1.0 : q / p;

  detail::KahanSum acc;
  double bracket = 0.0;    // [k]
  double ppow = 1.0;       // p^k
  double qpow = 1.0;       // q^k
  double basepow = 1.0;    // base^k
  double boundary = 0.0;   // B_k
  double from_zero = 0.0;  // F(B_k)
  double s = w;            // s_k = (p/q)^k w_k, the normalized basis value
  double favg_max = 1.0;   // running max of |cell| / cell measure
  int small_streak = 0;

  for (std::size_t k = 0;; ++k) {
    if (k >= cfg.max_terms) {
      throw numerical_error("apply: series budget exhausted", k);
    }
    const double bracket_next =
        params.classical ? static_cast<double>(k + 1) : q * bracket + ppow;
    double boundary_next, cell;
    if (params.classical) {
      boundary_next = static_cast<double>(k + 1) / bn;
      cell = detail::adaptive_simpson(f, boundary, boundary_next, cell_tol);
    } else {
      boundary_next = bracket_next / (qpow * bn);
      const double from_zero_next =
          pq_integral_from_zero(f, boundary_next, params, cell_tol);
      cell = from_zero_next - from_zero;
      from_zero = from_zero_next;
    }
    note_cell(cell);
    const double term = bn * w * cell;
    acc.add(term);
    dg->terms_used = k + 1;

    const double measure = params.classical ? 1.0 / bn : ppow / (qpow * bn);
    favg_max = std::max(favg_max, std::abs(cell) / measure);

    // s_{k+1}/s_k, strictly decreasing in k.
    const double rho = basepow * a / bracket_next;
    const double scale = std::max(1.0, std::abs(acc.value()));
    small_streak =
        std::abs(term) <= cfg.series_tol * scale ? small_streak + 1 : 0;
    if (rho < 1.0) {
      const double weight_tail = s * rho / (1.0 - rho) * favg_max;
      if (weight_tail <= cfg.series_tol * scale && small_streak >= 2) break;
    }

    w *= w_ratio_extra * rho;
    s *= rho;
    bracket = bracket_next;
    ppow *= p;
    qpow *= q;
    basepow *= base;
    boundary = boundary_next;
  }
  return acc.value();
}

double moment_closed_form(int nu, std::int64_t n, const PQParams& params,
                          double x) {
  if (nu < 0 || nu > 2) {
    throw std::domain_error("moment_closed_form: nu must be 0, 1 or 2");
  }
  if (n < 1) throw std::domain_error("moment_closed_form: requires n >= 1");
  if (nu == 0) return 1.0;
  const double p = params.p, q = params.q;
  const double bn = pq_integer(n, params);
  const double b2 = pq_integer(2, params);
  if (nu == 1) return x / q + 1.0 / (b2 * bn);
  const double b3 = pq_integer(3, params);
  return (p / (q * q * q)) * x * x +
         ((p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn)) * x +
         1.0 / (b3 * bn * bn);
}

double second_central_moment(std::int64_t n, const PQParams& params, double x) {
  if (n < 1) throw std::domain_error("second_central_moment: requires n >= 1");
  const double p = params.p, q = params.q;
  const double bn = pq_integer(n, params);
  const double b2 = pq_integer(2, params);
  const double b3 = pq_integer(3, params);
  const double a2 = p / (q * q * q) - 2.0 / q + 1.0;
  const double a1 = (p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn) -
                    2.0 / (b2 * bn);
  const double a0 = 1.0 / (b3 * bn * bn);
  return a2 * x * x + a1 * x + a0;
}

namespace detail {

namespace {

/// Degree-2 growth envelope standing in for sup|f| in f-independent cutoffs.
double growth_guard(double t) { return (1.0 + t) * (1.0 + t); }

void append_jackson_nodes(std::vector<QuadratureNode>* nodes, double coeff,
                          double endpoint, const PQParams& params, double tol) {
  if (coeff == 0.0 || endpoint == 0.0) return;
  const double p = params.p, q = params.q;
  const double r = q / p;
  double node = endpoint / p;
  double weight = (p - q) * endpoint / p;
  const double guard = growth_guard(node);
  for (std::size_t j = 0; j < kIntegralNodeBudget; ++j) {
    nodes->push_back({node, coeff * weight});
    if (std::abs(coeff) * weight * r / (1.0 - r) * guard < tol) return;
    node *= r;
    weight *= r;
  }
  throw numerical_error("operator_node_list: node budget exhausted",
                        kIntegralNodeBudget);
}

void append_simpson_nodes(std::vector<QuadratureNode>* nodes, double coeff,
                          double lower, double upper) {
  constexpr int kSubintervals = 32;  // even
  const double h = (upper - lower) / kSubintervals;
  for (int i = 0; i <= kSubintervals; ++i) {
    double c = (i == 0 || i == kSubintervals) ? 1.0
               : (i % 2 == 1)                 ? 4.0
                                              : 2.0;
    nodes->push_back({lower + i * h, coeff * c * h / 3.0});
  }
}

}  // namespace

std::vector<QuadratureNode> operator_node_list(std::int64_t n,
                                               const PQParams& params,
                                               double x, const BasisSpec& spec,
                                               const OperatorConfig& cfg) {
  validate_common(n, x, cfg);
  const double p = params.p, q = params.q;
  const double bn = pq_integer(n, params);
  const double a = bn * x;
  std::vector<QuadratureNode> nodes;

  if (x == 0.0) {
    const double upper = 1.0 / bn;
    if (params.classical) {
      append_simpson_nodes(&nodes, bn, 0.0, upper);
    } else {
      append_jackson_nodes(&nodes, bn, upper, params, cfg.integral_tol);
    }
    return nodes;
  }

  double w;
  if (params.classical) {
    w = std::exp(-a);
  } else {
    w = 1.0 / pq_exponential(a, spec.exponential_kind, params, 1e-15);
  }
  const double base = triangular_base(params, spec);
  const double w_ratio_extra = params.classical ? 1.0 : q / p;
  const double ptoq = params.classical ? 1.0 : p / q;

  // Collect weights and shared cell boundaries until the growth-guarded tail
  // of the remaining basis mass is negligible.
  std::vector<double> weights;
  std::vector<double> boundaries;  // B_1..B_{K+1}
  double bracket = 0.0, ppow = 1.0, qpow = 1.0, basepow = 1.0;
  double s = w;
  for (std::size_t k = 0;; ++k) {
    if (k >= cfg.max_terms) {
      throw numerical_error("operator_node_list: series budget exhausted", k);
    }
    const double bracket_next =
        params.classical ? static_cast<double>(k + 1) : q * bracket + ppow;
    const double boundary_next = params.classical
                                     ? static_cast<double>(k + 1) / bn
                                     : bracket_next / (qpow * bn);
    weights.push_back(w);
    boundaries.push_back(boundary_next);

    const double rho = basepow * a / bracket_next;
    const double rho_grown = rho * ptoq * ptoq;
    if (rho_grown < 1.0) {
      const double tail =
          s * rho_grown / (1.0 - rho_grown) * growth_guard(boundary_next);
      if (tail < cfg.series_tol * 1e-2) break;
    }
    w *= w_ratio_extra * rho;
    s *= rho;
    bracket = bracket_next;
    ppow *= p;
    qpow *= q;
    basepow *= base;
  }

  const std::size_t cells = weights.size();
  if (params.classical) {
    double lower = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      append_simpson_nodes(&nodes, bn * weights[k], lower, boundaries[k]);
      lower = boundaries[k];
    }
  } else {
    // Telescope: sum_k w_k (F(B_{k+1}) - F(B_k)) =
    //   sum_{m=1}^{K} (w_{m-1} - w_m) F(B_m) + w_K F(B_{K+1}).
    for (std::size_t m = 1; m <= cells; ++m) {
      const double coeff =
          m == cells ? bn * weights[m - 1]
                     : bn * (weights[m - 1] - weights[m]);
      const double tol_m =
          cfg.integral_tol / (static_cast<double>(m + 2) * (m + 2));
      append_jackson_nodes(&nodes, coeff, boundaries[m - 1], params, tol_m);
    }
  }

  // Drop negligible nodes; the dropped mass stays below
  // series_tol * 1e-3 * sum|weight|.
  double abs_sum = 0.0;
  for (const auto& node : nodes) abs_sum += std::abs(node.weight);
  const double threshold =
      cfg.series_tol * 1e-3 * abs_sum / std::max<std::size_t>(nodes.size(), 1);
  std::erase_if(nodes, [threshold](const QuadratureNode& node) {
    return std::abs(node.weight) < threshold;
  });
  return nodes;
}

}  // namespace detail

}  // namespace pqk
