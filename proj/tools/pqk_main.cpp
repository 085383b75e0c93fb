#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cli_util.hpp"
#include "pqk/bivariate.hpp"
#include "pqk/error_bounds.hpp"
#include "pqk/errors.hpp"
#include "pqk/pq_core.hpp"
#include "pqk/statistical_limits.hpp"
#include "pqk/szasz_kantorovich.hpp"

namespace {

using pqk::cli::format_bool;
using pqk::cli::format_double;

using ConfigPairs = std::vector<std::pair<std::string, std::string>>;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool is_set(double v) { return !std::isnan(v); }

/// Rows go to --out (plus a JSON sidecar) with the summary on stdout, or to
/// stdout with the summary on stderr so piped CSV stays clean.
void emit(const std::string& out_path, const std::string& subcommand,
          const std::vector<std::string>& header,
          const std::vector<std::vector<std::string>>& rows,
          const ConfigPairs& config, const std::string& summary) {
  if (out_path.empty()) {
    pqk::cli::write_csv(std::cout, header, rows);
    std::cerr << summary << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::domain_error("cannot open " + out_path);
  pqk::cli::write_csv(out, header, rows);
  out.flush();
  if (!out) throw std::domain_error("failed writing " + out_path);
  pqk::cli::write_json_sidecar(out_path, subcommand, config);
  std::cout << summary << '\n';
}

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = csv.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(csv.substr(start));
      return out;
    }
    out.push_back(csv.substr(start, pos - start));
    start = pos + 1;
  }
}

pqk::SetE parse_set(const std::string& kind, const std::string& points,
                    const std::string& intervals) {
  if (kind == "halfline") return pqk::SetE::halfline();
  if (kind == "points") {
    return pqk::SetE::finite(pqk::cli::parse_double_list(points));
  }
  if (kind == "intervals") {
    std::vector<std::pair<double, double>> list;
    for (const std::string& part : split_ids(intervals)) {
      const std::size_t colon = part.find(':');
      if (colon == std::string::npos) {
        throw std::domain_error("intervals: expected 'a:b[,c:d...]', got '" +
                                intervals + "'");
      }
      const std::vector<double> lo =
          pqk::cli::parse_double_list(part.substr(0, colon));
      const std::vector<double> hi =
          pqk::cli::parse_double_list(part.substr(colon + 1));
      if (lo.size() != 1 || hi.size() != 1) {
        throw std::domain_error("intervals: expected 'a:b[,c:d...]', got '" +
                                intervals + "'");
      }
      list.emplace_back(lo[0], hi[0]);
    }
    return pqk::SetE::interval_list(std::move(list));
  }
  throw std::domain_error("unknown set '" + kind +
                          "' (known: halfline, points, intervals)");
}

// ---------------------------------------------------------------- moments

struct MomentsOpts {
  std::int64_t n = 10;
  double p = 1.0;
  double q = 1.0;
  std::string x = "0:2:0.5";
  int nu = -1;
  std::string out;
};

int run_moments(const MomentsOpts& o) {
  const pqk::PQParams params = pqk::PQParams::make(o.p, o.q);
  const std::vector<double> xs = pqk::cli::parse_grid(o.x);
  std::vector<int> nus;
  if (o.nu < 0) {
    nus = {0, 1, 2};
  } else if (o.nu <= 2) {
    nus = {o.nu};
  } else {
    throw std::domain_error("moments: --nu must be one of 0, 1, 2");
  }
  const auto monomial = [](int nu) -> pqk::RealFunction {
    if (nu == 0) return [](double) { return 1.0; };
    if (nu == 1) return [](double t) { return t; };
    return [](double t) { return t * t; };
  };

  std::vector<std::vector<std::string>> rows;
  double max_diff = 0.0;
  for (const double x : xs) {
    for (const int nu : nus) {
      const double closed = pqk::moment_closed_form(nu, o.n, params, x);
      const double value = pqk::apply(monomial(nu), o.n, params, x);
      const double diff = std::abs(closed - value);
      max_diff = std::max(max_diff, diff);
      rows.push_back({std::to_string(o.n), format_double(params.p),
                      format_double(params.q), format_double(x),
                      std::to_string(nu), format_double(closed),
                      format_double(value), format_double(diff)});
    }
  }

  const ConfigPairs config = {
      {"n", std::to_string(o.n)},       {"p", format_double(o.p)},
      {"q", format_double(o.q)},        {"x", o.x},
      {"nu", o.nu < 0 ? std::string("0,1,2") : std::to_string(o.nu)},
      {"out", o.out}};
  emit(o.out, "moments",
       {"n", "p", "q", "x", "nu", "closed_form", "operator_value",
        "abs_diff"},
       rows, config,
       "moments: n=" + std::to_string(o.n) + ", " +
           std::to_string(rows.size()) +
           " rows, max |closed - operator| = " + format_double(max_diff));
  return 0;
}

// ---------------------------------------------------------------- converge

struct ConvergeOpts {
  std::string scheme = "smooth";
  std::string n_list = "10,20,50,100";
  std::string grid = "0:2:0.05";
  double eps = 0.01;
  std::string horizons = "1000,10000,100000,1000000";
  bool validate = false;
  std::string out;
};

int run_converge(const ConvergeOpts& o) {
  const pqk::ParamSequenceScheme scheme = pqk::cli::scheme_by_name(o.scheme);
  const std::vector<std::int64_t> ns = pqk::cli::parse_int_list(o.n_list);
  const std::vector<double> xs = pqk::cli::parse_grid(o.grid);
  const std::vector<std::int64_t> horizons =
      pqk::cli::parse_int_list(o.horizons);
  const pqk::KorovkinReport report = pqk::korovkin_statistical_report(
      scheme, ns, xs, {}, {}, o.eps, horizons, o.validate);

  std::vector<std::vector<std::string>> rows;
  double max_deviation = 0.0;
  for (const pqk::KorovkinRow& row : report.rows) {
    rows.push_back({std::to_string(row.n), format_double(row.p),
                    format_double(row.q), std::to_string(row.nu),
                    format_double(row.grid_sup), format_double(o.eps),
                    format_double(row.exception_density)});
    if (o.validate && !std::isnan(row.grid_sup_series)) {
      max_deviation = std::max(max_deviation,
                               std::abs(row.grid_sup - row.grid_sup_series));
    }
  }

  std::string summary = "converge: scheme=" + o.scheme + ", " +
                        std::to_string(rows.size()) +
                        " rows, eps=" + format_double(o.eps);
  if (!report.horizon_densities[1].empty()) {
    const pqk::DensityReport& last1 = report.horizon_densities[1].back();
    const pqk::DensityReport& last2 = report.horizon_densities[2].back();
    summary += "; exception density at N=" + std::to_string(last1.horizon) +
               ": nu1=" + format_double(last1.density_estimate) +
               ", nu2=" + format_double(last2.density_estimate);
  }
  if (o.validate) {
    summary += "; max closed-vs-series deviation = " +
               format_double(max_deviation);
  }

  const ConfigPairs config = {{"scheme", o.scheme},
                              {"n-list", o.n_list},
                              {"grid", o.grid},
                              {"eps", format_double(o.eps)},
                              {"horizons", o.horizons},
                              {"validate", format_bool(o.validate)},
                              {"out", o.out}};
  emit(o.out, "converge",
       {"n", "p_n", "q_n", "nu", "grid_sup", "eps", "exception_density"},
       rows, config, summary);
  return 0;
}

// -------------------------------------------------------------------- stat

struct StatOpts {
  std::string sequence = "q_n";
  std::string scheme = "disturbed-squares";
  double L = kUnset;
  double eps = 0.1;
  std::int64_t N = 1000000;
  double x = 1.0;
  double xmax = 2.0;
  std::string out;
};

int run_stat(const StatOpts& o) {
  const pqk::ParamSequenceScheme scheme = pqk::cli::scheme_by_name(o.scheme);
  pqk::RealSequence sequence;
  double default_L = 0.0;
  if (o.sequence == "q_n") {
    sequence = [scheme](std::int64_t k) { return scheme.at(k).q; };
    default_L = 1.0;
  } else if (o.sequence == "p_n") {
    sequence = [scheme](std::int64_t k) { return scheme.at(k).p; };
    default_L = 1.0;
  } else if (o.sequence == "sup_nu1") {
    const double xmax = o.xmax;
    sequence = [scheme, xmax](std::int64_t k) {
      const pqk::PQParams pr = scheme.at(k);
      return std::abs(1.0 / pr.q - 1.0) * xmax +
             1.0 / (pq_integer(2, pr) * pq_integer(k, pr));
    };
    default_L = 0.0;
  } else if (o.sequence == "delta_at") {
    const double x = o.x;
    sequence = [scheme, x](std::int64_t k) {
      return pqk::second_central_moment(k, scheme.at(k), x);
    };
    default_L = 0.0;
  } else {
    throw std::domain_error(
        "unknown sequence '" + o.sequence +
        "' (known: q_n, p_n, sup_nu1, delta_at)");
  }
  const double L = is_set(o.L) ? o.L : default_L;
  const pqk::DensityReport report =
      pqk::stat_limit_check(sequence, L, o.eps, o.N);

  const std::vector<std::vector<std::string>> rows = {
      {o.sequence, o.scheme, format_double(L), format_double(o.eps),
       std::to_string(o.N), std::to_string(report.exception_count),
       format_double(report.density_estimate)}};
  const ConfigPairs config = {
      {"sequence", o.sequence}, {"scheme", o.scheme},
      {"L", format_double(L)},  {"eps", format_double(o.eps)},
      {"N", std::to_string(o.N)}, {"x", format_double(o.x)},
      {"xmax", format_double(o.xmax)}, {"out", o.out}};
  emit(o.out, "stat",
       {"sequence", "scheme", "L", "eps", "N", "exception_count", "density"},
       rows, config,
       "stat: sequence=" + o.sequence + " scheme=" + o.scheme + ": " +
           std::to_string(report.exception_count) + " exceptions of " +
           std::to_string(o.N) +
           " (density " + format_double(report.density_estimate) + ")");
  return 0;
}

// ------------------------------------------------------------------- bound

struct BoundOpts {
  std::string theorem = "both";
  std::string funcs = "t,t2,exp_neg,t_over_1pt";
  std::string n_list = "5,10,20,50";
  std::string scheme = "smooth";
  double p = kUnset;
  double q = kUnset;
  std::string x = "0:2:0.5";
  double alpha = 0.5;
  std::string set = "halfline";
  std::string points = "1,2";
  std::string intervals = "";
  double M = kUnset;
  std::string out;
};

int run_bound(const BoundOpts& o) {
  const bool want_modulus = o.theorem == "modulus" || o.theorem == "both";
  const bool want_lipschitz = o.theorem == "lipschitz" || o.theorem == "both";
  if (!want_modulus && !want_lipschitz) {
    throw std::domain_error("bound: --theorem must be modulus, lipschitz or both");
  }
  if (is_set(o.p) != is_set(o.q)) {
    throw std::domain_error("bound: --p and --q must be given together");
  }
  const bool fixed_params = is_set(o.p);
  const pqk::PQParams fixed =
      fixed_params ? pqk::PQParams::make(o.p, o.q) : pqk::PQParams::classical_limit();
  const pqk::ParamSequenceScheme scheme = pqk::cli::scheme_by_name(o.scheme);
  const std::vector<std::int64_t> ns = pqk::cli::parse_int_list(o.n_list);
  const std::vector<double> xs = pqk::cli::parse_grid(o.x);
  const pqk::SetE set = parse_set(o.set, o.points, o.intervals);

  std::vector<const pqk::cli::NamedFunction*> funcs;
  for (const std::string& id : split_ids(o.funcs)) {
    funcs.push_back(&pqk::cli::find_univariate(id));
  }
  std::map<std::string, double> class_constants;
  if (want_lipschitz) {
    for (const auto* fn : funcs) {
      class_constants[fn->id] = is_set(o.M)
                                    ? o.M
                                    : pqk::measured_holder_constant(fn->f, o.alpha);
    }
  }

  struct Task {
    bool lipschitz;
    const pqk::cli::NamedFunction* fn;
    std::int64_t n;
    double x;
  };
  std::vector<Task> tasks;
  for (const bool lipschitz : {false, true}) {
    if (lipschitz ? !want_lipschitz : !want_modulus) continue;
    for (const auto* fn : funcs) {
      for (const std::int64_t n : ns) {
        for (const double x : xs) tasks.push_back({lipschitz, fn, n, x});
      }
    }
  }

  std::vector<std::vector<std::string>> rows(tasks.size());
  std::vector<int> refinements(tasks.size(), 0);
  std::vector<char> held(tasks.size(), 0);
  pqk::cli::parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const pqk::PQParams params = fixed_params ? fixed : scheme.at(task.n);
    const pqk::BoundCertificate cert =
        task.lipschitz
            ? pqk::lipschitz_certificate(task.fn->f, task.fn->id, o.alpha,
                                         class_constants.at(task.fn->id), set,
                                         task.n, params, task.x)
            : pqk::modulus_certificate(task.fn->f, task.fn->id, task.n,
                                       params, task.x);
    refinements[i] = cert.refinements_used;
    held[i] = cert.holds ? 1 : 0;
    rows[i] = {cert.context.theorem,       task.fn->id,
               std::to_string(task.n),     format_double(params.p),
               format_double(params.q),    format_double(task.x),
               format_double(cert.lhs),    format_double(cert.rhs),
               format_double(cert.slack),  format_bool(cert.holds)};
  });

  std::size_t holding = 0;
  int max_refinements = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    holding += held[i];
    max_refinements = std::max(max_refinements, refinements[i]);
  }

  const ConfigPairs config = {
      {"theorem", o.theorem},
      {"f", o.funcs},
      {"n-list", o.n_list},
      {"scheme", fixed_params ? std::string("(fixed params)") : o.scheme},
      {"p", fixed_params ? format_double(o.p) : std::string()},
      {"q", fixed_params ? format_double(o.q) : std::string()},
      {"x", o.x},
      {"alpha", format_double(o.alpha)},
      {"set", o.set},
      {"points", o.points},
      {"intervals", o.intervals},
      {"M", is_set(o.M) ? format_double(o.M) : std::string("measured")},
      {"out", o.out}};
  emit(o.out, "bound",
       {"theorem", "f_id", "n", "p", "q", "x", "lhs", "rhs", "slack",
        "holds"},
       rows, config,
       "bound: " + std::to_string(tasks.size()) + " certificates, " +
           std::to_string(holding) + " hold, " +
           std::to_string(tasks.size() - holding) +
           " fail; max modulus refinements = " +
           std::to_string(max_refinements));
  return 0;
}

// --------------------------------------------------------------- bivariate

struct BivariateOpts {
  std::string theorem = "both";
  std::string funcs = "t_plus_s,ts,exp_neg_sum";
  std::string path = "separable";
  std::string n_list = "5,10";
  std::string n2_list = "";
  double p = 1.0;
  double q = 1.0;
  double p2 = kUnset;
  double q2 = kUnset;
  std::string x = "0:1:0.5";
  std::string y = "";
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  std::string set = "halfline";
  std::string points = "1,2";
  std::string intervals = "";
  double M = kUnset;
  std::string out;
};

int run_bivariate(const BivariateOpts& o) {
  const bool want_modulus = o.theorem == "modulus" || o.theorem == "both";
  const bool want_lipschitz = o.theorem == "lipschitz" || o.theorem == "both";
  if (!want_modulus && !want_lipschitz) {
    throw std::domain_error(
        "bivariate: --theorem must be modulus, lipschitz or both");
  }
  if (o.path != "separable" && o.path != "generic") {
    throw std::domain_error("bivariate: --path must be separable or generic");
  }
  const pqk::PQParams params1 = pqk::PQParams::make(o.p, o.q);
  const pqk::PQParams params2 = pqk::PQParams::make(
      is_set(o.p2) ? o.p2 : o.p, is_set(o.q2) ? o.q2 : o.q);
  const std::vector<std::int64_t> ns1 = pqk::cli::parse_int_list(o.n_list);
  const std::vector<std::int64_t> ns2 =
      o.n2_list.empty() ? ns1 : pqk::cli::parse_int_list(o.n2_list);
  const std::vector<double> xs = pqk::cli::parse_grid(o.x);
  const std::vector<double> ys = o.y.empty() ? xs : pqk::cli::parse_grid(o.y);
  const pqk::SetE set = parse_set(o.set, o.points, o.intervals);

  std::vector<const pqk::cli::NamedBivariate*> funcs;
  for (const std::string& id : split_ids(o.funcs)) {
    funcs.push_back(&pqk::cli::find_bivariate(id));
  }
  const auto form = [&o](const pqk::cli::NamedBivariate* fn)
      -> const pqk::BivariateFunction& {
    return o.path == "separable" ? fn->separable : fn->generic;
  };
  std::map<std::string, double> class_constants;
  if (want_lipschitz) {
    for (const auto* fn : funcs) {
      class_constants[fn->id] =
          is_set(o.M) ? o.M
                      : pqk::measured_holder_constant_2d(form(fn), o.alpha1,
                                                         o.alpha2);
    }
  }

  struct Task {
    bool lipschitz;
    const pqk::cli::NamedBivariate* fn;
    std::int64_t n1;
    std::int64_t n2;
    double x;
    double y;
  };
  std::vector<Task> tasks;
  for (const bool lipschitz : {false, true}) {
    if (lipschitz ? !want_lipschitz : !want_modulus) continue;
    for (const auto* fn : funcs) {
      for (const std::int64_t n1 : ns1) {
        for (const std::int64_t n2 : ns2) {
          for (const double x : xs) {
            for (const double y : ys) {
              tasks.push_back({lipschitz, fn, n1, n2, x, y});
            }
          }
        }
      }
    }
  }

  std::vector<std::vector<std::string>> rows(tasks.size());
  std::vector<char> held(tasks.size(), 0);
  std::vector<char> rescued(tasks.size(), 0);
  pqk::cli::parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const pqk::BivariateBoundCertificate cert =
        task.lipschitz
            ? pqk::bivariate_lipschitz_certificate(
                  form(task.fn), task.fn->id, o.alpha1, o.alpha2,
                  class_constants.at(task.fn->id), set, task.n1, task.n2,
                  params1, params2, task.x, task.y)
            : pqk::bivariate_modulus_certificate(form(task.fn), task.fn->id,
                                                 task.n1, task.n2, params1,
                                                 params2, task.x, task.y);
    held[i] = cert.holds ? 1 : 0;
    rescued[i] = cert.holds_with_doubled_constant ? 1 : 0;
    const bool lip = task.lipschitz;
    rows[i] = {cert.context.theorem,
               task.fn->id,
               std::to_string(task.n1),
               format_double(params1.p),
               format_double(params1.q),
               format_double(task.x),
               std::to_string(task.n2),
               format_double(params2.p),
               format_double(params2.q),
               format_double(task.y),
               lip ? format_double(o.alpha1) : std::string(),
               lip ? format_double(o.alpha2) : std::string(),
               format_double(cert.lhs),
               format_double(cert.rhs),
               format_double(cert.slack),
               format_bool(cert.holds)};
  });

  std::size_t holding = 0;
  std::size_t doubled = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    holding += held[i];
    doubled += rescued[i];
  }

  const ConfigPairs config = {
      {"theorem", o.theorem},
      {"f", o.funcs},
      {"path", o.path},
      {"n-list", o.n_list},
      {"n2-list", o.n2_list.empty() ? o.n_list : o.n2_list},
      {"p", format_double(params1.p)},
      {"q", format_double(params1.q)},
      {"p2", format_double(params2.p)},
      {"q2", format_double(params2.q)},
      {"x", o.x},
      {"y", o.y.empty() ? o.x : o.y},
      {"alpha1", format_double(o.alpha1)},
      {"alpha2", format_double(o.alpha2)},
      {"set", o.set},
      {"points", o.points},
      {"intervals", o.intervals},
      {"M", is_set(o.M) ? format_double(o.M) : std::string("measured")},
      {"out", o.out}};
  emit(o.out, "bivariate",
       {"theorem", "f_id", "n", "p", "q", "x", "n2", "p2", "q2", "y",
        "alpha1", "alpha2", "lhs", "rhs", "slack", "holds"},
       rows, config,
       "bivariate: " + std::to_string(tasks.size()) + " certificates, " +
           std::to_string(holding) + " hold, " +
           std::to_string(tasks.size() - holding) + " fail, " +
           std::to_string(doubled) + " recoverable with doubled constant");
  return 0;
}

// ----------------------------------------------------------------- density

struct DensityOpts {
  std::string set = "squares";
  std::int64_t N = 1000000;
  std::string out;
};

int run_density(const DensityOpts& o) {
  if (o.N < 1) throw std::domain_error("density: --N must be >= 1");
  pqk::IndexPredicate member;
  if (o.set == "evens") {
    member = [](std::int64_t k) { return k % 2 == 0; };
  } else if (o.set == "odds") {
    member = [](std::int64_t k) { return k % 2 == 1; };
  } else if (o.set == "squares") {
    member = [](std::int64_t k) {
      const auto r = static_cast<std::int64_t>(
          std::llround(std::sqrt(static_cast<double>(k))));
      for (std::int64_t c = std::max<std::int64_t>(r - 1, 0); c <= r + 1;
           ++c) {
        if (c * c == k) return true;
      }
      return false;
    };
  } else if (o.set == "empty") {
    member = [](std::int64_t) { return false; };
  } else {
    throw std::domain_error("unknown set '" + o.set +
                            "' (known: evens, odds, squares, empty)");
  }
  const pqk::DensityReport report = pqk::natural_density(member, o.N);
  const std::vector<std::vector<std::string>> rows = {
      {o.set, std::to_string(o.N), std::to_string(report.exception_count),
       format_double(report.density_estimate)}};
  const ConfigPairs config = {
      {"set", o.set}, {"N", std::to_string(o.N)}, {"out", o.out}};
  emit(o.out, "density", {"set", "N", "count", "density"}, rows, config,
       "density: set=" + o.set + " N=" + std::to_string(o.N) + " count=" +
           std::to_string(report.exception_count) + " density=" +
           format_double(report.density_estimate));
  return 0;
}

void attach_config(CLI::App* sub) {
  sub->add_option("--config")->description(
      "flat 'key = value' configuration file; flags override; unknown keys "
      "are errors");
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Reads a flat 'key = value' file ('#' starts a comment). Keys must name
/// long options of the chosen subcommand; keys listed in `given` were set
/// explicitly and keep their command-line values.
std::vector<std::string> config_file_args(const CLI::App& sub,
                                          const std::string& path,
                                          const std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trimmed(line);
    if (body.empty()) continue;
    const std::string where = path + ':' + std::to_string(lineno);
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::domain_error(where + ": expected 'key = value'");
    const std::string key = trimmed(body.substr(0, eq));
    const std::string value = trimmed(body.substr(eq + 1));
    if (key.empty()) throw std::domain_error(where + ": empty key");
    if (key == "config" || key == "help")
      throw std::domain_error(where + ": '" + key +
                              "' cannot be set from a config file");
    if (sub.get_option_no_throw("--" + key) == nullptr)
      throw std::domain_error(where + ": unknown key '" + key + "'");
    values[key] = value;
  }
  std::vector<std::string> args;
  for (const auto& [key, value] : values) {
    if (given.count(key) == 0) args.push_back("--" + key + "=" + value);
  }
  return args;
}

/// Expands a '--config FILE' among the raw arguments into the file's
/// key-value pairs, inserted just after the subcommand name so explicit
/// flags stay authoritative.
std::vector<std::string> merge_config(const CLI::App& app,
                                      const std::vector<std::string>& argv) {
  std::size_t sub_at = 0;
  while (sub_at < argv.size() &&
         (argv[sub_at].empty() || argv[sub_at][0] == '-'))
    ++sub_at;
  if (sub_at == argv.size()) return argv;
  const CLI::App* sub = app.get_subcommand_no_throw(argv[sub_at]);
  if (sub == nullptr) return argv;

  std::set<std::string> given;
  std::string config_path;
  for (std::size_t i = sub_at + 1; i < argv.size(); ++i) {
    const std::string& tok = argv[i];
    if (tok.rfind("--", 0) != 0) continue;
    const auto eq = tok.find('=');
    const std::string name =
        eq == std::string::npos ? tok.substr(2) : tok.substr(2, eq - 2);
    if (name == "config") {
      if (eq != std::string::npos)
        config_path = tok.substr(eq + 1);
      else if (i + 1 < argv.size())
        config_path = argv[i + 1];
    } else {
      given.insert(name);
    }
  }
  if (config_path.empty()) return argv;

  const std::vector<std::string> extra =
      config_file_args(*sub, config_path, given);
  std::vector<std::string> merged(argv.begin(), argv.begin() + sub_at + 1);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), argv.begin() + sub_at + 1, argv.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(p,q)-Szasz-Mirakjan-Kantorovich operator experiments"};
  app.require_subcommand(1);

  MomentsOpts mo;
  CLI::App* moments =
      app.add_subcommand("moments", "Operator moments against closed forms");
  moments->add_option("--n", mo.n, "operator index")->capture_default_str();
  moments->add_option("--p", mo.p, "parameter p")->capture_default_str();
  moments->add_option("--q", mo.q, "parameter q")->capture_default_str();
  moments->add_option("--x", mo.x, "evaluation grid 'a:b:step' or a number")
      ->capture_default_str();
  moments->add_option("--nu", mo.nu, "moment order 0..2 (default: all)");
  moments->add_option("--out", mo.out, "CSV output path (stdout if absent)");
  attach_config(moments);

  ConvergeOpts co;
  CLI::App* converge = app.add_subcommand(
      "converge", "Korovkin grid sups and exception densities along a scheme");
  converge->add_option("--scheme", co.scheme,
                       "smooth | disturbed-squares | constant-sub-one")
      ->capture_default_str();
  converge->add_option("--n-list", co.n_list, "comma-separated operator indices")
      ->capture_default_str();
  converge->add_option("--grid", co.grid, "x grid 'a:b:step'")
      ->capture_default_str();
  converge->add_option("--eps", co.eps, "exception threshold")
      ->capture_default_str();
  converge->add_option("--horizons", co.horizons,
                       "comma-separated density horizons")
      ->capture_default_str();
  converge->add_flag("--validate", co.validate,
                     "cross-check closed-form sups against series evaluation");
  converge->add_option("--out", co.out, "CSV output path (stdout if absent)");
  attach_config(converge);

  StatOpts so;
  CLI::App* stat = app.add_subcommand(
      "stat", "Statistical limit check for a scheme-driven sequence");
  stat->add_option("--sequence", so.sequence,
                   "q_n | p_n | sup_nu1 | delta_at")
      ->capture_default_str();
  stat->add_option("--scheme", so.scheme,
                   "smooth | disturbed-squares | constant-sub-one")
      ->capture_default_str();
  stat->add_option("--L", so.L, "claimed limit (default: per sequence)");
  stat->add_option("--eps", so.eps, "exception threshold")
      ->capture_default_str();
  stat->add_option("--N", so.N, "horizon")->capture_default_str();
  stat->add_option("--x", so.x, "evaluation point for delta_at")
      ->capture_default_str();
  stat->add_option("--xmax", so.xmax, "domain end for sup_nu1")
      ->capture_default_str();
  stat->add_option("--out", so.out, "CSV output path (stdout if absent)");
  attach_config(stat);

  BoundOpts bo;
  CLI::App* bound = app.add_subcommand(
      "bound", "Univariate error-bound certificates over a grid");
  bound->add_option("--theorem", bo.theorem, "modulus | lipschitz | both")
      ->capture_default_str();
  bound->add_option("--f", bo.funcs, "comma-separated function ids")
      ->capture_default_str();
  bound->add_option("--n-list", bo.n_list, "comma-separated operator indices")
      ->capture_default_str();
  bound->add_option("--scheme", bo.scheme,
                    "parameter scheme evaluated at each n")
      ->capture_default_str();
  bound->add_option("--p", bo.p, "fixed p (overrides --scheme, needs --q)");
  bound->add_option("--q", bo.q, "fixed q (overrides --scheme, needs --p)");
  bound->add_option("--x", bo.x, "x grid 'a:b:step'")->capture_default_str();
  bound->add_option("--alpha", bo.alpha, "Lipschitz exponent in (0,1]")
      ->capture_default_str();
  bound->add_option("--set", bo.set, "halfline | points | intervals")
      ->capture_default_str();
  bound->add_option("--points", bo.points, "points for --set points")
      ->capture_default_str();
  bound->add_option("--intervals", bo.intervals,
                    "intervals 'a:b[,c:d...]' for --set intervals");
  bound->add_option("--M", bo.M, "class constant (default: measured)");
  bound->add_option("--out", bo.out, "CSV output path (stdout if absent)");
  attach_config(bound);

  BivariateOpts vo;
  CLI::App* bivariate = app.add_subcommand(
      "bivariate", "Bivariate error-bound certificates over a grid");
  bivariate->add_option("--theorem", vo.theorem, "modulus | lipschitz | both")
      ->capture_default_str();
  bivariate->add_option("--f", vo.funcs, "comma-separated function ids")
      ->capture_default_str();
  bivariate->add_option("--path", vo.path, "separable | generic")
      ->capture_default_str();
  bivariate->add_option("--n-list", vo.n_list, "first-axis operator indices")
      ->capture_default_str();
  bivariate->add_option("--n2-list", vo.n2_list,
                        "second-axis operator indices (default: --n-list)");
  bivariate->add_option("--p", vo.p, "first-axis p")->capture_default_str();
  bivariate->add_option("--q", vo.q, "first-axis q")->capture_default_str();
  bivariate->add_option("--p2", vo.p2, "second-axis p (default: --p)");
  bivariate->add_option("--q2", vo.q2, "second-axis q (default: --q)");
  bivariate->add_option("--x", vo.x, "x grid 'a:b:step'")
      ->capture_default_str();
  bivariate->add_option("--y", vo.y, "y grid (default: --x)");
  bivariate->add_option("--alpha1", vo.alpha1, "first Lipschitz exponent")
      ->capture_default_str();
  bivariate->add_option("--alpha2", vo.alpha2, "second Lipschitz exponent")
      ->capture_default_str();
  bivariate->add_option("--set", vo.set, "halfline | points | intervals")
      ->capture_default_str();
  bivariate->add_option("--points", vo.points, "points for --set points")
      ->capture_default_str();
  bivariate->add_option("--intervals", vo.intervals,
                        "intervals 'a:b[,c:d...]' for --set intervals");
  bivariate->add_option("--M", vo.M, "class constant (default: measured)");
  bivariate->add_option("--out", vo.out, "CSV output path (stdout if absent)");
  attach_config(bivariate);

  DensityOpts deo;
  CLI::App* density =
      app.add_subcommand("density", "Natural density by exact counting");
  density->add_option("--set", deo.set, "evens | odds | squares | empty")
      ->capture_default_str();
  density->add_option("--N", deo.N, "horizon")->capture_default_str();
  density->add_option("--out", deo.out, "CSV output path (stdout if absent)");
  attach_config(density);

  std::vector<std::string> raw(argv + 1, argv + argc);
  try {
    raw = merge_config(app, raw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::reverse(raw.begin(), raw.end());
  try {
    app.parse(raw);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (moments->parsed()) return run_moments(mo);
    if (converge->parsed()) return run_converge(co);
    if (stat->parsed()) return run_stat(so);
    if (bound->parsed()) return run_bound(bo);
    if (bivariate->parsed()) return run_bivariate(vo);
    if (density->parsed()) return run_density(deo);
  } catch (const pqk::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
