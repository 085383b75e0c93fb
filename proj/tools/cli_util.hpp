#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pqk/bivariate.hpp"
#include "pqk/statistical_limits.hpp"

namespace pqk::cli {

/// "a:b:step" -> inclusive uniform grid (both ends kept within half a step);
/// a bare number -> one-point grid.
std::vector<double> parse_grid(const std::string& spec);

/// "5,10,20" -> {5, 10, 20}; every entry must be a positive integer.
std::vector<std::int64_t> parse_int_list(const std::string& spec);

/// "0.5,1" -> {0.5, 1.0}
std::vector<double> parse_double_list(const std::string& spec);

/// 17 significant digits, '.' decimal separator, round-trip exact.
std::string format_double(double value);
std::string format_bool(bool value);

/// RFC-4180 quoting: wraps fields containing commas, quotes or line breaks.
std::string csv_field(const std::string& raw);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Writes <out_path>.json holding the subcommand name and the fully
/// resolved configuration (after config-file merge and defaults).
void write_json_sidecar(
    const std::string& out_path, const std::string& subcommand,
    const std::vector<std::pair<std::string, std::string>>& config);

struct NamedFunction {
  std::string id;
  RealFunction f;
};

/// ids: one, t, t2, sqrt, exp_neg, t_over_1pt
const std::vector<NamedFunction>& univariate_registry();
const NamedFunction& find_univariate(const std::string& id);

struct NamedBivariate {
  std::string id;
  BivariateFunction separable;
  BivariateFunction generic;
};

/// ids: t_plus_s, ts, exp_neg_sum (each in both separable and generic form)
const std::vector<NamedBivariate>& bivariate_registry();
const NamedBivariate& find_bivariate(const std::string& id);

/// names: smooth, disturbed-squares, constant-sub-one
ParamSequenceScheme scheme_by_name(const std::string& name);

/// Worker count: PQK_THREADS when set (must be a positive integer),
/// otherwise hardware concurrency.
std::size_t worker_count();

/// Runs body(0..count-1) on a worker pool. Iteration order is unspecified,
/// so the body must write to its own preassigned slot; exceptions are
/// rethrown on the calling thread.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& body);

}  // namespace pqk::cli
