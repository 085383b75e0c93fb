#include "cli_util.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pqk::cli {

namespace {

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::domain_error(std::string(what) + ": not a number: '" + text +
                            "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw std::domain_error(std::string(what) + ": not a number: '" + text +
                            "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.empty()) throw std::domain_error("grid: empty specification");
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.size() == 1) {
    return {parse_number(parts[0], "grid")};
  }
  if (parts.size() != 3) {
    throw std::domain_error("grid: expected 'a:b:step', got '" + spec + "'");
  }
  const double a = parse_number(parts[0], "grid start");
  const double b = parse_number(parts[1], "grid end");
  const double step = parse_number(parts[2], "grid step");
  if (!(step > 0.0)) throw std::domain_error("grid: step must be > 0");
  if (b < a) throw std::domain_error("grid: end must be >= start");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double t = a + static_cast<double>(i) * step;
    if (t > b + step / 2.0) break;
    out.push_back(std::min(t, b));
  }
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& spec) {
  if (spec.empty()) throw std::domain_error("list: empty specification");
  std::vector<std::int64_t> out;
  for (const std::string& part : split(spec, ',')) {
    std::int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size() || value < 1) {
      throw std::domain_error("list: expected positive integers, got '" +
                              spec + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& spec) {
  if (spec.empty()) throw std::domain_error("list: empty specification");
  std::vector<double> out;
  for (const std::string& part : split(spec, ',')) {
    out.push_back(parse_number(part, "list"));
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_bool(bool value) { return value ? "true" : "false"; }

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (const char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  const auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << csv_field(row[i]);
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& row : rows) write_row(row);
}

void write_json_sidecar(
    const std::string& out_path, const std::string& subcommand,
    const std::vector<std::pair<std::string, std::string>>& config) {
  nlohmann::json doc;
  doc["subcommand"] = subcommand;
  nlohmann::json resolved = nlohmann::json::object();
  for (const auto& [key, value] : config) resolved[key] = value;
  doc["config"] = resolved;
  const std::string path = out_path + ".json";
  std::ofstream out(path);
  if (!out) throw std::domain_error("cannot open " + path);
  out << doc.dump(2) << '\n';
}

const std::vector<NamedFunction>& univariate_registry() {
  static const std::vector<NamedFunction> registry = {
      {"one", [](double) { return 1.0; }},
      {"t", [](double t) { return t; }},
      {"t2", [](double t) { return t * t; }},
      {"sqrt", [](double t) { return std::sqrt(t); }},
      {"exp_neg", [](double t) { return std::exp(-t); }},
      {"t_over_1pt", [](double t) { return t / (1.0 + t); }},
  };
  return registry;
}

const NamedFunction& find_univariate(const std::string& id) {
  for (const auto& entry : univariate_registry()) {
    if (entry.id == id) return entry;
  }
  std::string known;
  for (const auto& entry : univariate_registry()) {
    if (!known.empty()) known += ", ";
    known += entry.id;
  }
  throw std::domain_error("unknown function '" + id + "' (known: " + known +
                          ")");
}

const std::vector<NamedBivariate>& bivariate_registry() {
  static const std::vector<NamedBivariate> registry = [] {
    const RealFunction one = [](double) { return 1.0; };
    const RealFunction ident = [](double t) { return t; };
    const RealFunction exp_neg = [](double t) { return std::exp(-t); };
    std::vector<NamedBivariate> entries;
    entries.push_back(
        {"t_plus_s",
         BivariateFunction::separable({{ident, one}, {one, ident}}),
         BivariateFunction::generic(
             [](double t, double s) { return t + s; })});
    entries.push_back(
        {"ts", BivariateFunction::separable({{ident, ident}}),
         BivariateFunction::generic(
             [](double t, double s) { return t * s; })});
    entries.push_back(
        {"exp_neg_sum", BivariateFunction::separable({{exp_neg, exp_neg}}),
         BivariateFunction::generic(
             [](double t, double s) { return std::exp(-t - s); })});
    return entries;
  }();
  return registry;
}

const NamedBivariate& find_bivariate(const std::string& id) {
  for (const auto& entry : bivariate_registry()) {
    if (entry.id == id) return entry;
  }
  std::string known;
  for (const auto& entry : bivariate_registry()) {
    if (!known.empty()) known += ", ";
    known += entry.id;
  }
  throw std::domain_error("unknown function '" + id + "' (known: " + known +
                          ")");
}

ParamSequenceScheme scheme_by_name(const std::string& name) {
  if (name == "smooth") return smooth_scheme();
  if (name == "disturbed-squares") return disturbed_squares_scheme();
  if (name == "constant-sub-one") return constant_sub_one_scheme();
  throw std::domain_error(
      "unknown scheme '" + name +
      "' (known: smooth, disturbed-squares, constant-sub-one)");
}

std::size_t worker_count() {
  if (const char* env = std::getenv("PQK_THREADS")) {
    const std::string text(env);
    std::size_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
      throw std::domain_error("PQK_THREADS must be a positive integer");
    }
    return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pqk::cli
