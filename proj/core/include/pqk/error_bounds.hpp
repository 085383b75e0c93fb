#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pqk/szasz_kantorovich.hpp"

namespace pqk {

/// Grid settings for moduli, maximal functions and certificates.
/// Grid moduli are lower bounds of the true modulus, so certificates refine
/// (halve the step) up to max_refinements times before reporting a failure.
struct ModulusConfig {
  double domain_end = 2.0;
  double grid_step = 1.0 / 512.0;
  int max_refinements = 2;
};

/// w(f; delta) = sup{|f(t)-f(x)| : t,x in [0,domain_end], |t-x| < delta},
/// taken over the uniform grid with the given step. Requires
/// grid_step <= delta/8 so the grid resolves the window.
double modulus_of_continuity(const RealFunction& f, double delta,
                             double domain_end, double grid_step);

/// Lenze-type maximal function
///   f~_alpha(x) = sup_{t != x} |f(t)-f(x)| / |t-x|^alpha,
/// over grid t in [0, domain_end] excluding |t-x| < grid_step (keeps the
/// 0/0 neighborhood out).
double lipschitz_maximal(const RealFunction& f, double alpha, double x,
                         double domain_end, double grid_step);

/// Measured class constant: max over the grid of (1+x)^alpha f~_alpha(x),
/// plus 10% headroom.
double measured_holder_constant(const RealFunction& f, double alpha,
                                double domain_end = 2.0,
                                double grid_step = 1.0 / 512.0);

/// Distance target set, one of: the full half-line [0,inf) (distance 0
/// everywhere), a finite point set, or a finite union of closed intervals.
struct SetE {
  enum class Kind { full_halfline, finite_points, intervals };
  Kind kind = Kind::full_halfline;
  std::vector<double> points;
  std::vector<std::pair<double, double>> intervals;

  static SetE halfline();
  static SetE finite(std::vector<double> points);
  static SetE interval_list(std::vector<std::pair<double, double>> intervals);
};

/// Exact inf{|x - e| : e in E}; x must be >= 0.
double distance_to_set(double x, const SetE& set);

struct CertificateContext {
  std::string theorem;
  std::string f_id;
  std::int64_t n = 0;
  double p = 1.0;
  double q = 1.0;
  double x = 0.0;
};

/// One checked instance of an error bound: lhs <= rhs up to the floating
/// slack floor -1e-12 (1 + |rhs|).
struct BoundCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  int refinements_used = 0;
  CertificateContext context;
};

inline constexpr double kCertificateSlackTol = 1e-12;

/// Modulus-of-continuity rate bound:
///   |K_n(f;x) - f(x)| <= 2 w(f; sqrt(delta_n(x))).
/// The starting grid step is shrunk to sqrt(delta)/8 when needed.
BoundCertificate modulus_certificate(const RealFunction& f,
                                     const std::string& f_id, std::int64_t n,
                                     const PQParams& params, double x,
                                     const BasisSpec& spec = {},
                                     const OperatorConfig& cfg = {},
                                     const ModulusConfig& mod_cfg = {});

/// Lipschitz-class rate bound with a caller-supplied class constant M > 0
/// (see measured_holder_constant):
///   |K_n(f;x) - f(x)| <= M (delta_n(x)^{alpha/2} + 2 d(x,E)^alpha).
/// With E = [0,inf) the distance term vanishes and the bound reduces to
/// M delta_n(x)^{alpha/2}.
BoundCertificate lipschitz_certificate(const RealFunction& f,
                                       const std::string& f_id, double alpha,
                                       double M, const SetE& set,
                                       std::int64_t n, const PQParams& params,
                                       double x, const BasisSpec& spec = {},
                                       const OperatorConfig& cfg = {});

}  // namespace pqk
