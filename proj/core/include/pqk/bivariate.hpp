#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pqk/error_bounds.hpp"
#include "pqk/szasz_kantorovich.hpp"

namespace pqk {

/// A function of two variables, either generic or a sum of separable terms
/// g(t)h(s). Separable structure lets the tensor operator run as a product
/// of univariate applications; the generic form goes through iterated
/// integration.
class BivariateFunction {
 public:
  struct SeparableTerm {
    RealFunction g;
    RealFunction h;
  };

  static BivariateFunction separable(std::vector<SeparableTerm> terms);
  static BivariateFunction generic(std::function<double(double, double)> f);

  double operator()(double t, double s) const;
  bool is_separable() const { return !terms_.empty(); }
  const std::vector<SeparableTerm>& terms() const { return terms_; }

 private:
  std::vector<SeparableTerm> terms_;
  std::function<double(double, double)> f_;
};

/// Tensor-product operator K_{n1,n2}(f; x, y). Separable input evaluates as
/// sum of apply(g)*apply(h); generic input contracts the two univariate
/// node lists against f (iterated integration with fixed budgets, see
/// detail::operator_node_list).
double apply_bivariate(const BivariateFunction& f, std::int64_t n1,
                       std::int64_t n2, const PQParams& params1,
                       const PQParams& params2, double x, double y,
                       const BasisSpec& spec = {},
                       const OperatorConfig& cfg = {});

/// Closed-form images of the bivariate Korovkin suite
///   i=0: 1,  i=1: t (x-leg first moment),  i=2: s (y-leg first moment),
///   i=3: t^2+s^2 (sum of the univariate second moments).
double bivariate_moment_closed_form(int i, std::int64_t n1, std::int64_t n2,
                                    const PQParams& params1,
                                    const PQParams& params2, double x,
                                    double y);

/// Full bivariate modulus
///   w(f; d1, d2) = sup{|f(t,s)-f(x,y)| : |t-x| <= d1, |s-y| <= d2}
/// over the uniform grid on [0,domain_end]^2. Requires
/// grid_step <= min(d1,d2)/8.
double bivariate_modulus(const BivariateFunction& f, double d1, double d2,
                         double domain_end, double grid_step);

/// Mixed maximal function
///   sup |f(t,s)-f(x,y)| / (|t-x|^{a1} |s-y|^{a2}),
/// over grid (t,s) excluding the strips |t-x| < grid_step, |s-y| < grid_step.
double bivariate_lipschitz_maximal(const BivariateFunction& f, double alpha1,
                                   double alpha2, double x, double y,
                                   double domain_end, double grid_step);

/// Measured class constant: max over the grid of
/// (1+x)^{a1} (1+y)^{a2} f~_{a1,a2}(x,y), plus 10% headroom. The sweep is
/// O(G^4), hence the coarser default step.
double measured_holder_constant_2d(const BivariateFunction& f, double alpha1,
                                   double alpha2, double domain_end = 2.0,
                                   double grid_step = 1.0 / 32.0);

struct BivariateCertificateContext {
  std::string theorem;
  std::string f_id;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  double p1 = 1.0, q1 = 1.0;
  double p2 = 1.0, q2 = 1.0;
  double x = 0.0, y = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
};

struct BivariateBoundCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  /// Set when the stated constant fails but doubling it would succeed.
  bool holds_with_doubled_constant = false;
  int refinements_used = 0;
  BivariateCertificateContext context;
};

/// Bivariate modulus rate bound with the stated constant 4:
///   |K(f;x,y) - f(x,y)| <= 4 w(f; sqrt(delta_{n1}(x)), sqrt(delta_{n2}(y))).
BivariateBoundCertificate bivariate_modulus_certificate(
    const BivariateFunction& f, const std::string& f_id, std::int64_t n1,
    std::int64_t n2, const PQParams& params1, const PQParams& params2,
    double x, double y, const BasisSpec& spec = {},
    const OperatorConfig& cfg = {},
    const ModulusConfig& mod_cfg = {2.0, 1.0 / 128.0, 2});

/// Bivariate Lipschitz-class rate bound with a caller-supplied M > 0:
///   |K(f;x,y) - f(x,y)| <= M (d1^{a1/2} d2^{a2/2}
///                             + d1^{a1/2} d(y,E)^{a2}
///                             + d2^{a2/2} d(x,E)^{a1}
///                             + 2 d(x,E)^{a1} d(y,E)^{a2}),
/// writing d1 = delta_{n1}(x), d2 = delta_{n2}(y). With E = [0,inf) only the
/// first product survives.
BivariateBoundCertificate bivariate_lipschitz_certificate(
    const BivariateFunction& f, const std::string& f_id, double alpha1,
    double alpha2, double M, const SetE& set, std::int64_t n1, std::int64_t n2,
    const PQParams& params1, const PQParams& params2, double x, double y,
    const BasisSpec& spec = {}, const OperatorConfig& cfg = {});

}  // namespace pqk
