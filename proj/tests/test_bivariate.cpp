#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pqk/bivariate.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

using namespace pqk;

namespace {

BivariateFunction make_t_plus_s(bool separable) {
    if (separable) {
        return BivariateFunction::separable(
            {{[](double t) { return t; }, [](double) { return 1.0; }},
             {[](double) { return 1.0; }, [](double s) { return s; }}});
    }
    return BivariateFunction::generic([](double t, double s) { return t + s; });
}

BivariateFunction make_ts(bool separable) {
    if (separable) {
        return BivariateFunction::separable(
            {{[](double t) { return t; }, [](double s) { return s; }}});
    }
    return BivariateFunction::generic([](double t, double s) { return t * s; });
}

BivariateFunction make_exp_neg_sum(bool separable) {
    if (separable) {
        return BivariateFunction::separable(
            {{[](double t) { return std::exp(-t); },
              [](double s) { return std::exp(-s); }}});
    }
    return BivariateFunction::generic(
        [](double t, double s) { return std::exp(-t - s); });
}

std::int64_t closed_radius(double d, double h) {
    return static_cast<std::int64_t>(std::floor(d / h + 1e-9));
}

double naive_bivariate_modulus(const BivariateFunction& f, double d1, double d2,
                               double domain_end, double h) {
    const auto points =
        static_cast<std::int64_t>(std::floor(domain_end / h + 1e-9)) + 1;
    const std::int64_t r1 = closed_radius(d1, h);
    const std::int64_t r2 = closed_radius(d2, h);
    double best = 0.0;
    for (std::int64_t i = 0; i < points; ++i) {
        for (std::int64_t j = 0; j < points; ++j) {
            const double base = f(i * h, j * h);
            for (std::int64_t k = std::max<std::int64_t>(0, i - r1);
                 k < points && k <= i + r1; ++k) {
                for (std::int64_t l = std::max<std::int64_t>(0, j - r2);
                     l < points && l <= j + r2; ++l) {
                    best = std::max(best, std::fabs(f(k * h, l * h) - base));
                }
            }
        }
    }
    return best;
}

double naive_bivariate_maximal(const BivariateFunction& f, double a1, double a2,
                               double x, double y, double domain_end, double h) {
    const auto points =
        static_cast<std::int64_t>(std::floor(domain_end / h + 1e-9)) + 1;
    const double base = f(x, y);
    double best = 0.0;
    for (std::int64_t i = 0; i < points; ++i) {
        const double dt = std::fabs(i * h - x);
        if (dt < h) continue;
        for (std::int64_t j = 0; j < points; ++j) {
            const double ds = std::fabs(j * h - y);
            if (ds < h) continue;
            best = std::max(best, std::fabs(f(i * h, j * h) - base) /
                                      (std::pow(dt, a1) * std::pow(ds, a2)));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("separable and generic evaluation paths agree") {
    const std::vector<PQParams> param_list{PQParams::make(1.0, 1.0),
                                           PQParams::make(0.95, 0.9)};
    for (int which = 0; which < 3; ++which) {
        const auto sep = which == 0   ? make_t_plus_s(true)
                         : which == 1 ? make_ts(true)
                                      : make_exp_neg_sum(true);
        const auto gen = which == 0   ? make_t_plus_s(false)
                         : which == 1 ? make_ts(false)
                                      : make_exp_neg_sum(false);
        CHECK(sep.is_separable());
        CHECK_FALSE(gen.is_separable());
        for (const auto& params : param_list) {
            for (std::int64_t n1 : {5, 10}) {
                for (std::int64_t n2 : {5, 10}) {
                    for (double x : {0.0, 0.5, 1.0}) {
                        for (double y : {0.0, 0.5, 1.0}) {
                            const double a = apply_bivariate(sep, n1, n2, params,
                                                             params, x, y);
                            const double b = apply_bivariate(gen, n1, n2, params,
                                                             params, x, y);
                            CHECK(a == doctest::Approx(b).epsilon(1e-8));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("closed-form bivariate moments") {
    const auto classical = PQParams::make(1.0, 1.0);
    CHECK(bivariate_moment_closed_form(0, 10, 10, classical, classical, 1.0, 1.0) ==
          doctest::Approx(1.0));
    CHECK(bivariate_moment_closed_form(3, 10, 10, classical, classical, 1.0, 1.0) ==
          doctest::Approx(2.0 * (1.0 + 0.2 + 1.0 / 300.0)).epsilon(1e-13));

    const auto params = PQParams::make(0.95, 0.9);
    for (double x : {0.0, 0.5, 1.0}) {
        for (double y : {0.0, 1.0, 2.0}) {
            CHECK(bivariate_moment_closed_form(1, 5, 10, params, classical, x, y) ==
                  doctest::Approx(moment_closed_form(1, 5, params, x)).epsilon(1e-13));
            CHECK(bivariate_moment_closed_form(2, 5, 10, params, classical, x, y) ==
                  doctest::Approx(moment_closed_form(1, 10, classical, y)).epsilon(1e-13));
            CHECK(bivariate_moment_closed_form(3, 5, 10, params, classical, x, y) ==
                  doctest::Approx(moment_closed_form(2, 5, params, x) +
                                  moment_closed_form(2, 10, classical, y))
                      .epsilon(1e-13));
        }
    }

    CHECK_THROWS_AS(
        bivariate_moment_closed_form(4, 5, 5, classical, classical, 0.0, 0.0),
        std::domain_error);
    CHECK_THROWS_AS(
        bivariate_moment_closed_form(-1, 5, 5, classical, classical, 0.0, 0.0),
        std::domain_error);
}

TEST_CASE("operator reproduces the bivariate test suite") {
    const auto one = BivariateFunction::separable(
        {{[](double) { return 1.0; }, [](double) { return 1.0; }}});
    const auto proj_t = BivariateFunction::separable(
        {{[](double t) { return t; }, [](double) { return 1.0; }}});
    const auto proj_s = BivariateFunction::separable(
        {{[](double) { return 1.0; }, [](double s) { return s; }}});
    const auto radial = BivariateFunction::separable(
        {{[](double t) { return t * t; }, [](double) { return 1.0; }},
         {[](double) { return 1.0; }, [](double s) { return s * s; }}});

    const auto p1 = PQParams::make(0.95, 0.9);
    const auto p2 = PQParams::make(1.0, 1.0);
    const std::vector<const BivariateFunction*> suite{&one, &proj_t, &proj_s,
                                                      &radial};
    for (int i = 0; i < 4; ++i) {
        for (double x : {0.0, 1.0}) {
            for (double y : {0.5, 2.0}) {
                CHECK(apply_bivariate(*suite[i], 5, 10, p1, p2, x, y) ==
                      doctest::Approx(bivariate_moment_closed_form(i, 5, 10, p1,
                                                                   p2, x, y))
                          .epsilon(1e-8));
            }
        }
    }

    CHECK(apply_bivariate(make_ts(true), 5, 10, p1, p2, 1.0, 1.0) ==
          doctest::Approx(moment_closed_form(1, 5, p1, 1.0) *
                          moment_closed_form(1, 10, p2, 1.0))
              .epsilon(1e-10));
}

TEST_CASE("bivariate modulus on additive and degenerate inputs") {
    const double h = 1.0 / 64.0;
    const auto plus = make_t_plus_s(false);
    const double w = bivariate_modulus(plus, 0.25, 0.5, 2.0, h);
    CHECK(std::fabs(w - 0.75) <= 2.5 * h);

    const auto flat_s = BivariateFunction::generic(
        [](double t, double) { return t; });
    const double wf = bivariate_modulus(flat_s, 0.25, 0.25, 2.0, h);
    CHECK(std::fabs(wf - 0.25) <= 1.5 * h);

    CHECK_THROWS_AS(bivariate_modulus(plus, 0.1, 0.5, 2.0, 0.05),
                    std::domain_error);
}

TEST_CASE("the product bound chains exactly across the grid") {
    const double h = 1.0 / 32.0;
    const double domain = 1.0;
    const auto points = static_cast<std::int64_t>(std::floor(domain / h + 1e-9)) + 1;
    const std::vector<BivariateFunction> funcs{
        make_t_plus_s(false), make_ts(false), make_exp_neg_sum(false)};
    for (const auto& f : funcs) {
        std::vector<double> values(points * points);
        for (std::int64_t i = 0; i < points; ++i) {
            for (std::int64_t j = 0; j < points; ++j) {
                values[i * points + j] = f(i * h, j * h);
            }
        }
        for (const auto d : std::vector<std::pair<double, double>>{
                 {0.25, 0.25}, {0.5, 0.25}}) {
            const double w = bivariate_modulus(f, d.first, d.second, domain, h);
            const double e1 = closed_radius(d.first, h) * h;
            const double e2 = closed_radius(d.second, h) * h;
            std::int64_t violations = 0;
            for (std::int64_t i = 0; i < points; ++i) {
                for (std::int64_t j = 0; j < points; ++j) {
                    const double base = values[i * points + j];
                    for (std::int64_t k = 0; k < points; ++k) {
                        const double tx = std::fabs((k - i) * h);
                        for (std::int64_t l = 0; l < points; ++l) {
                            const double sy = std::fabs((l - j) * h);
                            const double gap =
                                std::fabs(values[k * points + l] - base);
                            const double bound =
                                w * (tx / e1 + 1.0) * (sy / e2 + 1.0) + 1e-12;
                            if (gap > bound) ++violations;
                        }
                    }
                }
            }
            CHECK(violations == 0);
        }
    }
}

TEST_CASE("small-grid brute force agrees with the swept implementation") {
    const double h = 0.125;
    const auto fs = std::vector<BivariateFunction>{make_ts(false),
                                                   make_exp_neg_sum(false)};
    for (const auto& f : fs) {
        for (const auto d : std::vector<std::tuple<double, double, double>>{
                 {0.25, 0.25, 1.0 / 32.0},
                 {0.5, 0.25, 1.0 / 32.0},
                 {1.0, 1.0, 0.125}}) {
            const double d1 = std::get<0>(d);
            const double d2 = std::get<1>(d);
            const double hd = std::get<2>(d);
            CHECK(bivariate_modulus(f, d1, d2, 1.0, hd) ==
                  doctest::Approx(naive_bivariate_modulus(f, d1, d2, 1.0, hd))
                      .epsilon(1e-12));
        }
        for (double x : {0.0, 0.5}) {
            for (double y : {0.25, 1.0}) {
                CHECK(bivariate_lipschitz_maximal(f, 0.5, 0.5, x, y, 1.0, h) ==
                      doctest::Approx(naive_bivariate_maximal(f, 0.5, 0.5, x, y,
                                                              1.0, h))
                          .epsilon(1e-12));
            }
        }
    }

    const auto f = make_ts(false);
    const double measured = measured_holder_constant_2d(f, 0.5, 0.5, 1.0, h);
    double naive_best = 0.0;
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            naive_best = std::max(
                naive_best,
                std::pow(1.0 + i * h, 0.5) * std::pow(1.0 + j * h, 0.5) *
                    naive_bivariate_maximal(f, 0.5, 0.5, i * h, j * h, 1.0, h));
        }
    }
    CHECK(measured == doctest::Approx(1.1 * naive_best).epsilon(1e-12));
}

TEST_CASE("maximal function of an s-independent input scales with the grid") {
    const auto flat_s = BivariateFunction::generic(
        [](double t, double) { return t; });
    const double h = 1.0 / 32.0;
    const double at_origin =
        bivariate_lipschitz_maximal(flat_s, 0.5, 0.5, 0.0, 0.0, 2.0, h);
    CHECK(at_origin == doctest::Approx(std::sqrt(2.0 / h)).epsilon(1e-9));

    const double cap = std::pow(2.0, 0.5) * std::pow(h, -0.5) + 1e-6;
    for (const auto pt : std::vector<std::pair<double, double>>{
             {1.0, 0.5}, {0.5, 1.0}, {2.0, 2.0}}) {
        CHECK(bivariate_lipschitz_maximal(flat_s, 0.5, 0.5, pt.first, pt.second,
                                          2.0, h) <= cap);
    }

    const double finer =
        bivariate_lipschitz_maximal(flat_s, 0.5, 0.5, 0.0, 0.0, 2.0, h / 2.0);
    CHECK(finer == doctest::Approx(std::sqrt(2.0) * at_origin).epsilon(1e-9));
}

TEST_CASE("bivariate modulus certificates") {
    const auto classical = PQParams::make(1.0, 1.0);
    const auto plus = make_t_plus_s(true);
    const auto cert = bivariate_modulus_certificate(plus, "t_plus_s", 10, 10,
                                                    classical, classical, 1.0,
                                                    1.0);
    CHECK(cert.lhs == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(cert.holds);
    CHECK(cert.refinements_used == 0);
    CHECK_FALSE(cert.holds_with_doubled_constant);
    CHECK(cert.context.theorem == "modulus-2d");
    CHECK(cert.context.f_id == "t_plus_s");
    CHECK(cert.context.n1 == 10);
    CHECK(cert.context.n2 == 10);
    CHECK(cert.context.x == doctest::Approx(1.0));
    CHECK(cert.context.y == doctest::Approx(1.0));

    const auto prod = bivariate_modulus_certificate(make_ts(true), "ts", 10, 10,
                                                    classical, classical, 1.0,
                                                    1.0);
    CHECK(prod.lhs == doctest::Approx(0.1025).epsilon(1e-8));
    CHECK(prod.holds);

    const auto params = PQParams::make(0.95, 0.9);
    for (const auto& f : {make_t_plus_s(true), make_ts(true),
                          make_exp_neg_sum(true)}) {
        for (double x : {0.0, 1.0}) {
            const auto c = bivariate_modulus_certificate(f, "f", 10, 5, params,
                                                         params, x, 1.0);
            CHECK(c.holds);
            CHECK(c.refinements_used <= 2);
        }
    }
}

TEST_CASE("bivariate lipschitz certificates") {
    const auto classical = PQParams::make(1.0, 1.0);
    const auto params = PQParams::make(0.95, 0.9);
    const char* names[] = {"t_plus_s", "ts", "exp_neg_sum"};
    const BivariateFunction funcs[] = {make_t_plus_s(true), make_ts(true),
                                       make_exp_neg_sum(true)};
    for (int i = 0; i < 3; ++i) {
        const double M = measured_holder_constant_2d(funcs[i], 0.5, 0.5);
        for (const auto pt : std::vector<std::pair<double, double>>{
                 {0.0, 0.0}, {1.0, 1.0}, {0.5, 1.0}}) {
            const auto cert = bivariate_lipschitz_certificate(
                funcs[i], names[i], 0.5, 0.5, M, SetE::halfline(), 10, 10,
                params, classical, pt.first, pt.second);
            CHECK(cert.holds);
            CHECK_FALSE(cert.holds_with_doubled_constant);
            CHECK(cert.context.theorem == "lipschitz-2d");
            CHECK(cert.context.f_id == names[i]);
            CHECK(cert.context.alpha1 == doctest::Approx(0.5));
            CHECK(cert.context.alpha2 == doctest::Approx(0.5));
        }
    }

    const auto f = make_t_plus_s(true);
    CHECK_THROWS_AS(
        bivariate_lipschitz_certificate(f, "f", 0.0, 0.5, 1.0, SetE::halfline(),
                                        5, 5, classical, classical, 1.0, 1.0),
        std::domain_error);
    CHECK_THROWS_AS(
        bivariate_lipschitz_certificate(f, "f", 0.5, 1.5, 1.0, SetE::halfline(),
                                        5, 5, classical, classical, 1.0, 1.0),
        std::domain_error);
    CHECK_THROWS_AS(
        bivariate_lipschitz_certificate(f, "f", 0.5, 0.5, -1.0,
                                        SetE::halfline(), 5, 5, classical,
                                        classical, 1.0, 1.0),
        std::domain_error);

    const auto tiny = bivariate_lipschitz_certificate(
        f, "f", 0.5, 0.5, 1e-9, SetE::halfline(), 10, 10, classical, classical,
        1.0, 1.0);
    CHECK_FALSE(tiny.holds);
    CHECK(tiny.slack < 0.0);
}

TEST_CASE("construction validation") {
    CHECK_THROWS_AS(BivariateFunction::separable({}), std::domain_error);
    CHECK_THROWS_AS(BivariateFunction::separable(
                        {{RealFunction{}, [](double) { return 1.0; }}}),
                    std::domain_error);
    CHECK_THROWS_AS(BivariateFunction::generic(nullptr), std::domain_error);
    CHECK_THROWS_AS(apply_bivariate(make_ts(true), 0, 5, PQParams::make(1.0, 1.0),
                                    PQParams::make(1.0, 1.0), 1.0, 1.0),
                    std::domain_error);
}
