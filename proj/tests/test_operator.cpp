#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pqk/szasz_kantorovich.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

using namespace pqk;

namespace {

double unif(std::mt19937& rng, double a, double b) {
    return a + (b - a) * (static_cast<double>(rng() >> 5) / 134217728.0);
}

}  // namespace

TEST_CASE("cells: widths, adjacency, classical form") {
    const auto params = PQParams::make(0.9, 0.8);
    for (std::int64_t n : {1, 3, 10}) {
        const double bn = pq_integer(n, params);
        for (std::int64_t k = 0; k < 12; ++k) {
            const auto cell = kantorovich_cell(n, k, params);
            const double width = std::pow(0.9, k) / (std::pow(0.8, k) * bn);
            CHECK(cell.upper - cell.lower == doctest::Approx(width).epsilon(1e-12));
            const auto next = kantorovich_cell(n, k + 1, params);
            CHECK(cell.upper == doctest::Approx(next.lower).epsilon(1e-14));
        }
    }

    const auto c32 = kantorovich_cell(3, 2, params);
    CHECK(c32.lower == doctest::Approx(1.7 / (0.8 * 2.17)).epsilon(1e-13));
    CHECK(c32.upper == doctest::Approx(1.0 / 0.64).epsilon(1e-13));

    const auto classical = PQParams::make(1.0, 1.0);
    for (std::int64_t k = 0; k < 8; ++k) {
        const auto cell = kantorovich_cell(5, k, classical);
        CHECK(cell.lower == doctest::Approx(k / 5.0).epsilon(1e-14));
        CHECK(cell.upper == doctest::Approx((k + 1) / 5.0).epsilon(1e-14));
    }
}

TEST_CASE("classical basis weight is the Poisson weight") {
    const auto classical = PQParams::make(1.0, 1.0);
    CHECK(basis_weight(4, 2, classical, 1.0) ==
          doctest::Approx(8.0 * std::exp(-4.0)).epsilon(1e-12));
    double total = 0.0;
    for (std::int64_t k = 0; k < 80; ++k) {
        total += basis_weight(4, k, classical, 1.0);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("first-moment hand value") {
    const auto params = PQParams::make(0.9, 0.8);
    CHECK(moment_closed_form(1, 2, params, 1.0) ==
          doctest::Approx(1.0 / 0.8 + 1.0 / (1.7 * 1.7)).epsilon(1e-13));

    const auto classical = PQParams::make(1.0, 1.0);
    CHECK(apply([](double t) { return t; }, 10, classical, 0.0) ==
          doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("operator reproduces the closed-form monomial images") {
    const std::vector<std::pair<double, double>> grid{
        {0.9, 0.8}, {0.95, 0.9}, {1.0, 1.0}};
    for (const auto pr : grid) {
        const auto params = PQParams::make(pr.first, pr.second);
        for (std::int64_t n : {2, 10}) {
            for (double x : {0.0, 0.5, 2.0}) {
                for (int nu : {0, 1, 2}) {
                    const auto f = [nu](double t) { return std::pow(t, nu); };
                    const double closed = moment_closed_form(nu, n, params, x);
                    const double direct = apply(f, n, params, x);
                    CHECK(direct ==
                          doctest::Approx(closed).epsilon(1e-8));
                }
            }
        }
    }
}

TEST_CASE("linearity") {
    const auto params = PQParams::make(0.95, 0.9);
    const auto f = [](double t) { return t; };
    const auto g = [](double t) { return t * t; };
    const auto combo = [&](double t) { return 2.0 * f(t) + 3.0 * g(t); };
    const double lhs = apply(combo, 5, params, 1.0);
    const double rhs = 2.0 * apply(f, 5, params, 1.0) +
                       3.0 * apply(g, 5, params, 1.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("nonnegative nondecreasing inputs keep a nonnegative image") {
    const auto params = PQParams::make(0.9, 0.8);
    const auto f = [](double t) { return t / (1.0 + t); };
    for (double x : {0.0, 0.5, 1.0, 2.0}) {
        const double v = apply(f, 5, params, x);
        CHECK(v >= 0.0);
        CHECK(v <= apply([](double t) { return t; }, 5, params, x) + 1e-12);
    }
}

TEST_CASE("diagnostics on a well-behaved input") {
    const auto params = PQParams::make(0.95, 0.9);
    ApplyDiagnostics diag{};
    apply([](double t) { return t * t; }, 5, params, 1.0, {}, {}, &diag);
    CHECK(diag.terms_used > 0);
    CHECK(diag.negative_cells == 0);

    ApplyDiagnostics at_zero{};
    apply([](double t) { return 1.0 + t; }, 5, params, 0.0, {}, {}, &at_zero);
    CHECK(at_zero.terms_used == 1);
}

TEST_CASE("negative cell integrals: warn counts, error throws") {
    const auto params = PQParams::make(0.95, 0.9);
    ApplyDiagnostics diag{};
    const double v = apply([](double) { return -1.0; }, 5, params, 1.0, {}, {},
                           &diag);
    CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(diag.negative_cells >= 1);
    CHECK(diag.negative_cells == diag.terms_used);

    const auto steep = [](double t) { return std::exp(-50.0 * t); };
    ApplyDiagnostics steep_diag{};
    apply(steep, 5, PQParams::make(0.9, 0.8), 1.0, {}, {}, &steep_diag);
    CHECK(steep_diag.negative_cells >= 1);

    OperatorConfig strict;
    strict.negative_cell_policy = NegativeCellPolicy::error;
    CHECK_THROWS_AS(
        apply([](double) { return -1.0; }, 5, params, 1.0, {}, strict),
        std::domain_error);
}

TEST_CASE("the selected basis is the one that matches the moments") {
    const auto params = PQParams::make(0.9, 0.8);
    const double closed = moment_closed_form(1, 5, params, 1.0);

    BasisSpec swapped_exponential;
    swapped_exponential.exponential_kind = ExponentialKind::small_e;
    swapped_exponential.power_coefficient = BasisSpec::TriangularPower::p_power;
    const double off_both = apply([](double t) { return t; }, 5, params, 1.0,
                                  swapped_exponential);
    CHECK(std::fabs(off_both - closed) > 1e-3);

    BasisSpec swapped_power;
    swapped_power.power_coefficient = BasisSpec::TriangularPower::p_power;
    const double off_power = apply([](double t) { return t; }, 5, params, 1.0,
                                   swapped_power);
    CHECK(std::fabs(off_power - closed) > 1e-3);
}

TEST_CASE("second central moment agrees with its expansion") {
    std::mt19937 rng(424242u);
    for (int trial = 0; trial < 400; ++trial) {
        const double q = unif(rng, 0.3, 0.999);
        const double p = unif(rng, q, 1.0);
        const auto params = PQParams::make(p, q);
        const std::int64_t n = 1 + static_cast<std::int64_t>(unif(rng, 0.0, 199.0));
        const double x = unif(rng, 0.0, 4.0);
        const double direct = second_central_moment(n, params, x);
        const double expanded = moment_closed_form(2, n, params, x) -
                                2.0 * x * moment_closed_form(1, n, params, x) +
                                x * x;
        CHECK(std::fabs(direct - expanded) <
              1e-12 * (1.0 + std::fabs(direct) + x * x));
    }
}

TEST_CASE("second central moment hand values") {
    const auto classical = PQParams::make(1.0, 1.0);
    CHECK(second_central_moment(10, classical, 1.0) ==
          doctest::Approx(0.1 + 1.0 / 300.0).epsilon(1e-13));

    const auto params = PQParams::make(0.95, 0.9);
    const double b3 = pq_integer(3, params);
    const double b5 = pq_integer(5, params);
    CHECK(second_central_moment(5, params, 0.0) ==
          doctest::Approx(1.0 / (b3 * b5 * b5)).epsilon(1e-12));
}

TEST_CASE("validation") {
    const auto params = PQParams::make(0.95, 0.9);
    const auto f = [](double t) { return t; };
    CHECK_THROWS_AS(apply(f, 0, params, 1.0), std::domain_error);
    CHECK_THROWS_AS(apply(f, -3, params, 1.0), std::domain_error);
    CHECK_THROWS_AS(apply(f, 5, params, -0.5), std::domain_error);
    CHECK_THROWS_AS(moment_closed_form(3, 5, params, 1.0), std::domain_error);
    CHECK_THROWS_AS(moment_closed_form(-1, 5, params, 1.0), std::domain_error);

    OperatorConfig bad;
    bad.series_tol = 0.0;
    CHECK_THROWS_AS(apply(f, 5, params, 1.0, {}, bad), std::domain_error);

    CHECK_THROWS_AS(kantorovich_cell(0, 0, params), std::domain_error);
    CHECK_THROWS_AS(kantorovich_cell(5, -1, params), std::domain_error);
    CHECK_THROWS_AS(basis_weight(5, -1, params, 1.0), std::domain_error);
}
