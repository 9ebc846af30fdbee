#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ggbm/errors.hpp"
#include "ggbm/quadrature.hpp"
#include "ggbm/specfun.hpp"

using namespace ggbm;
using specfun::Beta;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

// Reference values: tests/oracles/compute_oracles.py (mpmath, 250 digits).
TEST_CASE("mittag-leffler against extended-precision values") {
    struct Row {
        double beta;
        double x;
        double value;
    };
    const std::vector<Row> rows = {
        {0.25, 0.1, 0.89996132989886404151}, {0.25, 1, 0.46385276080171328694},
        {0.25, 5, 0.14279894642587369523},   {0.25, 10, 0.076237035239721635688},
        {0.25, 20, 0.039426390446653064471}, {0.25, 50, 0.016097508838799057449},
        {0.5, 0.1, 0.89645697996912663666},  {0.5, 1, 0.42758357615580700441},
        {0.5, 5, 0.11070463773306862637},    {0.5, 10, 0.056140992743822585858},
        {0.5, 20, 0.028174348741051319319},  {0.5, 50, 0.0112815362653237725},
        {0.75, 0.1, 0.89833981373612591477}, {0.75, 1, 0.39310830281575406177},
        {0.75, 5, 0.067923974332643942122},  {0.75, 10, 0.030643250976059637773},
        {0.75, 20, 0.014527522154459504195}, {0.75, 50, 0.0056311878629451302351},
        {0.9, 3, 0.083888354033773262067},   {0.75, 0.5, 0.60379034509524675559},
    };
    for (const auto& r : rows) {
        CAPTURE(r.beta);
        CAPTURE(r.x);
        CHECK(rel_err(specfun::mittag_leffler_neg(Beta(r.beta), r.x), r.value) < 1e-10);
    }
}

TEST_CASE("mittag-leffler closed forms") {
    for (double x : {0.0, 0.3, 1.0, 7.0, 40.0}) {
        CHECK(rel_err(specfun::mittag_leffler_neg(Beta(1.0), x), std::exp(-x)) < 1e-14);
        CHECK(rel_err(specfun::mittag_leffler_neg(Beta(0.0), x), 1.0 / (1.0 + x)) < 1e-14);
        // E_{1/2}(-x) = exp(x^2) erfc(x)
        if (x < 20) {
            CHECK(rel_err(specfun::mittag_leffler_neg(Beta(0.5), x), std::exp(x * x) * std::erfc(x)) < 1e-9);
        }
    }
    CHECK(specfun::mittag_leffler_neg(Beta(0.3), 0.0) == 1.0);
}

TEST_CASE("mittag-leffler is decreasing and convex in x") {
    for (double b : {0.1, 0.25, 0.5, 0.75, 0.95}) {
        double prev2 = NAN;
        double prev = specfun::mittag_leffler_neg(Beta(b), 0.0);
        for (double x = 0.25; x <= 30.0; x += 0.25) {
            const double v = specfun::mittag_leffler_neg(Beta(b), x);
            CHECK(v < prev);
            CHECK(v > 0.0);
            if (!std::isnan(prev2)) {
                CHECK(v - 2.0 * prev + prev2 > -1e-12);
            }
            prev2 = prev;
            prev = v;
        }
    }
}

TEST_CASE("m-wright against extended-precision values") {
    struct Row {
        double beta;
        double tau;
        double value;
        double tol;
    };
    const std::vector<Row> rows = {
        {0.25, 0.5, 0.56796881884076957626, 1e-10},  {0.25, 3, 0.061922084251616722262, 1e-10},
        {0.75, 0.5, 0.44502484123873669753, 1e-10},  {0.75, 2, 0.22514007014896749913, 1e-10},
        {0.75, 4, 4.5046280751923516817e-12, 1e-9},  {0.3, 1.5, 0.26115102031517885327, 1e-10},
        {0.6, 6, 6.6063158197233882827e-8, 1e-9},    {0.9, 1, 1.0081467456212712044, 1e-10},
        {0.1, 10, 4.860528275392853773e-5, 1e-9},    {0.5, 2, 0.20755374871029735167, 1e-10},
        {0.5, 9, 9.056529479543449603e-10, 1e-9},    {1.0 / 3.0, 1, 0.39623947970650259057, 1e-10},
    };
    for (const auto& r : rows) {
        CAPTURE(r.beta);
        CAPTURE(r.tau);
        CHECK(rel_err(specfun::mwright(Beta(r.beta), r.tau), r.value) < r.tol);
    }
}

TEST_CASE("m-wright gaussian and airy identities") {
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (double tau = 0.0; tau <= 10.0; tau += 0.125) {
        const double g = std::exp(-tau * tau / 4.0) / sqrt_pi;
        CHECK(std::abs(specfun::mwright(Beta(0.5), tau) - g) <= 1e-12 * g + 1e-300);
    }
    const double c = std::pow(3.0, 2.0 / 3.0);
    for (double tau = 0.0; tau <= 5.0; tau += 0.125) {
        const double a = c * specfun::airy_ai(tau / std::pow(3.0, 1.0 / 3.0));
        CHECK(rel_err(specfun::mwright(Beta(1.0 / 3.0), tau), a) < 1e-8);
    }
}

TEST_CASE("m-wright edge cases") {
    CHECK(specfun::mwright(Beta(0.0), 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(rel_err(specfun::mwright(Beta(0.4), 0.0), 1.0 / std::tgamma(0.6)) < 1e-14);
    CHECK_THROWS_AS(specfun::mwright(Beta(1.0), 1.0), BetaIsOne);
    CHECK_THROWS_AS(specfun::mwright(Beta(0.5), -1.0), DomainError);
    CHECK_THROWS_AS(specfun::mittag_leffler_neg(Beta(0.5), -1.0), DomainError);
    CHECK_THROWS_AS(Beta(1.5), InvalidBeta);
    CHECK_THROWS_AS(Beta(-0.1), InvalidBeta);
    CHECK_THROWS_AS(Beta(NAN), InvalidBeta);
    // The log form stays finite where the value underflows.
    const double lm = specfun::log_mwright(Beta(0.5), 60.0);
    CHECK(rel_err(lm, -900.0 - 0.5 * std::log(std::numbers::pi)) < 1e-12);
}

TEST_CASE("m-wright is a probability density with mean 1/gamma(1+beta)") {
    for (double b : {0.2, 0.5, 0.8}) {
        const Beta beta(b);
        quadrature::QuadratureSpec spec;
        auto mass = quadrature::integrate_halfline([&](double t) { return specfun::mwright(beta, t); }, spec);
        auto mean = quadrature::integrate_halfline([&](double t) { return t * specfun::mwright(beta, t); }, spec);
        CHECK(std::abs(mass.value - 1.0) < 1e-9);
        CHECK(rel_err(mean.value, 1.0 / std::tgamma(1.0 + b)) < 1e-9);
    }
}

TEST_CASE("laplace transform of m-wright is mittag-leffler") {
    for (double b : {0.25, 0.5, 0.75}) {
        for (double s : {0.1, 1.0, 5.0, 10.0}) {
            const auto p = specfun::mwright_laplace_check(Beta(b), s);
            CHECK(rel_err(p.lhs, p.rhs) < 1e-8);
        }
    }
    const auto p = specfun::mwright_laplace_check(Beta(0.5), 1.0);
    CHECK(rel_err(p.lhs, 0.42758357615580700441) < 1e-10);
}

TEST_CASE("d-dimensional m-wright function") {
    // Frozen value at beta = 1/2, d = 1, x = 1, t = 1.
    const double x1[] = {1.0};
    CHECK(rel_err(specfun::mwright_density_d(Beta(0.5), x1, 1.0), 0.38333541657068353578) < 1e-9);
    // beta = 1 is twice the heat kernel.
    const double x2[] = {0.3, -1.2};
    const double r2 = 0.09 + 1.44;
    const double heat = 2.0 * std::exp(-r2 / 8.0) / (4.0 * std::numbers::pi * 2.0);
    CHECK(rel_err(specfun::mwright_density_d(Beta(1.0), x2, 2.0), heat) < 1e-14);
    // Radial: only |x| matters.
    const double x3[] = {std::sqrt(r2), 0.0};
    CHECK(rel_err(specfun::mwright_density_d(Beta(0.6), x2, 1.5), specfun::mwright_density_d(Beta(0.6), x3, 1.5)) <
          1e-12);
    const double zero[] = {0.0, 0.0};
    CHECK(std::isinf(specfun::mwright_density_d(Beta(0.6), zero, 1.0)));
    CHECK_THROWS_AS(specfun::mwright_density_d(Beta(0.6), x2, 0.0), DomainError);
}

TEST_CASE("auxiliary special functions") {
    CHECK(rel_err(specfun::bessel_k0(1.0), 0.42102443824070833334) < 1e-14);
    CHECK(rel_err(specfun::bessel_k0(0.05), 3.1142340294719898387) < 1e-14);
    CHECK(rel_err(specfun::bessel_k0(7.0), 4.2479574186923180685e-4) < 1e-13);
    CHECK(rel_err(specfun::airy_ai(0.0), 0.35502805388781723926) < 1e-14);
    CHECK(rel_err(specfun::airy_ai(-2.5), -0.11232506769296608919) < 1e-12);
    CHECK(rel_err(specfun::airy_ai(3.0), 0.0065911393574607191443) < 1e-12);
    CHECK(specfun::rgamma(-2.0) == 0.0);
    CHECK(rel_err(specfun::gamma_fn(4.5), 11.631728396567448929) < 1e-14);
    CHECK_THROWS_AS(specfun::gamma_fn(-3.0), DomainError);
    CHECK_THROWS_AS(specfun::bessel_k0(0.0), DomainError);
}

TEST_CASE("series accuracy validation") {
    specfun::SeriesAccuracy acc;
    acc.rel_tol = 0.0;
    CHECK_THROWS_AS(acc.validate(), InvalidParameter);
    CHECK_THROWS_AS(specfun::mittag_leffler_neg(Beta(0.5), 1.0, acc), InvalidParameter);
}
