#include "ggbm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/airy.hpp>

#include "ggbm/errors.hpp"
#include "ggbm/quadrature.hpp"

namespace ggbm::specfun {
namespace {

using std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
        abs_ += std::abs(x);
    }
    double value() const { return sum_ + comp_; }
    double abs_total() const { return abs_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
};

/// sin(pi * z) with the argument reduced first so that sin(pi * n) is exactly 0.
double sin_pi(double z) {
    const double r = z - 2.0 * std::round(0.5 * z);  // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) {
        return 0.0;
    }
    if (r > 0.5) {
        return std::sin(pi * (1.0 - r));
    }
    if (r < -0.5) {
        return -std::sin(pi * (1.0 + r));
    }
    return std::sin(pi * r);
}

/// ln|1/Gamma(z)| and its sign; sign 0 at the poles.
struct SignedLog {
    double log_abs;
    int sign;
};

SignedLog log_rgamma(double z) {
    if (z > 0.0) {
        return {-std::lgamma(z), 1};
    }
    if (z == std::floor(z)) {
        return {kNegInf, 0};
    }
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    const double s = sin_pi(z);
    return {std::log(std::abs(s)) + std::lgamma(1.0 - z) - std::log(pi), s > 0 ? 1 : -1};
}

struct SeriesResult {
    double value = 0.0;
    double err = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Rounding error bound of a compensated alternating sum whose terms were
// computed as exp(L) with |L| up to max_log.
double rounding_bound(const CompensatedSum& s, double max_log) {
    return kEps * s.abs_total() * (8.0 + max_log);
}

SeriesResult mlf_taylor(double beta, double x, int max_terms) {
    CompensatedSum sum;
    double max_log = 0.0;
    const double lx = std::log(x);
    double prev_log = 0.0;
    for (int n = 0; n < max_terms; ++n) {
        const double l = n * lx - std::lgamma(beta * n + 1.0);
        const double term = (n % 2 == 0 ? 1.0 : -1.0) * std::exp(l);
        sum.add(term);
        max_log = std::max(max_log, std::abs(l));
        if (n > 2 && l < prev_log && std::exp(l) < 0.1 * kEps * std::abs(sum.value())) {
            return {sum.value(), rounding_bound(sum, max_log) + std::exp(l), true};
        }
        prev_log = l;
    }
    return {sum.value(), std::numeric_limits<double>::infinity(), false};
}

// E_beta(-x) ~ sum_{n>=1} (-1)^(n+1) x^(-n) / Gamma(1 - beta n)
//            = sum_{n>=1} (-1)^(n+1) sin(pi beta n) Gamma(beta n) / (pi x^n)
SeriesResult mlf_asymptotic(double beta, double x, int max_terms) {
    CompensatedSum sum;
    const double lx = std::log(x);
    auto bound_log = [&](int n) { return std::lgamma(beta * n) - std::log(pi) - n * lx; };
    double max_log = 0.0;
    for (int n = 1; n < max_terms; ++n) {
        const double lb = bound_log(n);
        const double next = bound_log(n + 1);
        const double term = (n % 2 == 1 ? 1.0 : -1.0) * sin_pi(beta * n) * std::exp(lb);
        sum.add(term);
        max_log = std::max(max_log, std::abs(lb));
        if (next >= lb || std::exp(next) < 0.1 * kEps * std::abs(sum.value())) {
            // Optimal truncation: the first omitted term bounds the remainder.
            return {sum.value(), 2.0 * std::exp(next) + rounding_bound(sum, max_log), true};
        }
    }
    return {sum.value(), std::numeric_limits<double>::infinity(), false};
}

double mlf_spectral(double beta, double x, double rel_tol) {
    const double c = std::cos(pi * beta);
    const double inv_beta = 1.0 / beta;
    auto f = [&](double u) {
        const double den = u * u + 2.0 * u * c + 1.0;
        return std::exp(-std::pow(x * u, inv_beta)) / den;
    };
    quadrature::QuadratureSpec spec;
    spec.rel_tol = std::max(rel_tol, 4.0 * kEps);
    spec.abs_tol = 1e-300;
    spec.center = 1.0 / (1.0 + x);
    const auto r = quadrature::integrate_halfline(f, spec);
    return std::sin(pi * beta) / (pi * beta) * r.value;
}

SeriesResult mwright_series(double beta, double tau, int max_terms) {
    CompensatedSum sum;
    if (tau == 0.0) {
        const auto g = log_rgamma(1.0 - beta);
        return {g.sign * std::exp(g.log_abs), 0.0, true};
    }
    const double lt = std::log(tau);
    double max_log = 0.0;
    int small = 0;
    for (int n = 0; n < max_terms; ++n) {
        const double z = 1.0 - beta * (n + 1);
        const auto g = log_rgamma(z);
        const double base = n * lt - std::lgamma(n + 1.0);
        // Magnitude bound with |sin| <= 1; exact term uses the true sign and sine.
        const double bound = base + (z > 0.0 ? -std::lgamma(z) : std::lgamma(1.0 - z) - std::log(pi));
        if (g.sign != 0) {
            const double l = base + g.log_abs;
            sum.add((n % 2 == 0 ? 1.0 : -1.0) * g.sign * std::exp(l));
            max_log = std::max(max_log, std::abs(l));
        }
        const bool tiny = n > tau && std::exp(bound) < 0.1 * kEps * std::abs(sum.value());
        small = tiny ? small + 1 : 0;
        if (small >= 3) {
            return {sum.value(), rounding_bound(sum, max_log), true};
        }
    }
    return {sum.value(), std::numeric_limits<double>::infinity(), false};
}

double log_sinc(double y) {
    if (std::abs(y) < 1e-2) {
        const double y2 = y * y;
        return -y2 * (1.0 / 6.0 + y2 * (1.0 / 180.0 + y2 * (1.0 / 2835.0)));
    }
    return std::log(std::sin(y) / y);
}

// ln A(phi) - ln A(0+) for Kanter's function, written with sinc so that the
// difference keeps full relative precision as phi -> 0.
double kanter_log_ratio(double beta, double phi) {
    const double q = 1.0 / (1.0 - beta);
    return beta * q * log_sinc(beta * phi) + log_sinc((1.0 - beta) * phi) - q * log_sinc(phi);
}

double log_mwright_kanter(double beta, double tau, double rel_tol) {
    const double q = 1.0 / (1.0 - beta);
    if (q * std::log(tau) > 700.0) {
        return kNegInf;  // ln M_beta below -1e300
    }
    const double x = std::pow(tau, q);
    const double a0 = std::pow(beta, beta * q) * (1.0 - beta);
    const double la0 = std::log(a0);

    // A(phi) exp(-x (A(phi) - A0))
    auto g = [&](double phi) {
        const double dl = kanter_log_ratio(beta, phi);
        const double excess = x * a0 * std::expm1(dl);
        if (!std::isfinite(excess)) {
            return 0.0;
        }
        return std::exp(la0 + dl - excess);
    };

    // A(phi) - A0 ~ c A0 phi^2 near 0: grade the panels toward the peak width.
    const double h = 1e-3;
    const double c = std::max(std::expm1(kanter_log_ratio(beta, h)) / (h * h), 1e-3);
    const double width = 1.0 / std::sqrt(std::max(x * a0 * c, 1e-300));
    std::vector<double> breaks{0.0};
    for (double b = width; b < pi; b *= 4.0) {
        breaks.push_back(b);
    }
    breaks.push_back(pi);

    const double tol = std::max(rel_tol, 4.0 * kEps);
    const double total = quadrature::integrate_breakpoints(g, breaks, 1e-300, tol).value;
    if (!(total > 0.0)) {
        throw AccuracyNotMet("M-Wright integral representation vanished", 0.0, 0.0);
    }
    return beta * q * std::log(tau) - std::log(pi * (1.0 - beta)) - x * a0 + std::log(total);
}

void require_beta_below_one(const Beta& beta) {
    if (beta.is_one()) {
        throw BetaIsOne();
    }
}

}  // namespace

Beta::Beta(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidBeta("beta out of range (0,1]: " + std::to_string(value));
    }
}

void SeriesAccuracy::validate() const {
    if (!(rel_tol > 0.0) || max_terms < 1 || !(series_switch > 0.0) || !(mwright_switch > 0.0)) {
        throw InvalidParameter("SeriesAccuracy requires rel_tol > 0, max_terms >= 1 and positive switch points");
    }
}

double mittag_leffler_neg(const Beta& beta, double x, const SeriesAccuracy& acc) {
    acc.validate();
    if (!(x >= 0.0)) {
        throw DomainError("mittag_leffler_neg needs x >= 0");
    }
    const double b = beta.value();
    if (x == 0.0) {
        return 1.0;
    }
    if (b == 1.0) {
        return std::exp(-x);
    }
    if (b == 0.0) {
        return 1.0 / (1.0 + x);
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    const double budget = 0.1 * acc.rel_tol;
    const SeriesResult r =
        x <= acc.series_switch ? mlf_taylor(b, x, acc.max_terms) : mlf_asymptotic(b, x, acc.max_terms);
    if (r.converged && r.value > 0.0 && r.err <= budget * r.value) {
        return std::min(r.value, 1.0);
    }
    try {
        return mlf_spectral(b, x, budget);
    } catch (const ToleranceNotMet& e) {
        throw AccuracyNotMet("E_beta(-x): no evaluation regime certifies rel_tol", e.best_value, e.error_estimate);
    }
}

double log_mwright(const Beta& beta, double tau, const SeriesAccuracy& acc) {
    acc.validate();
    require_beta_below_one(beta);
    if (!(tau >= 0.0)) {
        throw DomainError("mwright needs tau >= 0");
    }
    const double b = beta.value();
    if (b == 0.0) {
        return -tau;
    }
    if (std::isinf(tau)) {
        return kNegInf;
    }
    const double budget = 0.1 * acc.rel_tol;
    if (tau <= acc.mwright_switch) {
        const SeriesResult r = mwright_series(b, tau, acc.max_terms);
        if (r.converged && r.value > 0.0 && r.err <= budget * r.value) {
            return std::log(r.value);
        }
    }
    try {
        return log_mwright_kanter(b, tau, budget);
    } catch (const ToleranceNotMet& e) {
        throw AccuracyNotMet("M_beta(tau): integral representation did not converge", e.best_value,
                             e.error_estimate);
    }
}

double mwright(const Beta& beta, double tau, const SeriesAccuracy& acc) {
    return std::exp(log_mwright(beta, tau, acc));
}

LaplacePair mwright_laplace_check(const Beta& beta, double s, const SeriesAccuracy& acc) {
    require_beta_below_one(beta);
    if (!(s >= 0.0)) {
        throw DomainError("Laplace variable must be >= 0");
    }
    quadrature::QuadratureSpec spec;
    spec.rel_tol = std::min(1e-11, acc.rel_tol);
    spec.abs_tol = 1e-15;
    spec.center = 1.0 / (1.0 + s);
    const auto lhs = quadrature::integrate_halfline(
        [&](double tau) { return std::exp(-s * tau + log_mwright(beta, tau, acc)); }, spec);
    return {lhs.value, mittag_leffler_neg(beta, s, acc)};
}

double log_mwright_density_d(const Beta& beta, std::span<const double> x, double t, const SeriesAccuracy& acc) {
    if (x.empty()) {
        throw DimensionMismatch("mwright_density_d needs at least one coordinate");
    }
    if (!(t > 0.0)) {
        throw DomainError("mwright_density_d needs t > 0");
    }
    const double d = static_cast<double>(x.size());
    double r2 = 0.0;
    for (double xi : x) {
        r2 += xi * xi;
    }
    const double b = beta.value();
    if (beta.is_one()) {
        return std::log(2.0) - 0.5 * d * std::log(4.0 * pi * t) - r2 / (4.0 * t);
    }
    if (r2 == 0.0 && x.size() >= 2) {
        return std::numeric_limits<double>::infinity();
    }
    const double scale = std::pow(t, -b);
    auto log_integrand = [&](double tau) {
        return -0.5 * d * std::log(4.0 * pi * tau) - r2 / (4.0 * tau) + std::log(scale) +
               log_mwright(beta, tau * scale, acc);
    };
    quadrature::QuadratureSpec spec;
    spec.rel_tol = 0.1 * acc.rel_tol;
    spec.center = 1.0 / scale;
    const auto r = quadrature::integrate_halfline_log(log_integrand, spec);
    return std::log(2.0) + r.log_value;
}

double mwright_density_d(const Beta& beta, std::span<const double> x, double t, const SeriesAccuracy& acc) {
    return std::exp(log_mwright_density_d(beta, x, t, acc));
}

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        throw DomainError("Gamma has a pole at " + std::to_string(x));
    }
    return std::tgamma(x);
}

double rgamma(double x) {
    const auto g = log_rgamma(x);
    return g.sign == 0 ? 0.0 : g.sign * std::exp(g.log_abs);
}

double bessel_k0(double x) {
    if (!(x > 0.0)) {
        throw DomainError("K0 needs x > 0");
    }
    return std::cyl_bessel_k(0.0, x);
}

double airy_ai(double x) { return boost::math::airy_ai(x); }

}  // namespace ggbm::specfun
