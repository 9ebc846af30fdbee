#pragma once

#include <span>

namespace ggbm::specfun {

/// Order of the Mittag-Leffler / M-Wright pair.
///
/// The admissible range is 0 < beta <= 1. beta = 0 is accepted as the
/// limiting case of the closed-form table (M_0(tau) = exp(-tau),
/// E_0(-s) = 1/(1+s)) and reported through is_limit_case().
class Beta {
public:
    explicit Beta(double value);

    double value() const { return value_; }
    bool is_limit_case() const { return value_ == 0.0; }
    bool is_one() const { return value_ == 1.0; }

private:
    double value_;
};

/// Accuracy contract for E_beta and M_beta.
struct SeriesAccuracy {
    double rel_tol = 1e-10;
    int max_terms = 400;
    /// E_beta(-x): Taylor series for x <= series_switch, asymptotic expansion above.
    double series_switch = 10.0;
    /// M_beta(tau): power series is attempted only for tau <= mwright_switch.
    double mwright_switch = 8.0;

    void validate() const;
};

/// E_beta(-x) for x >= 0.
///
/// Three regimes, each with its own error certificate:
///  - Taylor series (compensated) while the cancellation bound allows it;
///  - the algebraic asymptotic expansion, optimally truncated, for x > series_switch;
///  - the positive spectral integral
///      E_beta(-x) = sin(beta pi)/(beta pi) * int_0^inf exp(-(x u)^(1/beta)) / (u^2 + 2u cos(beta pi) + 1) du
///    whenever neither expansion certifies rel_tol.
/// Throws AccuracyNotMet if none of them does.
double mittag_leffler_neg(const Beta& beta, double x, const SeriesAccuracy& acc = {});

/// M_beta(tau) for tau >= 0 and 0 <= beta < 1 (beta = 0 gives exp(-tau)).
///
/// Small tau uses the Wright series. Elsewhere the value comes from the
/// non-oscillatory representation obtained from Kanter's formula for the
/// one-sided stable law,
///   M_beta(tau) = tau^(beta/(1-beta)) / (pi (1-beta)) * int_0^pi A(phi) exp(-tau^(1/(1-beta)) A(phi)) dphi,
///   A(phi) = sin(beta phi)^(beta/(1-beta)) sin((1-beta) phi) / sin(phi)^(1/(1-beta)).
/// Throws BetaIsOne for beta = 1.
double mwright(const Beta& beta, double tau, const SeriesAccuracy& acc = {});

/// ln M_beta(tau); finite deep in the tail where M_beta underflows.
double log_mwright(const Beta& beta, double tau, const SeriesAccuracy& acc = {});

struct LaplacePair {
    double lhs;  ///< int_0^inf exp(-s tau) M_beta(tau) dtau by quadrature
    double rhs;  ///< E_beta(-s)
};

LaplacePair mwright_laplace_check(const Beta& beta, double s, const SeriesAccuracy& acc = {});

/// The d-dimensional two-variable M-Wright function of order beta/2,
///   2 int_0^inf (4 pi tau)^(-d/2) exp(-|x|^2 / (4 tau)) t^(-beta) M_beta(tau t^(-beta)) dtau,
/// with d = x.size(). At beta = 1 the Dirac weight collapses the integral.
/// Returns +inf at x = 0 when d >= 2 and beta < 1 (the integral diverges there).
double mwright_density_d(const Beta& beta, std::span<const double> x, double t,
                         const SeriesAccuracy& acc = {});

/// ln of mwright_density_d, for use where the value underflows.
double log_mwright_density_d(const Beta& beta, std::span<const double> x, double t,
                             const SeriesAccuracy& acc = {});

double gamma_fn(double x);
/// 1/Gamma(x), exactly 0 at the poles.
double rgamma(double x);
double bessel_k0(double x);
double airy_ai(double x);

}  // namespace ggbm::specfun
