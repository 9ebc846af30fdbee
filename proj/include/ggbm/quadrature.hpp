#pragma once

#include <functional>
#include <span>

namespace ggbm::quadrature {

enum class Transform {
    /// tau = center * exp(u), u = t / (1 - t^2), adaptive Gauss-Kronrod on t in (-1, 1).
    log_substitution,
    /// tau = center * exp(pi/2 * sinh(t)), trapezoid with step halving.
    double_exponential,
};

/// Configuration for integrals over [0, inf).
///
/// The upper tail is never truncated at a fixed point. Under log_substitution
/// the open map u = t/(1-t^2) sends both ends of the half line to the edges of
/// (-1, 1), where Kronrod nodes never land; an integrand that decays at least
/// like a power on either side makes the panels next to the edges converge
/// like any other panel. Under double_exponential the trapezoid sum is cut
/// once successive terms fall below abs_tol/10 in both directions.
struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int max_subdivisions = 4000;
    Transform transform = Transform::log_substitution;
    /// Scale where the integrand's mass is expected; only affects efficiency.
    double center = 1.0;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    int evaluations = 0;
};

/// Integral of a log-integrand: the result is exp(log_value) with relative
/// error rel_err. Used where the integral itself under- or overflows.
struct LogQuadResult {
    double log_value = 0.0;
    double rel_err = 0.0;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (10/21) on a finite interval.
QuadResult integrate_interval(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                              int max_subdivisions = 4000);

/// Same, starting from the given panel boundaries (increasing, at least two).
QuadResult integrate_breakpoints(const Integrand& f, std::span<const double> breaks, double abs_tol,
                                 double rel_tol, int max_subdivisions = 4000);

/// Integral of f over (0, inf). Throws ToleranceNotMet or NonFiniteIntegrand.
QuadResult integrate_halfline(const Integrand& f, const QuadratureSpec& spec = {});

/// Integral over (0, inf) of exp(log_f(tau)). log_f may return -inf where
/// the integrand vanishes. The maximum of log_f is factored out first.
LogQuadResult integrate_halfline_log(const Integrand& log_f, const QuadratureSpec& spec = {});

}  // namespace ggbm::quadrature
