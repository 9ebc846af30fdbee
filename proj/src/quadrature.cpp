#include "ggbm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "ggbm/errors.hpp"

namespace ggbm::quadrature {
namespace {

// 21-point Kronrod abscissae/weights and the embedded 10-point Gauss weights (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208643474695, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double checked(double v, double at) {
    if (!std::isfinite(v)) {
        throw NonFiniteIntegrand("integrand returned a non-finite value", at);
    }
    return v;
}

Panel gk21(const Integrand& f, double a, double b, int& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f(center), center);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = checked(f(center - dx), center - dx);
        const double f2 = checked(f(center + dx), center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    evals += 21;
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

QuadResult adaptive(const Integrand& f, std::span<const double> breaks, double abs_tol, double rel_tol,
                    int max_subdivisions) {
    std::priority_queue<Panel> work;
    std::vector<Panel> done;
    int evals = 0;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        Panel p = gk21(f, breaks[i], breaks[i + 1], evals);
        total += p.value;
        total_err += p.err;
        work.push(p);
    }

    auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
    int subdivisions = 0;
    while (!work.empty() && total_err > target()) {
        Panel worst = work.top();
        work.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const double width_floor = 8.0 * std::numeric_limits<double>::epsilon() *
                                   std::max({std::abs(worst.a), std::abs(worst.b), 1e-300});
        if (worst.b - worst.a <= width_floor || subdivisions >= max_subdivisions) {
            // Panel cannot shrink further; its error stays in the budget.
            done.push_back(worst);
            if (subdivisions >= max_subdivisions) {
                break;
            }
            continue;
        }
        ++subdivisions;
        Panel left = gk21(f, worst.a, mid, evals);
        Panel right = gk21(f, mid, worst.b, evals);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        work.push(left);
        work.push(right);
    }
    while (!work.empty()) {
        done.push_back(work.top());
        work.pop();
    }

    // Fixed summation order: panels by left endpoint.
    std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    CompensatedSum value;
    CompensatedSum err;
    for (const auto& p : done) {
        value.add(p.value);
        err.add(p.err);
    }
    QuadResult r{value.value(), err.value(), evals};
    const double eps_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(r.value);
    if (r.err_est > std::max({abs_tol, rel_tol * std::abs(r.value), eps_floor})) {
        throw ToleranceNotMet("adaptive quadrature did not reach tolerance (estimate " +
                                  std::to_string(r.err_est) + ")",
                              r.value, r.err_est);
    }
    return r;
}

// Maps t in (-1, 1) to tau in (0, inf); returns 0 where tau leaves the double range.
struct LogMap {
    double log_center;
    double tau(double t, double& jac) const {
        const double den = 1.0 - t * t;
        const double u = t / den;
        const double du = (1.0 + t * t) / (den * den);
        const double lt = log_center + u;
        if (lt < -700.0 || lt > 700.0) {
            jac = 0.0;
            return 0.0;
        }
        const double tau = std::exp(lt);
        jac = tau * du;
        return tau;
    }
};

QuadResult adaptive(const Integrand& f, double a, double b, int initial_panels, double abs_tol,
                    double rel_tol, int max_subdivisions) {
    std::vector<double> breaks(initial_panels + 1);
    for (int i = 0; i <= initial_panels; ++i) {
        breaks[i] = a + (b - a) * i / initial_panels;
    }
    breaks.back() = b;
    return adaptive(f, breaks, abs_tol, rel_tol, max_subdivisions);
}

QuadResult double_exponential(const Integrand& f, const QuadratureSpec& spec) {
    using std::numbers::pi;
    const double log_center = std::log(spec.center);
    constexpr double t_max = 6.5;
    int evals = 0;
    auto term = [&](double t) {
        const double lt = log_center + 0.5 * pi * std::sinh(t);
        if (lt < -700.0 || lt > 700.0) {
            return 0.0;
        }
        const double tau = std::exp(lt);
        ++evals;
        return checked(f(tau), tau) * tau * 0.5 * pi * std::cosh(t);
    };

    // Sum over t = offset + k*step in both directions until the terms die out.
    auto sweep = [&](double offset, double step, double scale) {
        CompensatedSum s;
        for (int dir : {1, -1}) {
            int quiet = 0;
            for (double t = dir > 0 ? offset : offset - step; std::abs(t) <= t_max; t += dir * step) {
                const double v = term(t);
                s.add(v);
                quiet = std::abs(v) <= 1e-3 * spec.abs_tol + 1e-18 * std::abs(scale) ? quiet + 1 : 0;
                if (quiet >= 4 && std::abs(t) > 1.0) {
                    break;
                }
            }
        }
        return s.value();
    };

    double h = 0.5;
    double sum = sweep(0.0, h, 0.0);
    double estimate = sum * h;
    double err = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= 12; ++level) {
        sum += sweep(0.5 * h, h, sum);
        h *= 0.5;
        const double next = sum * h;
        err = std::abs(next - estimate);
        estimate = next;
        if (level >= 3 && err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(estimate))) {
            return {estimate, err, evals};
        }
    }
    throw ToleranceNotMet("double-exponential quadrature did not converge", estimate, err);
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw InvalidParameter("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw InvalidParameter("max_subdivisions must be at least 1");
    }
    if (!(center > 0.0) || !std::isfinite(center)) {
        throw InvalidParameter("quadrature center must be positive and finite");
    }
}

QuadResult integrate_interval(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                              int max_subdivisions) {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw InvalidParameter("quadrature tolerances must be positive");
    }
    if (a == b) {
        return {};
    }
    return adaptive(f, a, b, 1, abs_tol, rel_tol, max_subdivisions);
}

QuadResult integrate_breakpoints(const Integrand& f, std::span<const double> breaks, double abs_tol,
                                 double rel_tol, int max_subdivisions) {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw InvalidParameter("quadrature tolerances must be positive");
    }
    if (breaks.size() < 2 || !std::is_sorted(breaks.begin(), breaks.end())) {
        throw InvalidParameter("breakpoints must be an increasing list of at least two points");
    }
    return adaptive(f, breaks, abs_tol, rel_tol, max_subdivisions);
}

QuadResult integrate_halfline(const Integrand& f, const QuadratureSpec& spec) {
    spec.validate();
    if (spec.transform == Transform::double_exponential) {
        return double_exponential(f, spec);
    }
    const LogMap map{std::log(spec.center)};
    auto g = [&](double t) {
        double jac = 0.0;
        const double tau = map.tau(t, jac);
        if (jac == 0.0) {
            return 0.0;
        }
        return checked(f(tau), tau) * jac;
    };
    return adaptive(g, -1.0, 1.0, 16, spec.abs_tol, spec.rel_tol, spec.max_subdivisions);
}

LogQuadResult integrate_halfline_log(const Integrand& log_f, const QuadratureSpec& spec) {
    spec.validate();
    const double log_center = std::log(spec.center);

    // Walk outward from the center until the log-integrand (with the
    // d tau = tau du Jacobian) has dropped 45 below the running maximum on
    // both sides; the maximum becomes the shift. Assumes one dominant mode.
    double shift = -std::numeric_limits<double>::infinity();
    double peak = log_center;
    auto probe = [&](double lt) {
        const double v = log_f(std::exp(lt)) + lt;
        if (std::isnan(v)) {
            throw NonFiniteIntegrand("log-integrand returned NaN", std::exp(lt));
        }
        if (v > shift) {
            shift = v;
            peak = lt;
        }
        return v;
    };
    probe(log_center);
    for (double dir : {1.0, -1.0}) {
        // Past 120 the walk only continues while it is still climbing.
        double prev = -std::numeric_limits<double>::infinity();
        for (double u = 0.5;; u += 0.5) {
            const double lt = log_center + dir * u;
            if (lt < -700.0 || lt > 700.0) {
                break;
            }
            const double v = probe(lt);
            if (std::isfinite(shift) && v < shift - 45.0) {
                break;
            }
            if (u > 120.0 && !(v > prev)) {
                break;
            }
            prev = v;
        }
    }
    if (!std::isfinite(shift)) {
        if (shift > 0) {
            throw NonFiniteIntegrand("log-integrand is +inf", std::exp(peak));
        }
        return {-std::numeric_limits<double>::infinity(), 0.0, 0};
    }

    // A peak much narrower than the walk step: polish its location by golden
    // section and shrink the map to its width, or the panels would miss it.
    auto value_at = [&](double lt) {
        const double v = log_f(std::exp(lt)) + lt;
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };
    double scale = 1.0;
    if (value_at(peak - 0.5) < shift - 20.0 && value_at(peak + 0.5) < shift - 20.0) {
        constexpr double kGold = 0.6180339887498949;
        double a = peak - 0.5;
        double b = peak + 0.5;
        double x1 = b - kGold * (b - a);
        double x2 = a + kGold * (b - a);
        double f1 = value_at(x1);
        double f2 = value_at(x2);
        for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(peak)); ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kGold * (b - a);
                f2 = value_at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kGold * (b - a);
                f1 = value_at(x1);
            }
        }
        peak = f1 > f2 ? x1 : x2;
        shift = std::max(f1, f2);
        // Width from the second difference, shrinking the step with the estimate.
        double step = 0.25;
        for (int it = 0; it < 60; ++it) {
            const double d2 = (value_at(peak + step) - 2.0 * shift + value_at(peak - step)) / (step * step);
            const double width = d2 < 0.0 ? 1.0 / std::sqrt(-d2) : step;
            if (!std::isfinite(width) || width >= 0.25 * step) {
                scale = std::min(1.0, std::max(width, 1e-12));
                break;
            }
            step = width;
        }
    }

    // Integrate exp(log_f + log|d tau/dt| - shift) on the mapped axis so that
    // neither factor is exponentiated on its own.
    auto g = [&](double t) {
        const double den = 1.0 - t * t;
        const double lt = peak + scale * t / den;
        if (lt < -700.0 || lt > 700.0) {
            return 0.0;
        }
        const double v = log_f(std::exp(lt));
        if (std::isnan(v)) {
            throw NonFiniteIntegrand("log-integrand returned NaN", std::exp(lt));
        }
        return std::exp(v + lt + std::log(scale * (1.0 + t * t) / (den * den)) - shift);
    };
    // exp(log_f) carries absolute rounding of order eps * |log_f| in the
    // exponent; no tolerance below that floor can be met.
    const double rel_tol = std::max(spec.rel_tol, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(shift));
    const QuadResult r = adaptive(g, -1.0, 1.0, 16, 1e-300, rel_tol, spec.max_subdivisions);
    if (!(r.value > 0.0)) {
        return {-std::numeric_limits<double>::infinity(), 0.0, r.evaluations};
    }
    return {shift + std::log(r.value), r.err_est / r.value, r.evaluations};
}

}  // namespace ggbm::quadrature
