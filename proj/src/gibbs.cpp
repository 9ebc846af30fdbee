#include "ggbm/gibbs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ggbm/errors.hpp"
#include "ggbm/parallel.hpp"
#include "ggbm/quadrature.hpp"

namespace ggbm::gibbs {
namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxStride = 16;

double log_gaussian_prefactor(int dims, int d, double log_det) {
    return -0.5 * dims * std::log(2.0 * pi) - 0.5 * d * log_det;
}

}  // namespace

void EnergyQuery::validate() const {
    const auto expected = static_cast<std::size_t>(params.d) * static_cast<std::size_t>(params.n);
    if (y.size() != expected) {
        throw DimensionMismatch("y must hold d*N = " + std::to_string(expected) + " values, got " +
                                std::to_string(y.size()));
    }
    if (!(gap > 0.0)) {
        throw InvalidParameter("gap must be positive");
    }
}

double log_radial_integral(const specfun::Beta& beta, double k, double r2, const specfun::SeriesAccuracy& acc) {
    if (!(r2 >= 0.0)) {
        throw DomainError("squared norm must be >= 0");
    }
    if (beta.is_one()) {
        return -0.5 * r2;
    }
    if (r2 == 0.0 && k >= 1.0) {
        return kInf;
    }
    auto log_integrand = [&](double tau) {
        return -k * std::log(tau) - r2 / (2.0 * tau) + specfun::log_mwright(beta, tau, acc);
    };
    quadrature::QuadratureSpec spec;
    spec.rel_tol = std::max(0.1 * acc.rel_tol, 1e-14);
    // For k < 1 the mass sits at tau ~ 1 however small r2 is.
    spec.center = k < 1.0 ? std::clamp(r2 / (2.0 * k), 1e-3, 1.0) : std::clamp(r2 / (2.0 * k), 1e-200, 1.0);
    return quadrature::integrate_halfline_log(log_integrand, spec).log_value;
}

double log_density_N(const EnergyQuery& q, const specfun::SeriesAccuracy& acc) {
    q.validate();
    const auto& p = q.params;
    const auto chol = covariance::cholesky(covariance::mixing_cov(p, q.gap));
    const double r2 = covariance::mahalanobis_sq(q.y, chol, p.d);
    const int dims = p.d * p.n;
    return log_gaussian_prefactor(dims, p.d, chol.log_det()) + log_radial_integral(p.beta, 0.5 * dims, r2, acc);
}

double density_N(const EnergyQuery& q, const specfun::SeriesAccuracy& acc) {
    return std::exp(log_density_N(q, acc));
}

double energy(const EnergyQuery& q, const specfun::SeriesAccuracy& acc) {
    const double ld = log_density_N(q, acc);
    if (ld == -kInf || std::isnan(ld)) {
        const auto chol = covariance::cholesky(covariance::mixing_cov(q.params, q.gap));
        const double norm = std::sqrt(covariance::mahalanobis_sq(q.y, chol, q.params.d));
        throw Overflow("density underflows at |y|_Q = " + std::to_string(norm), norm);
    }
    return -ld;
}

double energy_two_particle(double beta, double alpha, double gap, std::span<const double> y,
                           const specfun::SeriesAccuracy& acc) {
    const specfun::Beta b(beta);
    if (b.is_limit_case()) {
        throw InvalidBeta("the two-particle form needs beta > 0");
    }
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw InvalidParameter("alpha out of range (0,2)");
    }
    if (!(gap > 0.0)) {
        throw InvalidParameter("gap must be positive");
    }
    const double d = static_cast<double>(y.size());
    const double zeta = std::pow(gap, alpha);
    std::vector<double> x(y.begin(), y.end());
    for (double& xi : x) {
        xi *= std::sqrt(2.0);
    }
    const double log_mm = specfun::log_mwright_density_d(b, x, std::pow(zeta, 1.0 / beta), acc);
    const double h = -((0.5 * d - 1.0) * std::log(2.0) + log_mm);
    if (std::isinf(h) && h > 0) {
        throw Overflow("two-particle density underflows", std::sqrt(2.0 * std::inner_product(y.begin(), y.end(), y.begin(), 0.0)));
    }
    return h;
}

DensityEvaluator::DensityEvaluator(const covariance::ModelParams& params, double gap,
                                   const specfun::SeriesAccuracy& acc)
    : params_(params), acc_(acc), chol_(covariance::cholesky(covariance::mixing_cov(params, gap))) {
    const int dims = params.d * params.n;
    k_ = 0.5 * dims;
    log_prefactor_ = log_gaussian_prefactor(dims, params.d, chol_.log_det());
    if (params.beta.is_one()) {
        return;
    }
    const double b = params.beta.value();
    const double q = 1.0 / (1.0 - b);
    // Trapezoid error in v ~ exp(-pi^2 / (q h)); the table is stored at
    // 1/kMaxStride of the step that reaches e^-36 near r2 = 0.
    h_ = std::min(0.25, pi * pi / (36.0 * q)) / static_cast<double>(kMaxStride);
    v_lo_ = k_ < 1.0 ? std::min(-100.0, -60.0 / (1.0 - k_)) : -100.0;
    double v_hi = 0.0;
    while (specfun::log_mwright(params.beta, std::exp(v_hi), acc) + (1.0 - k_) * v_hi > -3000.0 && v_hi < 60.0) {
        v_hi += 0.5;
    }
    const auto count = static_cast<std::size_t>(std::ceil((v_hi - v_lo_) / h_)) + 1;
    log_m_.resize(count);
    inv_tau_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = v_lo_ + h_ * static_cast<double>(i);
        log_m_[i] = specfun::log_mwright(params.beta, std::exp(v), acc) + (1.0 - k_) * v;
        inv_tau_[i] = std::exp(-v);
    }
}

double DensityEvaluator::log_radial(double r2) const {
    if (params_.beta.is_one()) {
        return -0.5 * r2;
    }
    if (r2 == 0.0 && k_ >= 1.0) {
        return kInf;
    }
    const std::size_t count = log_m_.size();
    auto term = [&](std::size_t i) { return log_m_[i] - 0.5 * r2 * inv_tau_[i]; };

    // Locate the peak on the coarsest stride, then polish it on the full table.
    std::size_t top = 0;
    double peak = -kInf;
    for (std::size_t i = 0; i < count; i += kMaxStride) {
        if (const double t = term(i); t > peak) {
            peak = t;
            top = i;
        }
    }
    const std::size_t lo = top >= kMaxStride ? top - kMaxStride : 0;
    const std::size_t hi = std::min(count - 1, top + kMaxStride);
    for (std::size_t i = lo; i <= hi; ++i) {
        if (const double t = term(i); t > peak) {
            peak = t;
            top = i;
        }
    }
    if (!std::isfinite(peak)) {
        return log_radial_integral(params_.beta, k_, r2, acc_);
    }

    // Large r2 narrows the peak, so try successively finer strides. Each sum
    // walks outward from the peak until the terms are 40 below it.
    for (std::size_t stride = kMaxStride; stride >= 1; stride /= 2) {
        double full = 0.0;
        double half = 0.0;
        int nodes = 0;
        bool covered = true;
        const std::size_t start = top - top % stride;
        auto add = [&](std::size_t i) {
            const double t = term(i);
            if (t < peak - 40.0) {
                return false;
            }
            const double e = std::exp(t - peak);
            full += e;
            ++nodes;
            if (i % (2 * stride) == 0) {
                half += e;
            }
            return true;
        };
        for (std::size_t i = start;; i += stride) {
            if (i >= count) {
                covered = false;
                break;
            }
            if (!add(i)) {
                break;
            }
        }
        for (std::size_t i = start;;) {
            if (i < stride) {
                covered = false;
                break;
            }
            i -= stride;
            if (!add(i)) {
                break;
            }
        }
        if (!covered) {
            break;
        }
        const double h = h_ * static_cast<double>(stride);
        full *= h;
        half *= 2.0 * h;
        // Geometric convergence: the error at h is about the square of the
        // error at 2h, so agreement to sqrt(tol) certifies tol.
        // A peak resolved by only a few nodes is left to the adaptive rule.
        if (nodes >= 8 && std::abs(full - half) <= std::sqrt(acc_.rel_tol) * full) {
            return peak + std::log(full);
        }
    }
    return log_radial_integral(params_.beta, k_, r2, acc_);
}

double DensityEvaluator::log_density_radial(double r2) const { return log_prefactor_ + log_radial(r2); }

double DensityEvaluator::log_density(std::span<const double> y) const {
    return log_density_radial(covariance::mahalanobis_sq(y, chol_, params_.d));
}

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlX = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                        0.9602898564975363};
constexpr std::array<double, 4> kGlW = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};

struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes/weights for int_{-inf}^{inf} g(y) dy with y = +-scale*exp(w), w in [w_lo, w_hi].
AxisRule axis_rule(double scale, int panels) {
    const double w_lo = std::log(1e-10);
    const double w_hi = std::log(60.0);
    const double width = (w_hi - w_lo) / panels;
    AxisRule r;
    for (int sign : {-1, 1}) {
        for (int p = 0; p < panels; ++p) {
            const double mid = w_lo + width * (p + 0.5);
            for (std::size_t j = 0; j < kGlX.size(); ++j) {
                for (double s : {-1.0, 1.0}) {
                    const double w = mid + s * 0.5 * width * kGlX[j];
                    const double y = scale * std::exp(w);
                    r.nodes.push_back(sign * y);
                    r.weights.push_back(0.5 * width * kGlW[j] * y);
                }
            }
        }
    }
    return r;
}

double tensor_integral(const DensityEvaluator& ev, int dims, const std::vector<AxisRule>& rules) {
    const std::size_t n0 = rules[0].nodes.size();
    std::vector<double> partial(n0, 0.0);
    // Outer index is parallelized; every slot is written by exactly one worker.
    parallel_for(n0, [&](std::size_t i) {
        std::vector<double> y(static_cast<std::size_t>(dims));
        y[0] = rules[0].nodes[i];
        double acc = 0.0;
        if (dims == 1) {
            acc = std::exp(ev.log_density(y));
        } else {
            const std::size_t n1 = rules[1].nodes.size();
            for (std::size_t j = 0; j < n1; ++j) {
                y[1] = rules[1].nodes[j];
                if (dims == 2) {
                    acc += rules[1].weights[j] * std::exp(ev.log_density(y));
                    continue;
                }
                const std::size_t n2 = rules[2].nodes.size();
                double inner = 0.0;
                for (std::size_t l = 0; l < n2; ++l) {
                    y[2] = rules[2].nodes[l];
                    inner += rules[2].weights[l] * std::exp(ev.log_density(y));
                }
                acc += rules[1].weights[j] * inner;
            }
        }
        partial[i] = rules[0].weights[i] * acc;
    });
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

}  // namespace

NormalizationResult density_normalization_check(const covariance::ModelParams& params, double gap,
                                                int panels_per_axis) {
    const int dims = params.d * params.n;
    if (dims > 3) {
        throw InvalidParameter("tensor normalization check supports d*N <= 3");
    }
    if (panels_per_axis < 2) {
        throw InvalidParameter("need at least 2 panels per axis");
    }
    specfun::SeriesAccuracy acc;
    acc.rel_tol = 1e-9;
    const DensityEvaluator ev(params, gap, acc);
    const auto sigma = covariance::mixing_cov(params, gap);
    const double tau_mean = 1.0 / std::tgamma(1.0 + params.beta.value());

    auto rules_for = [&](int panels) {
        std::vector<AxisRule> rules;
        for (int a = 0; a < dims; ++a) {
            const int k = a / params.d;  // increment index of this axis
            rules.push_back(axis_rule(std::sqrt(sigma(k, k) * tau_mean), panels));
        }
        return rules;
    };
    const double fine = tensor_integral(ev, dims, rules_for(panels_per_axis));
    const double coarse = tensor_integral(ev, dims, rules_for(panels_per_axis / 2));
    return {fine, std::abs(fine - coarse)};
}

EnergyCurves figure2_grid(std::span<const double> betas, double alpha, double gap, const GridSpec& grid,
                          bool rezero) {
    EnergyCurves out;
    out.y = grid.points();
    out.betas.assign(betas.begin(), betas.end());
    out.energy.resize(betas.size());
    for (std::size_t b = 0; b < betas.size(); ++b) {
        const covariance::ModelParams p(betas[b], alpha, 1, 1);
        const DensityEvaluator ev(p, gap);
        auto& col = out.energy[b];
        col.resize(out.y.size());
        parallel_for(out.y.size(), [&](std::size_t i) {
            const double y = out.y[i];
            try {
                col[i] = -ev.log_density(std::span<const double>(&y, 1));
            } catch (const Error& e) {
                throw Error(std::string(e.what()) + " (beta = " + std::to_string(betas[b]) +
                            ", y = " + std::to_string(y) + ")");
            }
        });
        if (rezero) {
            const double zero = 0.0;
            const double h0 = -ev.log_density(std::span<const double>(&zero, 1));
            for (double& v : col) {
                v -= h0;
            }
        }
    }
    return out;
}

}  // namespace ggbm::gibbs
