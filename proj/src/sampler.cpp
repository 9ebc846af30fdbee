#include "ggbm/sampler.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ggbm/errors.hpp"
#include "ggbm/parallel.hpp"

namespace ggbm::sampler {
namespace {

using std::numbers::pi;

// Neumaier running sum; the visiting order is fixed by the caller.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

std::seed_seq make_seed_seq(const RngStream& s) {
    return std::seed_seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                         static_cast<std::uint32_t>(s.stream_id), static_cast<std::uint32_t>(s.stream_id >> 32)};
}

std::vector<double> grid_times(int n_steps, double dt) {
    std::vector<double> t(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) {
        t[static_cast<std::size_t>(i)] = dt * i;
    }
    return t;
}

void require_nonempty(std::span<const PathSample> samples) {
    if (samples.empty()) {
        throw EmptySample();
    }
}

// Mean and standard error of the values x_i in sample order.
RealEstimate mean_and_error(std::span<const double> x) {
    CompensatedSum s;
    for (double v : x) {
        s.add(v);
    }
    const double n = static_cast<double>(x.size());
    const double mean = s.value() / n;
    CompensatedSum ss;
    for (double v : x) {
        ss.add((v - mean) * (v - mean));
    }
    const double var = x.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace

Generator::Generator(const RngStream& stream) : stream_(stream) {
    auto seq = make_seed_seq(stream);
    engine_.seed(seq);
}

double Generator::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Generator::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

double Generator::exponential() { return -std::log(uniform()); }

double sample_mwright_tau(const specfun::Beta& beta, Generator& gen) {
    if (beta.is_one()) {
        return 1.0;
    }
    if (beta.is_limit_case()) {
        throw InvalidBeta("tau sampling needs 0 < beta <= 1");
    }
    const double b = beta.value();
    const double u = pi * gen.uniform();
    const double e = gen.exponential();
    // ln A(u) = [b ln sin(b u) + (1-b) ln sin((1-b) u) - ln sin u] / (1-b)
    const double log_a =
        (b * std::log(std::sin(b * u)) + (1.0 - b) * std::log(std::sin((1.0 - b) * u)) - std::log(std::sin(u))) /
        (1.0 - b);
    return std::exp((1.0 - b) * (std::log(e) - log_a));
}

double sample_mwright_tau(const specfun::Beta& beta, const RngStream& rng) {
    Generator gen(rng);
    return sample_mwright_tau(beta, gen);
}

FbmSampler::FbmSampler(double hurst, int n_steps, int d, double dt)
    : hurst_(hurst), n_steps_(n_steps), d_(d), dt_(dt) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw InvalidParameter("hurst out of range (0,1)");
    }
    if (n_steps < 1 || n_steps > 2048) {
        throw InvalidParameter("n_steps must be in [1, 2048]");
    }
    if (d < 1) {
        throw InvalidParameter("d must be >= 1");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidParameter("dt must be positive");
    }
    const double two_h = 2.0 * hurst;
    Eigen::MatrixXd cov(n_steps, n_steps);
    for (int i = 0; i < n_steps; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double t = dt * (i + 1);
            const double s = dt * (j + 1);
            const double c = 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(t - s, two_h));
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    lower_ = covariance::cholesky(cov).lower();
}

PathSample FbmSampler::draw(Generator& gen) const {
    PathSample p;
    p.times = grid_times(n_steps_, dt_);
    p.values = Eigen::MatrixXd::Zero(n_steps_ + 1, d_);
    p.seed_info = {gen.stream().seed, gen.stream().stream_id, kRngAlgorithm};
    Eigen::VectorXd z(n_steps_);
    for (int j = 0; j < d_; ++j) {
        for (int i = 0; i < n_steps_; ++i) {
            z(i) = gen.normal();
        }
        p.values.col(j).tail(n_steps_) = lower_.triangularView<Eigen::Lower>() * z;
    }
    return p;
}

PathSample sample_fbm(double hurst, int n_steps, int d, const RngStream& rng, double dt) {
    Generator gen(rng);
    return FbmSampler(hurst, n_steps, d, dt).draw(gen);
}

GgbmSampler::GgbmSampler(const covariance::ModelParams& params, int n_steps, double dt)
    : params_(params), fbm_(0.5 * params.alpha, n_steps, params.d, dt) {
    if (params.beta.is_limit_case()) {
        throw InvalidBeta("path sampling needs 0 < beta <= 1");
    }
}

PathSample GgbmSampler::draw(Generator& gen) const {
    // tau first, then the Gaussian draws; the order is part of the stream contract.
    const double tau = sample_mwright_tau(params_.beta, gen);
    PathSample p = fbm_.draw(gen);
    p.values *= std::sqrt(tau);
    p.subordinator = tau;
    return p;
}

PathSample sample_ggbm(const covariance::ModelParams& params, int n_steps, const RngStream& rng, double dt) {
    Generator gen(rng);
    return GgbmSampler(params, n_steps, dt).draw(gen);
}

std::vector<PathSample> sample_ggbm_paths(const covariance::ModelParams& params, int n_steps, double dt,
                                          std::size_t n_paths, std::uint64_t seed) {
    const GgbmSampler sampler(params, n_steps, dt);
    std::vector<PathSample> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        Generator gen({seed, static_cast<std::uint64_t>(i)});
        out[i] = sampler.draw(gen);
    });
    return out;
}

std::size_t grid_index(const PathSample& path, double t) {
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        if (std::abs(path.times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
            return i;
        }
    }
    throw DomainError("t = " + std::to_string(t) + " is not on the sampled grid");
}

ComplexEstimate mc_char_fn(std::span<const PathSample> samples, std::span<const double> k, double t) {
    require_nonempty(samples);
    const std::size_t row = grid_index(samples.front(), t);
    std::vector<double> re(samples.size());
    std::vector<double> im(samples.size());
    for (std::size_t p = 0; p < samples.size(); ++p) {
        const auto& v = samples[p].values;
        if (static_cast<std::size_t>(v.cols()) != k.size()) {
            throw DimensionMismatch("k has " + std::to_string(k.size()) + " entries, paths have d = " +
                                    std::to_string(v.cols()));
        }
        double phase = 0.0;
        for (std::size_t j = 0; j < k.size(); ++j) {
            phase += k[j] * v(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
        }
        re[p] = std::cos(phase);
        im[p] = std::sin(phase);
    }
    const RealEstimate r = mean_and_error(re);
    const RealEstimate i = mean_and_error(im);
    return {{r.estimate, i.estimate}, std::hypot(r.std_error, i.std_error)};
}

RealEstimate mc_moments(std::span<const PathSample> samples, double t, int order, int coord) {
    require_nonempty(samples);
    if (order < 1 || order > 8) {
        throw InvalidParameter("moment order must be in [1, 8]");
    }
    const std::size_t row = grid_index(samples.front(), t);
    if (coord < 0 || coord >= samples.front().values.cols()) {
        throw DimensionMismatch("coordinate index out of range");
    }
    std::vector<double> x(samples.size());
    for (std::size_t p = 0; p < samples.size(); ++p) {
        x[p] = std::pow(samples[p].values(static_cast<Eigen::Index>(row), coord), order);
    }
    return mean_and_error(x);
}

RealEstimate mc_squared_norm(std::span<const PathSample> samples, double t) {
    require_nonempty(samples);
    const std::size_t row = grid_index(samples.front(), t);
    std::vector<double> x(samples.size());
    for (std::size_t p = 0; p < samples.size(); ++p) {
        x[p] = samples[p].values.row(static_cast<Eigen::Index>(row)).squaredNorm();
    }
    return mean_and_error(x);
}

double moment_reference(const covariance::ModelParams& params, double t, int order) {
    if (order < 1) {
        throw InvalidParameter("moment order must be >= 1");
    }
    if (order % 2 == 1) {
        return 0.0;
    }
    const int n = order / 2;
    const double b = params.beta.value();
    return std::tgamma(2.0 * n + 1.0) / (std::pow(2.0, n) * std::tgamma(b * n + 1.0)) * std::pow(t, params.alpha * n);
}

}  // namespace ggbm::sampler
