#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggbm/covariance.hpp"
#include "ggbm/specfun.hpp"

namespace ggbm::sampler {

/// Name and version of the generator, echoed in every sampled output.
inline constexpr const char* kRngAlgorithm = "mt19937_64/seed_seq/v1";

/// Identifies one reproducible random stream. Paths use stream_id = path index.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Draws from one stream. The engine is std::mt19937_64 seeded through
/// std::seed_seq{seed lo, seed hi, id lo, id hi}; both are fully specified by
/// the standard, and the conversions below avoid the implementation-defined
/// std distributions, so draws are identical on every platform.
class Generator {
public:
    explicit Generator(const RngStream& stream);

    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform();
    /// Standard normal (Box-Muller, pairs cached).
    double normal();
    /// Exp(1).
    double exponential();

    const RngStream& stream() const { return stream_; }

private:
    RngStream stream_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct SeedInfo {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::string algorithm = kRngAlgorithm;
};

/// One trajectory on the grid times[i] = i * dt, i = 0..n_steps.
struct PathSample {
    std::vector<double> times;
    Eigen::MatrixXd values;  // times.size() x d, row 0 is zero
    double subordinator = 1.0;
    SeedInfo seed_info;
};

/// tau with density M_beta via Kanter's representation of a one-sided
/// beta-stable S: tau = S^(-beta) = (E / A(pi U))^(1 - beta). beta = 1 gives 1
/// without consuming randomness. Throws InvalidBeta for beta = 0.
double sample_mwright_tau(const specfun::Beta& beta, Generator& gen);
double sample_mwright_tau(const specfun::Beta& beta, const RngStream& rng);

/// Exact Gaussian sampler for fBm with E[X_i(t) X_j(s)] = delta_ij (t^2h + s^2h - |t-s|^2h) / 2
/// on the grid dt, 2 dt, ..., n_steps dt. The Cholesky factor is computed once.
class FbmSampler {
public:
    FbmSampler(double hurst, int n_steps, int d, double dt = 1.0);

    /// Fills values (row 0 stays zero); times and seed info are set too.
    PathSample draw(Generator& gen) const;

    int n_steps() const { return n_steps_; }
    int dim() const { return d_; }
    double dt() const { return dt_; }

private:
    double hurst_;
    int n_steps_;
    int d_;
    double dt_;
    Eigen::MatrixXd lower_;
};

PathSample sample_fbm(double hurst, int n_steps, int d, const RngStream& rng, double dt = 1.0);

/// ggBm path sqrt(tau) * X with X an fBm of Hurst index alpha/2 and one tau per path.
class GgbmSampler {
public:
    GgbmSampler(const covariance::ModelParams& params, int n_steps, double dt = 1.0);

    PathSample draw(Generator& gen) const;

    const covariance::ModelParams& params() const { return params_; }

private:
    covariance::ModelParams params_;
    FbmSampler fbm_;
};

PathSample sample_ggbm(const covariance::ModelParams& params, int n_steps, const RngStream& rng, double dt = 1.0);

/// n_paths paths, path p drawn from stream (seed, p). Parallel over paths;
/// the result does not depend on the thread count.
std::vector<PathSample> sample_ggbm_paths(const covariance::ModelParams& params, int n_steps, double dt,
                                          std::size_t n_paths, std::uint64_t seed);

struct ComplexEstimate {
    std::complex<double> estimate;
    /// Standard error of the complex mean: sqrt((Var cos + Var sin) / n).
    double std_error;
};

struct RealEstimate {
    double estimate;
    double std_error;
};

/// Index of t on the path grid; throws DomainError if t is not a grid time.
std::size_t grid_index(const PathSample& path, double t);

/// Sample mean of exp(i (k, B(t))). Throws EmptySample, DimensionMismatch.
ComplexEstimate mc_char_fn(std::span<const PathSample> samples, std::span<const double> k, double t);

/// Sample mean of B_coord(t)^order (signed, so odd orders estimate zero).
RealEstimate mc_moments(std::span<const PathSample> samples, double t, int order, int coord = 0);

/// Sample mean of |B(t)|^2 over all coordinates.
RealEstimate mc_squared_norm(std::span<const PathSample> samples, double t);

/// E[B_i(t)^order] = (2n)! / (2^n Gamma(beta n + 1)) t^(alpha n) for order = 2n, 0 for odd order.
double moment_reference(const covariance::ModelParams& params, double t, int order);

}  // namespace ggbm::sampler
