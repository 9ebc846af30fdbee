#pragma once

#include <span>
#include <vector>

#include "ggbm/covariance.hpp"
#include "ggbm/grid.hpp"
#include "ggbm/specfun.hpp"

namespace ggbm::gibbs {

/// Increment configuration y (d*N values, increment-major as in
/// covariance::mahalanobis_sq) for the given model. `gap` is the time
/// between consecutive beads; for N = 1 it is |k - l| and zeta = gap^alpha.
struct EnergyQuery {
    covariance::ModelParams params;
    std::vector<double> y;
    double gap = 1.0;

    void validate() const;
};

/// ln of the joint density of the N increments:
///
///   rho_N(y) = (2 pi)^(-dN/2) det(Sigma)^(-d/2) int_0^inf tau^(-dN/2) exp(-|y|_Sigma^2 / (2 tau)) M_beta(tau) dtau
///
/// with Sigma = covariance::mixing_cov (the covariance given tau = 1) applied
/// blockwise to each coordinate. beta = 1 is the Gaussian closed form and
/// beta = 0 uses M_0(tau) = exp(-tau). Returns +inf at y = 0 when dN >= 2
/// and beta < 1, where the tau-integral diverges.
double log_density_N(const EnergyQuery& q, const specfun::SeriesAccuracy& acc = {});
double density_N(const EnergyQuery& q, const specfun::SeriesAccuracy& acc = {});

/// H(y) = -ln rho_N(y), additive constant included.
/// Throws Overflow when rho_N is zero even in log form.
double energy(const EnergyQuery& q, const specfun::SeriesAccuracy& acc = {});

/// Two-bead energy through the d-dimensional M-Wright function of order beta/2:
///   H(y) = -ln(2^(d/2-1) MM^d_{beta/2}(sqrt(2) y, zeta^(1/beta))),  zeta = gap^alpha,
/// with d = y.size(). Equals energy() with N = 1 and the same gap.
double energy_two_particle(double beta, double alpha, double gap, std::span<const double> y,
                           const specfun::SeriesAccuracy& acc = {});

/// ln of int_0^inf tau^(-k) exp(-r2 / (2 tau)) M_beta(tau) dtau (adaptive quadrature).
double log_radial_integral(const specfun::Beta& beta, double k, double r2, const specfun::SeriesAccuracy& acc = {});

/// Repeated evaluation of rho_N for one parameter set.
///
/// The tau-integral is a trapezoid sum in v = ln tau over a fixed node set
/// with ln M_beta tabulated once. The sum is analytic and doubly decaying in
/// v, so the rule converges geometrically; each call compares the full sum
/// with its every-other-node half and falls back to log_radial_integral when
/// the two disagree by more than the tolerance or the node range does not
/// cover the integrand.
class DensityEvaluator {
public:
    explicit DensityEvaluator(const covariance::ModelParams& params, double gap = 1.0,
                              const specfun::SeriesAccuracy& acc = {});

    double log_density(std::span<const double> y) const;
    double log_density_radial(double r2) const;
    double log_radial(double r2) const;

    const covariance::CholFactor& factor() const { return chol_; }
    int dims() const { return params_.d * params_.n; }

private:
    covariance::ModelParams params_;
    specfun::SeriesAccuracy acc_;
    covariance::CholFactor chol_;
    double log_prefactor_ = 0.0;
    double k_ = 0.0;
    double v_lo_ = 0.0;
    double h_ = 0.0;
    std::vector<double> log_m_;    // ln M_beta(exp(v_i)) + (1 - k) v_i
    std::vector<double> inv_tau_;  // exp(-v_i)
};

struct NormalizationResult {
    double integral;
    double err_est;
};

/// Integral of rho_N over R^{dN} by tensor-product quadrature in the raw y
/// coordinates (dN <= 2; dN = 3 is accepted but slow). Each axis is split at
/// 0, mapped logarithmically and integrated with composite Gauss-Legendre;
/// err_est compares against the same rule at half the panel count.
NormalizationResult density_normalization_check(const covariance::ModelParams& params, double gap = 1.0,
                                                int panels_per_axis = 48);

/// Energy curves H(y) for d = 1, N = 1 and several beta on one y grid.
struct EnergyCurves {
    std::vector<double> betas;
    std::vector<double> y;
    std::vector<std::vector<double>> energy;  // energy[b][i]
};

EnergyCurves figure2_grid(std::span<const double> betas, double alpha, double gap, const GridSpec& grid,
                          bool rezero = false);

}  // namespace ggbm::gibbs
