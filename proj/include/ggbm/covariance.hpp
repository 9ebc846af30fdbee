#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "ggbm/specfun.hpp"

namespace ggbm::covariance {

/// (beta, alpha, d) of a generalized grey Brownian motion plus the number
/// of increments N used by the finite-dimensional objects.
struct ModelParams {
    ModelParams(double beta, double alpha, int d, int n = 1);

    specfun::Beta beta;
    double alpha;
    int d;
    int n;
};

/// Which normalization the scalar prefactor of the covariance follows.
///  per_coordinate: c = 1/(2 Gamma(beta+1)), the covariance of one coordinate.
///  trace_d:        c = d/(2 Gamma(beta+1)), E[(B(t), B(s))] summed over coordinates.
enum class CovScale { per_coordinate, trace_d };

double cov_prefactor(const ModelParams& p, CovScale scale);

/// E[B_i(t) B_i(s)] (per_coordinate) or E[(B(t), B(s))] (trace_d).
double cov_ggbm(double t, double s, const ModelParams& p, CovScale scale = CovScale::per_coordinate);

/// Covariance of the N unit-spaced increments Y(k) = B(k) - B(k-1).
class CovMatrix {
public:
    CovMatrix(Eigen::MatrixXd entries, CovScale scale);

    const Eigen::MatrixXd& entries() const { return entries_; }
    CovScale scale() const { return scale_; }
    Eigen::Index size() const { return entries_.rows(); }
    double operator()(Eigen::Index k, Eigen::Index n) const { return entries_(k, n); }

private:
    Eigen::MatrixXd entries_;
    CovScale scale_;
};

/// Q = L L^T with L lower triangular and positive diagonal.
class CholFactor {
public:
    const Eigen::MatrixXd& lower() const { return lower_; }
    double log_det() const { return log_det_; }
    Eigen::Index size() const { return lower_.rows(); }

    /// Q^{-1} b via two triangular solves.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
    friend CholFactor cholesky(const Eigen::MatrixXd& q);
    Eigen::MatrixXd lower_;
    double log_det_ = 0.0;
};

/// Cholesky factorization; throws NotPositiveDefinite carrying the failing pivot.
CholFactor cholesky(const Eigen::MatrixXd& q);
inline CholFactor cholesky(const CovMatrix& q) { return cholesky(q.entries()); }

/// a_kn = c (|k-n-1|^alpha + |k-n+1|^alpha - 2|k-n|^alpha) for k, n = 1..N,
/// scaled by spacing^alpha when increments are taken over a time step other than 1.
/// Verified positive definite by factorization before returning.
CovMatrix increment_cov(const ModelParams& p, CovScale scale = CovScale::per_coordinate, double spacing = 1.0);

/// Conditional covariance of the increments given the subordinator tau = 1:
/// the fractional Brownian motion increment covariance with Hurst index alpha/2
/// (c = 1/2 per coordinate). increment_cov equals this times 1/Gamma(beta+1).
CovMatrix mixing_cov(const ModelParams& p, double spacing = 1.0);

/// Sum over the d coordinate slots of y_slot^T Q^{-1} y_slot.
///
/// y holds N increments of d coordinates each, increment-major:
/// y[k*d + j] is coordinate j of increment k.
double mahalanobis_sq(std::span<const double> y, const CholFactor& chol, int d);

/// Pairwise couplings of the fBm chain energy.
///
/// Sigma = increment_cov(beta=1, alpha=2*hurst, d=1, N) and G = D^T Sigma^{-1} D,
/// where D maps bead positions to increments. With pinned_origin, the
/// positions are x_1..x_N with x_0 = 0 fixed (G is N x N); otherwise all
/// N+1 positions x_0..x_N are free (G is (N+1) x (N+1) and has zero row
/// sums). Off-diagonal entries are g_kn = -G_kn; the diagonal is G_kk as is,
/// so x^T G x = sum_{k<n} g_kn (x_k - x_n)^2 + sum_k (row sum of G)_k x_k^2.
Eigen::MatrixXd coupling_constants(double hurst, int n, bool pinned_origin = true);

/// Row k = ceil(N/2) (1-based) of coupling_constants, the profile of the
/// central bead against the rest of the chain.
Eigen::VectorXd coupling_profile(double hurst, int n);

}  // namespace ggbm::covariance
