#include "ggbm/covariance.hpp"

#include <cmath>
#include <string>

#include "ggbm/errors.hpp"

namespace ggbm::covariance {

ModelParams::ModelParams(double beta_value, double alpha_value, int d_value, int n_value)
    : beta(beta_value), alpha(alpha_value), d(d_value), n(n_value) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw InvalidParameter("alpha out of range (0,2): " + std::to_string(alpha));
    }
    if (d < 1) {
        throw InvalidParameter("space dimension d must be >= 1");
    }
    if (n < 1) {
        throw InvalidParameter("number of increments N must be >= 1");
    }
}

double cov_prefactor(const ModelParams& p, CovScale scale) {
    const double c = 1.0 / (2.0 * std::tgamma(p.beta.value() + 1.0));
    return scale == CovScale::trace_d ? p.d * c : c;
}

double cov_ggbm(double t, double s, const ModelParams& p, CovScale scale) {
    if (!(t >= 0.0) || !(s >= 0.0)) {
        throw DomainError("cov_ggbm needs t, s >= 0");
    }
    const double a = p.alpha;
    return cov_prefactor(p, scale) * (std::pow(t, a) + std::pow(s, a) - std::pow(std::abs(t - s), a));
}

CovMatrix::CovMatrix(Eigen::MatrixXd entries, CovScale scale) : entries_(std::move(entries)), scale_(scale) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionMismatch("covariance matrix must be square");
    }
}

Eigen::VectorXd CholFactor::solve(const Eigen::VectorXd& b) const {
    if (b.size() != lower_.rows()) {
        throw DimensionMismatch("right-hand side length does not match the factor");
    }
    const auto l = lower_.triangularView<Eigen::Lower>();
    Eigen::VectorXd z = l.solve(b);
    return l.transpose().solve(z);
}

CholFactor cholesky(const Eigen::MatrixXd& q) {
    if (q.rows() != q.cols()) {
        throw DimensionMismatch("Cholesky needs a square matrix");
    }
    const Eigen::Index n = q.rows();
    CholFactor f;
    f.lower_ = Eigen::MatrixXd::Zero(n, n);
    auto& l = f.lower_;
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = q(j, j);
        for (Eigen::Index k = 0; k < j; ++k) {
            pivot -= l(j, k) * l(j, k);
        }
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NotPositiveDefinite("matrix is not positive definite at pivot " + std::to_string(j),
                                      static_cast<std::size_t>(j));
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = q(i, j);
            for (Eigen::Index k = 0; k < j; ++k) {
                v -= l(i, k) * l(j, k);
            }
            l(i, j) = v / ljj;
        }
        f.log_det_ += 2.0 * std::log(ljj);
    }
    return f;
}

namespace {

// |k-n-1|^a + |k-n+1|^a - 2|k-n|^a
double second_difference(Eigen::Index lag, double a) {
    const double m = static_cast<double>(lag);
    return std::pow(std::abs(m - 1.0), a) + std::pow(std::abs(m + 1.0), a) - 2.0 * std::pow(std::abs(m), a);
}

Eigen::MatrixXd toeplitz_increments(int n, double alpha, double c) {
    Eigen::MatrixXd q(n, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            q(k, j) = c * second_difference(k - j, alpha);
        }
    }
    return q;
}

}  // namespace

CovMatrix increment_cov(const ModelParams& p, CovScale scale, double spacing) {
    if (!(spacing > 0.0)) {
        throw DomainError("increment spacing must be positive");
    }
    const double c = cov_prefactor(p, scale) * std::pow(spacing, p.alpha);
    CovMatrix q(toeplitz_increments(p.n, p.alpha, c), scale);
    (void)cholesky(q);
    return q;
}

CovMatrix mixing_cov(const ModelParams& p, double spacing) {
    if (!(spacing > 0.0)) {
        throw DomainError("increment spacing must be positive");
    }
    const double c = 0.5 * std::pow(spacing, p.alpha);
    return CovMatrix(toeplitz_increments(p.n, p.alpha, c), CovScale::per_coordinate);
}

double mahalanobis_sq(std::span<const double> y, const CholFactor& chol, int d) {
    const Eigen::Index n = chol.size();
    if (d < 1 || static_cast<Eigen::Index>(y.size()) != n * d) {
        throw DimensionMismatch("y must hold d*N values (got " + std::to_string(y.size()) + ")");
    }
    const auto l = chol.lower().triangularView<Eigen::Lower>();
    double total = 0.0;
    Eigen::VectorXd slot(n);
    for (int j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            slot(k) = y[static_cast<std::size_t>(k * d + j)];
        }
        // y^T Q^{-1} y = |L^{-1} y|^2
        total += l.solve(slot).squaredNorm();
    }
    return total;
}

Eigen::MatrixXd coupling_constants(double hurst, int n, bool pinned_origin) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw InvalidParameter("hurst must lie in (0,1)");
    }
    if (n < 3) {
        throw InvalidParameter("coupling profile needs N >= 3");
    }
    const ModelParams p(1.0, 2.0 * hurst, 1, n);
    const CholFactor chol = cholesky(increment_cov(p));

    // Increments y = D x.
    const int positions = pinned_origin ? n : n + 1;
    Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(n, positions);
    for (int k = 0; k < n; ++k) {
        const int self = pinned_origin ? k : k + 1;
        diff(k, self) = 1.0;
        if (self > 0) {
            diff(k, self - 1) = -1.0;
        }
    }
    Eigen::MatrixXd sinv_d(n, positions);
    for (int c = 0; c < positions; ++c) {
        sinv_d.col(c) = chol.solve(diff.col(c));
    }
    Eigen::MatrixXd g = diff.transpose() * sinv_d;
    g = 0.5 * (g + g.transpose());
    Eigen::MatrixXd out = -g;
    out.diagonal() = g.diagonal();
    return out;
}

Eigen::VectorXd coupling_profile(double hurst, int n) {
    const Eigen::MatrixXd g = coupling_constants(hurst, n, true);
    const int center = (n + 1) / 2 - 1;  // ceil(N/2), 0-based
    return g.row(center).transpose();
}

}  // namespace ggbm::covariance
