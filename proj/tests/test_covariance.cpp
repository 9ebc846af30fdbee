#include <doctest.h>

#include <cmath>
#include <vector>

#include "ggbm/covariance.hpp"
#include "ggbm/errors.hpp"

using namespace ggbm;
using namespace ggbm::covariance;

namespace {

// Inverse of a 3x3 matrix by cofactors; independent of the Cholesky path.
Eigen::Matrix3d inverse3(const Eigen::Matrix3d& a) {
    Eigen::Matrix3d c;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
            const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c(j, i) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
        }
    }
    const double det = a(0, 0) * c(0, 0) + a(0, 1) * c(1, 0) + a(0, 2) * c(2, 0);
    return c / det;
}

}  // namespace

TEST_CASE("model parameter ranges") {
    CHECK_NOTHROW(ModelParams(0.5, 1.0, 1, 1));
    CHECK_THROWS_AS(ModelParams(0.5, 0.0, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(ModelParams(0.5, 2.0, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(ModelParams(0.5, 1.0, 0, 1), InvalidParameter);
    CHECK_THROWS_AS(ModelParams(0.5, 1.0, 1, 0), InvalidParameter);
    CHECK_THROWS_AS(ModelParams(1.2, 1.0, 1, 1), InvalidBeta);
}

TEST_CASE("pointwise covariance") {
    const ModelParams p(0.5, 1.4, 3);
    const double c = 1.0 / (2.0 * std::tgamma(1.5));
    const double t = 2.0, s = 0.7;
    const double want = c * (std::pow(t, 1.4) + std::pow(s, 1.4) - std::pow(t - s, 1.4));
    CHECK(cov_ggbm(t, s, p) == doctest::Approx(want).epsilon(1e-15));
    CHECK(cov_ggbm(t, s, p, CovScale::trace_d) == doctest::Approx(3.0 * want).epsilon(1e-15));
    CHECK(cov_ggbm(t, s, p) == cov_ggbm(s, t, p));
    CHECK(cov_ggbm(t, t, p) == doctest::Approx(std::pow(t, 1.4) / std::tgamma(1.5)).epsilon(1e-15));
}

TEST_CASE("increment covariance is symmetric toeplitz") {
    for (double alpha : {0.3, 1.0, 1.7}) {
        const auto q = increment_cov(ModelParams(0.6, alpha, 1, 9));
        for (int k = 0; k < 9; ++k) {
            for (int n = 0; n < 9; ++n) {
                CHECK(q(k, n) == q(n, k));
                if (k > 0 && n > 0) {
                    CHECK(q(k, n) == q(k - 1, n - 1));
                }
            }
        }
    }
}

TEST_CASE("alpha = 1 gives independent increments") {
    const auto q = increment_cov(ModelParams(0.3, 1.0, 2, 12));
    const double diag = 1.0 / std::tgamma(1.3);
    for (int k = 0; k < 12; ++k) {
        for (int n = 0; n < 12; ++n) {
            CHECK(std::abs(q(k, n) - (k == n ? diag : 0.0)) < 1e-15);
        }
    }
}

TEST_CASE("positive definite across alpha and N") {
    for (double alpha = 0.2; alpha < 1.85; alpha += 0.2) {
        for (int n : {1, 2, 5, 17, 33, 64}) {
            CAPTURE(alpha);
            CAPTURE(n);
            const auto q = increment_cov(ModelParams(0.5, alpha, 1, n));
            const auto chol = cholesky(q);
            CHECK(std::isfinite(chol.log_det()));
            const Eigen::MatrixXd l = chol.lower();
            CHECK((l * l.transpose() - q.entries()).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("mixing covariance is the gamma-scaled increment covariance") {
    const ModelParams p(0.7, 1.3, 1, 6);
    const auto a = increment_cov(p, CovScale::per_coordinate, 0.5);
    const auto m = mixing_cov(p, 0.5);
    CHECK((m.entries() - std::tgamma(1.7) * a.entries()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(m(0, 0) == doctest::Approx(std::pow(0.5, 1.3)).epsilon(1e-15));
}

TEST_CASE("mahalanobis norm matches a brute-force inverse") {
    for (double alpha : {0.4, 1.0, 1.6}) {
        const auto q = increment_cov(ModelParams(0.5, alpha, 2, 3));
        const Eigen::Matrix3d inv = inverse3(q.entries());
        const std::vector<double> y = {0.3, -1.1, 0.8, 0.25, -0.6, 1.9};  // 3 increments x 2 coordinates
        double want = 0.0;
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector3d v(y[0 + j], y[2 + j], y[4 + j]);
            want += v.dot(inv * v);
        }
        CHECK(mahalanobis_sq(y, cholesky(q), 2) == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("factorization failures") {
    Eigen::MatrixXd bad(3, 3);
    bad << 1, 0, 0, 0, 1, 2, 0, 2, 1;
    try {
        cholesky(bad);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.pivot_index == 2);
    }
    const auto q = cholesky(increment_cov(ModelParams(0.5, 1.0, 1, 3)));
    const std::vector<double> y = {1.0, 2.0};
    CHECK_THROWS_AS(mahalanobis_sq(y, q, 1), DimensionMismatch);
}

TEST_CASE("coupling quadratic form") {
    const int n = 9;
    const double hurst = 0.7;
    const auto sigma = increment_cov(ModelParams(1.0, 2.0 * hurst, 1, n));
    const Eigen::MatrixXd sigma_inv = sigma.entries().inverse();
    Eigen::VectorXd x(n + 1);
    for (int i = 0; i <= n; ++i) {
        x(i) = std::sin(1.3 * i) + 0.1 * i;
    }
    Eigen::VectorXd y(n);
    for (int k = 0; k < n; ++k) {
        y(k) = x(k + 1) - x(k);
    }
    const double direct = y.dot(sigma_inv * y);

    // Free chain: zero row sums, so the pairwise form is the whole energy.
    const auto g = coupling_constants(hurst, n, false);
    double pairwise = 0.0;
    for (int k = 0; k <= n; ++k) {
        double row = g(k, k);
        for (int m = 0; m <= n; ++m) {
            if (m != k) {
                row -= g(k, m);
                if (m > k) {
                    pairwise += g(k, m) * (x(k) - x(m)) * (x(k) - x(m));
                }
            }
        }
        CHECK(std::abs(row) < 1e-10);
    }
    CHECK(pairwise == doctest::Approx(direct).epsilon(1e-11));

    // Pinned chain: positions x_1..x_N relative to x_0.
    const auto gp = coupling_constants(hurst, n, true);
    Eigen::VectorXd xr = x.tail(n).array() - x(0);
    double pinned = 0.0;
    for (int k = 0; k < n; ++k) {
        double row = gp(k, k);
        for (int m = 0; m < n; ++m) {
            if (m != k) {
                row -= gp(k, m);
                if (m > k) {
                    pinned += gp(k, m) * (xr(k) - xr(m)) * (xr(k) - xr(m));
                }
            }
        }
        pinned += row * xr(k) * xr(k);
    }
    CHECK(pinned == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("coupling profiles") {
    const auto bm = coupling_profile(0.5, 21);
    const int c = 10;
    for (int j = 0; j < 21; ++j) {
        if (std::abs(j - c) > 1) {
            CHECK(std::abs(bm(j)) < 1e-10);
        }
    }
    CHECK(bm(c - 1) == doctest::Approx(1.0));
    CHECK(bm(c + 1) == doctest::Approx(1.0));

    const auto rough = coupling_profile(0.3, 21);
    for (int j = 0; j < 21; ++j) {
        CHECK(rough(j) > 0.0);
    }
    // Decay with distance holds in the bulk; the free end beads of a finite
    // chain couple more strongly than their neighbors.
    CHECK(rough(20) > rough(19));
    const auto bulk = coupling_profile(0.3, 61);
    for (int j = 31; j < 40; ++j) {
        CHECK(bulk(j + 1) < bulk(j));
        CHECK(bulk(60 - j - 1) < bulk(60 - j));
    }
    const auto smooth = coupling_profile(0.8, 21);
    CHECK(smooth(c + 1) > 0.0);
    CHECK(smooth(c + 2) < 0.0);
    CHECK(smooth(c - 2) < 0.0);
    CHECK_THROWS_AS(coupling_profile(1.0, 21), InvalidParameter);
}
