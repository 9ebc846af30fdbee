#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ggbm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates its documented range (beta, alpha, d, N, grids...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidBeta : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

/// M_1 is the Dirac mass at 1; callers must take the closed-form branch.
class BetaIsOne : public InvalidParameter {
public:
    BetaIsOne() : InvalidParameter("M_beta at beta=1 is the Dirac mass delta_1; no pointwise value") {}
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Special-function evaluation could not certify the requested accuracy.
class AccuracyNotMet : public Error {
public:
    AccuracyNotMet(const std::string& what, double best, double err)
        : Error(what), best_value(best), error_estimate(err) {}
    double best_value;
    double error_estimate;
};

/// Quadrature ran out of subdivisions before meeting its tolerance.
class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double best, double err)
        : Error(what), best_value(best), error_estimate(err) {}
    double best_value;
    double error_estimate;
};

class NonFiniteIntegrand : public Error {
public:
    NonFiniteIntegrand(const std::string& what, double at) : Error(what), abscissa(at) {}
    double abscissa;
};

class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(const std::string& what, std::size_t pivot) : Error(what), pivot_index(pivot) {}
    std::size_t pivot_index;
};

/// The density underflowed even in log form; carries the Mahalanobis norm.
class Overflow : public Error {
public:
    Overflow(const std::string& what, double norm) : Error(what), mahalanobis_norm(norm) {}
    double mahalanobis_norm;
};

class EmptySample : public Error {
public:
    EmptySample() : Error("empty sample") {}
};

}  // namespace ggbm
