#ifndef GARCHMOM_COMMON_HPP
#define GARCHMOM_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace garchmom {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A moment of the requested order does not exist (e.g. Student t with nu <= order).
class UndefinedMomentError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature failed to reach the requested relative tolerance.
class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// Sampling requested from a generic innovation without a prepared inverse-CDF table.
class GenericSamplingUnsupported : public Error {
public:
    using Error::Error;
};

/// phi = alpha + lambda*F0 + beta outside (0,1).
class NonStationaryError : public Error {
public:
    using Error::Error;
};

/// Parameter invariants violated (omega <= 0, alpha < 0, ...).
class InvalidParamsError : public Error {
public:
    using Error::Error;
};

/// A moment recursion left the representable range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Skewness/kurtosis requested for a distribution with zero variance.
class DegenerateDistributionError : public Error {
public:
    using Error::Error;
};

/// An aggregation horizon exceeded its configured cap.
class ComplexityBudgetError : public Error {
public:
    using Error::Error;
};

/// No Johnson SU distribution matches the requested moments.
class InfeasibleMomentsError : public Error {
public:
    InfeasibleMomentsError(const std::string& what, double kurtosis, double boundary)
        : Error(what), kurtosis_(kurtosis), boundary_(boundary) {}
    /// Requested kurtosis and the minimal feasible kurtosis for the requested skewness.
    double kurtosis() const { return kurtosis_; }
    double boundary() const { return boundary_; }

private:
    double kurtosis_;
    double boundary_;
};

class EmptySampleError : public Error {
public:
    using Error::Error;
};

class TooFewObservationsError : public Error {
public:
    using Error::Error;
};

/// Sample with zero variance where standardized moments were requested.
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

/// Limit requested in a parameter region the theory does not cover.
class UnsupportedRegionError : public Error {
public:
    using Error::Error;
};

/// Input file parsing failed; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Kahan-compensated accumulator; used wherever sums run over many
/// terms that span several orders of magnitude.
class KahanSum {
public:
    KahanSum() = default;
    explicit KahanSum(double init) : sum_(init) {}

    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    void merge(const KahanSum& other) {
        add(other.sum_);
        add(-other.carry_);
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// (mean, variance, skewness, kurtosis) of one distribution.
struct MomentSet {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

}  // namespace garchmom

#endif  // GARCHMOM_COMMON_HPP
