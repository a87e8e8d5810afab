#ifndef GARCHMOM_INNOVATION_HPP
#define GARCHMOM_INNOVATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "garchmom/common.hpp"
#include "garchmom/quadrature.hpp"
#include "garchmom/rng.hpp"

namespace garchmom {

/// The i.i.d. innovation distribution: zero mean, unit variance, known
/// moments up to order eight, distribution function at zero, lower partial
/// moments, density and sampling.
///
/// The Normal and StudentT kinds use closed forms. StudentT is internally
/// standardized to unit variance; the caller supplies the degrees of freedom
/// of the plain t distribution. Generic wraps a user density and evaluates
/// everything by adaptive quadrature at 1e-10 relative tolerance.
class Innovation {
public:
    enum class Kind { Normal, StudentT, Generic };

    static Innovation normal() { return Innovation(Kind::Normal, 0.0, nullptr); }

    static Innovation student_t(double nu) {
        if (!(nu > 2.0))
            throw InvalidParamsError("Student t innovation requires nu > 2");
        return Innovation(Kind::StudentT, nu, nullptr);
    }

    static Innovation generic(std::function<double(double)> density) {
        if (!density) throw InvalidParamsError("generic innovation needs a density");
        return Innovation(Kind::Generic, 0.0,
                          std::make_shared<std::function<double(double)>>(std::move(density)));
    }

    Kind kind() const { return kind_; }
    double nu() const { return nu_; }

    /// Raw moment E[z^i] for i in [1, 8]. Orders above eight are rejected:
    /// nothing downstream needs them and t tails may not have them.
    double moment(int i) const {
        if (i < 1 || i > 8)
            throw UndefinedMomentError("innovation moments are supported for orders 1..8");
        switch (kind_) {
            case Kind::Normal:
                if (i % 2 == 1) return 0.0;
                return normal_even_moment(i / 2);
            case Kind::StudentT: {
                if (!(nu_ > i))
                    throw UndefinedMomentError("Student t moment of order " +
                                               std::to_string(i) + " needs nu > " +
                                               std::to_string(i));
                if (i % 2 == 1) return 0.0;
                return student_even_moment(i / 2);
            }
            case Kind::Generic:
                return quadrature::integrate_real_line(
                    [this, i](double x) { return std::pow(x, i) * density(x); });
        }
        return 0.0;
    }

    double skewness() const { return moment(3); }
    double kurtosis() const { return moment(4); }

    /// Distribution function evaluated at zero; exactly 1/2 for the two
    /// symmetric analytic kinds.
    double cdf_at_zero() const {
        if (kind_ != Kind::Generic) return 0.5;
        return quadrature::integrate_lower_half_line(
            [this](double x) { return density(x); });
    }

    /// Lower partial moment: integral of x^k f(x) over (-inf, 0], k in {3, 5}.
    double lower_partial_moment(int k) const {
        if (k != 3 && k != 5)
            throw UndefinedMomentError("lower partial moments are defined for k in {3, 5}");
        static const double root_2_over_pi = std::sqrt(2.0 / 3.14159265358979323846);
        switch (kind_) {
            case Kind::Normal:
                return k == 3 ? -root_2_over_pi : -4.0 * root_2_over_pi;
            case Kind::StudentT: {
                if (!(nu_ > k))
                    throw UndefinedMomentError("Student t partial moment needs nu > k");
                const double g =
                    std::exp(std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_));
                const double root_pi = 1.7724538509055160273;
                if (k == 3)
                    return -2.0 / root_pi * std::pow(nu_ - 2.0, 1.5) /
                           ((nu_ - 1.0) * (nu_ - 3.0)) * g;
                return -8.0 / root_pi * std::pow(nu_ - 2.0, 2.5) /
                       ((nu_ - 1.0) * (nu_ - 3.0) * (nu_ - 5.0)) * g;
            }
            case Kind::Generic:
                return quadrature::integrate_lower_half_line(
                    [this, k](double x) { return std::pow(x, k) * density(x); });
        }
        return 0.0;
    }

    double density(double x) const {
        switch (kind_) {
            case Kind::Normal: {
                static const double inv_root_2pi = 0.3989422804014326779;
                return inv_root_2pi * std::exp(-0.5 * x * x);
            }
            case Kind::StudentT: {
                const double c = std::exp(std::lgamma(0.5 * (nu_ + 1.0)) -
                                          std::lgamma(0.5 * nu_)) /
                                 std::sqrt(3.14159265358979323846 * (nu_ - 2.0));
                return c * std::pow(1.0 + x * x / (nu_ - 2.0), -0.5 * (nu_ + 1.0));
            }
            case Kind::Generic:
                return (*generic_density_)(x);
        }
        return 0.0;
    }

    /// One standardized draw from the caller-owned stream. For StudentT the
    /// plain t quantile is scaled by sqrt((nu-2)/nu) so the draw has unit
    /// variance. Generic requires prepare_sampler() first.
    double sample(RngStream& rng) const {
        const double u = rng.next_uniform();
        switch (kind_) {
            case Kind::Normal:
                return boost::math::quantile(boost::math::normal_distribution<>(), u);
            case Kind::StudentT:
                return boost::math::quantile(boost::math::students_t_distribution<>(nu_), u) *
                       std::sqrt((nu_ - 2.0) / nu_);
            case Kind::Generic:
                if (!sampler_table_ || sampler_table_->empty())
                    throw GenericSamplingUnsupported(
                        "call prepare_sampler() before sampling a generic innovation");
                return table_quantile(u);
        }
        return 0.0;
    }

    /// Builds an inverse-CDF table for the generic kind (no-op otherwise).
    /// The grid spans [lo, hi] with `points` equally spaced CDF nodes.
    void prepare_sampler(std::size_t points = 4096, double lo = -12.0, double hi = 12.0) {
        if (kind_ != Kind::Generic) return;
        auto table = std::make_shared<std::vector<std::pair<double, double>>>();
        table->reserve(points + 1);
        // mass below the grid: integral of f over (-inf, lo]
        const double tail = quadrature::integrate_lower_half_line(
            [this, lo](double t) { return density(t + lo); });
        // accumulate the CDF left to right with the trapezoid rule on the grid
        const double step = (hi - lo) / static_cast<double>(points);
        double x = lo;
        double fx = density(x);
        double acc = tail;
        table->push_back({acc, x});
        for (std::size_t i = 1; i <= points; ++i) {
            const double xn = lo + step * static_cast<double>(i);
            const double fn = density(xn);
            acc += 0.5 * (fx + fn) * step;
            table->push_back({acc, xn});
            x = xn;
            fx = fn;
        }
        sampler_table_ = std::move(table);
    }

private:
    Innovation(Kind kind, double nu, std::shared_ptr<std::function<double(double)>> d)
        : kind_(kind), nu_(nu), generic_density_(std::move(d)) {}

    static double normal_even_moment(int r) {
        double m = 1.0;
        for (int i = 1; i <= r; ++i) m *= static_cast<double>(2 * i - 1);
        return m;
    }

    double student_even_moment(int r) const {
        const double lg = std::lgamma(r + 0.5) + std::lgamma(0.5 * nu_ - r) -
                          std::lgamma(0.5) - std::lgamma(0.5 * nu_);
        return std::pow(nu_ - 2.0, r) * std::exp(lg);
    }

    double table_quantile(double u) const {
        const auto& t = *sampler_table_;
        const double target = u * t.back().first;
        auto it = std::lower_bound(
            t.begin(), t.end(), target,
            [](const std::pair<double, double>& a, double b) { return a.first < b; });
        if (it == t.begin()) return t.front().second;
        if (it == t.end()) return t.back().second;
        const auto prev = it - 1;
        const double span = it->first - prev->first;
        const double w = span > 0.0 ? (target - prev->first) / span : 0.0;
        return prev->second + w * (it->second - prev->second);
    }

    Kind kind_;
    double nu_;
    std::shared_ptr<std::function<double(double)>> generic_density_;
    std::shared_ptr<std::vector<std::pair<double, double>>> sampler_table_;
};

}  // namespace garchmom

#endif  // GARCHMOM_INNOVATION_HPP
