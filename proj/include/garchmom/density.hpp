#ifndef GARCHMOM_DENSITY_HPP
#define GARCHMOM_DENSITY_HPP

#include <cmath>
#include <optional>
#include <variant>

#include <boost/math/distributions/normal.hpp>

#include "garchmom/common.hpp"

namespace garchmom {

namespace detail {

inline double std_normal_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}
inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

}  // namespace detail

/// Four-term Edgeworth expansion around the standard normal, applied to the
/// standardized variable z = (x - mean) / std and mapped back. The density is
/// phi(z) [1 + (tau/6) He3 + ((kappa-3)/24) He4 + (tau^2/72) He6] with the
/// probabilists' Hermite polynomials; the distribution function integrates
/// term by term. The density can dip negative for strong asymmetry;
/// cdf_monotone records whether it stayed nonnegative on [-8, 8].
class EdgeworthApprox {
public:
    EdgeworthApprox(double skew, double excess_kurtosis, double mean, double stddev)
        : skew_(skew), exkurt_(excess_kurtosis), mean_(mean), stddev_(stddev) {
        if (!(stddev > 0.0)) throw InvalidParamsError("Edgeworth needs a positive stddev");
        scan_monotonicity();
    }

    static EdgeworthApprox from_moments(const MomentSet& m) {
        return EdgeworthApprox(m.skewness, m.kurtosis - 3.0, m.mean, std::sqrt(m.variance));
    }

    double skew() const { return skew_; }
    double excess_kurtosis() const { return exkurt_; }
    double mean() const { return mean_; }
    double stddev() const { return stddev_; }
    /// True when the density is nonnegative (hence the cdf monotone) on the
    /// standardized range [-8, 8].
    bool cdf_monotone() const { return cdf_monotone_; }

    double pdf(double x) const {
        const double z = (x - mean_) / stddev_;
        return standardized_pdf(z) / stddev_;
    }

    double cdf(double x) const {
        const double z = (x - mean_) / stddev_;
        const double he2 = z * z - 1.0;
        const double he3 = z * (z * z - 3.0);
        const double he5 = z * (z * z * (z * z - 10.0) + 15.0);
        return detail::std_normal_cdf(z) -
               detail::std_normal_pdf(z) * (skew_ / 6.0 * he2 + exkurt_ / 24.0 * he3 +
                                            skew_ * skew_ / 72.0 * he5);
    }

    double standardized_pdf(double z) const {
        const double he3 = z * (z * z - 3.0);
        const double he4 = z * z * (z * z - 6.0) + 3.0;
        const double he6 = z * z * (z * z * (z * z - 15.0) + 45.0) - 15.0;
        return detail::std_normal_pdf(z) *
               (1.0 + skew_ / 6.0 * he3 + exkurt_ / 24.0 * he4 + skew_ * skew_ / 72.0 * he6);
    }

private:
    void scan_monotonicity() {
        cdf_monotone_ = true;
        for (double z = -8.0; z <= 8.0; z += 1e-4) {
            if (standardized_pdf(z) < 0.0) {
                cdf_monotone_ = false;
                return;
            }
        }
    }

    double skew_;
    double exkurt_;
    double mean_;
    double stddev_;
    bool cdf_monotone_ = true;
};

/// Parameters of x = xi + lambda sinh((z - gamma)/delta), z standard normal.
struct JohnsonSuParams {
    double gamma = 0.0;
    double delta = 1.0;
    double xi = 0.0;
    double lambda = 1.0;
};

/// First four moments implied by Johnson SU parameters, from the closed
/// forms in omega = exp(1/delta^2) and Omega = gamma/delta.
inline MomentSet johnson_su_moments(const JohnsonSuParams& p) {
    const double w = std::exp(1.0 / (p.delta * p.delta));
    const double om = p.gamma / p.delta;
    const double sw = std::sqrt(w);
    MomentSet m;
    m.mean = p.xi - p.lambda * sw * std::sinh(om);
    const double var =
        0.5 * p.lambda * p.lambda * (w - 1.0) * (w * std::cosh(2.0 * om) + 1.0);
    m.variance = var;
    const double mu3 = -0.25 * p.lambda * p.lambda * p.lambda * sw * (w - 1.0) * (w - 1.0) *
                       (w * (w + 2.0) * std::sinh(3.0 * om) + 3.0 * std::sinh(om));
    const double l4 = p.lambda * p.lambda * p.lambda * p.lambda;
    const double mu4 =
        0.125 * l4 * (w - 1.0) * (w - 1.0) *
        (w * w * (w * w * (w * w + 2.0 * w + 3.0) - 3.0) * std::cosh(4.0 * om) +
         4.0 * w * w * (w + 2.0) * std::cosh(2.0 * om) + 3.0 * (2.0 * w + 1.0));
    m.skewness = mu3 / (var * std::sqrt(var));
    m.kurtosis = mu4 / (var * var);
    return m;
}

inline double johnson_su_cdf(const JohnsonSuParams& p, double x) {
    return detail::std_normal_cdf(p.gamma + p.delta * std::asinh((x - p.xi) / p.lambda));
}

inline double johnson_su_pdf(const JohnsonSuParams& p, double x) {
    const double y = (x - p.xi) / p.lambda;
    const double z = p.gamma + p.delta * std::asinh(y);
    return p.delta / (p.lambda * std::sqrt(1.0 + y * y)) * detail::std_normal_pdf(z);
}

inline double johnson_su_quantile(const JohnsonSuParams& p, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw InvalidParamsError("quantile level must lie in (0,1)");
    const double z = boost::math::quantile(boost::math::normal_distribution<>(), q);
    return p.xi + p.lambda * std::sinh((z - p.gamma) / p.delta);
}

namespace detail {

/// For given omega and target kurtosis, solves the quadratic that pins
/// m = omega sinh^2(Omega), then returns the squared skewness this (omega, m)
/// pair implies. The root with m -> 0 at the symmetric-case omega is taken.
inline double su_beta1_given_omega(double w, double kurt, double& m_out) {
    const double big_k = w * w * (w * w + 2.0 * w + 3.0) - 3.0;  // w^4+2w^3+3w^2-3
    const double a = 8.0 * (big_k - kurt);
    const double b = 8.0 * (w * w * w * w * w + 2.0 * w * w * w * w + 3.0 * w * w * w +
                            w * w - w) -
                     8.0 * kurt * (w + 1.0);
    const double wp1 = w + 1.0;
    const double c = wp1 * wp1 * (w * w * (w * w + 2.0) + 3.0) - 2.0 * kurt * wp1 * wp1;
    const double disc = b * b - 4.0 * a * c;
    if (!(disc >= 0.0)) {
        m_out = -1.0;
        return -1.0;
    }
    const double root = std::sqrt(disc);
    const double m = b > 0.0 ? -2.0 * c / (b + root) : (root - b) / (2.0 * a);
    m_out = m;
    const double t = 4.0 * (w + 2.0) * m + 3.0 * wp1 * wp1;
    const double den = 2.0 * m + wp1;
    return m * (w - 1.0) * t * t / (2.0 * den * den * den);
}

}  // namespace detail

/// Moment-matching fit of a Johnson SU distribution.
///
/// The four-parameter system reduces to a one-dimensional search in
/// omega = exp(1/delta^2): for each omega the kurtosis equation is a
/// quadratic in omega sinh^2(Omega), and the implied squared skewness is
/// matched to the target by a safeguarded Newton iteration started from
/// sqrt(sqrt(2 kurt - 2) - 1) - skew^2/kurt. Feasibility requires the
/// target kurtosis to exceed the boundary value attained by the limiting
/// lognormal with the same skewness; otherwise InfeasibleMomentsError
/// carries the boundary.
inline JohnsonSuParams johnson_su_fit(const MomentSet& target) {
    if (!(target.variance > 0.0))
        throw InvalidParamsError("Johnson SU fit needs positive variance");
    const double b1 = target.skewness * target.skewness;
    const double kurt = target.kurtosis;

    // boundary: omega solving (w-1)(w+2)^2 = b1, then its kurtosis
    const double tcar = std::cbrt(0.5 * (2.0 + b1 + std::sqrt(b1 * (4.0 + b1))));
    const double w_bound = tcar + 1.0 / tcar - 1.0;
    const double kurt_bound = w_bound * w_bound * (w_bound * (w_bound + 2.0) + 3.0) - 3.0;
    if (!(kurt > kurt_bound))
        throw InfeasibleMomentsError(
            "no Johnson SU matches the requested skewness/kurtosis pair", kurt, kurt_bound);

    double m = 0.0;
    double w = std::sqrt(std::sqrt(2.0 * kurt - 2.0) - 1.0);
    if (b1 > 0.0) {
        w = std::max(w - b1 / kurt, w_bound * (1.0 + 1e-12));
        const double w_hi = std::sqrt(std::sqrt(2.0 * kurt - 2.0) - 1.0);
        bool converged = false;
        for (int it = 0; it < 200 && !converged; ++it) {
            const double f = detail::su_beta1_given_omega(w, kurt, m);
            const double step_w = std::max(1e-9, 1e-7 * w);
            double m2 = 0.0;
            const double f2 = detail::su_beta1_given_omega(w + step_w, kurt, m2);
            const double deriv = (f2 - f) / step_w;
            double w_next = deriv != 0.0 ? w + (b1 - f) / deriv : w;
            // keep the iterate inside (w_bound, w_sym]; damp if Newton leaves
            if (!(w_next > w_bound)) w_next = 0.5 * (w + w_bound);
            if (w_next > w_hi) w_next = 0.5 * (w + w_hi);
            converged = std::fabs(w_next - w) <= 1e-14 * std::max(1.0, w);
            w = w_next;
        }
        const double f_final = detail::su_beta1_given_omega(w, kurt, m);
        if (!(std::fabs(f_final - b1) <= 1e-9 * std::max(1.0, b1)))
            throw InfeasibleMomentsError("Johnson SU moment matching did not converge",
                                         kurt, kurt_bound);
    }
    if (m < 0.0) m = 0.0;

    JohnsonSuParams p;
    p.delta = 1.0 / std::sqrt(std::log(w));
    p.lambda = std::sqrt(2.0 * target.variance / ((w - 1.0) * (2.0 * m + w + 1.0)));
    double sinh_om = 0.0;
    if (target.skewness != 0.0) {
        sinh_om = (target.skewness > 0.0 ? -1.0 : 1.0) * std::sqrt(m / w);
        p.gamma = p.delta * std::asinh(sinh_om);
    }
    p.xi = target.mean + p.lambda * std::sqrt(w) * sinh_om;
    return p;
}

/// A fitted four-moment approximation: Johnson SU when feasible, else the
/// Edgeworth expansion. `fell_back` records an automatic SU -> Edgeworth
/// switch so reports can label it.
class DistApprox {
public:
    enum class Method { Edgeworth, JohnsonSu, Auto };

    static DistApprox fit(const MomentSet& m, Method method) {
        switch (method) {
            case Method::Edgeworth:
                return DistApprox(EdgeworthApprox::from_moments(m), false);
            case Method::JohnsonSu:
                return DistApprox(johnson_su_fit(m), false);
            case Method::Auto:
                try {
                    return DistApprox(johnson_su_fit(m), false);
                } catch (const InfeasibleMomentsError&) {
                    return DistApprox(EdgeworthApprox::from_moments(m), true);
                }
        }
        throw InvalidParamsError("unknown approximation method");
    }

    bool is_johnson_su() const { return std::holds_alternative<JohnsonSuParams>(impl_); }
    bool fell_back() const { return fell_back_; }

    const JohnsonSuParams& johnson_su() const { return std::get<JohnsonSuParams>(impl_); }
    const EdgeworthApprox& edgeworth() const { return std::get<EdgeworthApprox>(impl_); }

    double cdf(double x) const {
        if (is_johnson_su()) return johnson_su_cdf(johnson_su(), x);
        return edgeworth().cdf(x);
    }
    double pdf(double x) const {
        if (is_johnson_su()) return johnson_su_pdf(johnson_su(), x);
        return edgeworth().pdf(x);
    }

private:
    DistApprox(EdgeworthApprox e, bool fell_back)
        : impl_(std::move(e)), fell_back_(fell_back) {}
    DistApprox(JohnsonSuParams p, bool fell_back) : impl_(p), fell_back_(fell_back) {}

    std::variant<EdgeworthApprox, JohnsonSuParams> impl_;
    bool fell_back_;
};

inline DistApprox approximate_distribution(const MomentSet& m,
                                           DistApprox::Method method = DistApprox::Method::Auto) {
    return DistApprox::fit(m, method);
}

}  // namespace garchmom

#endif  // GARCHMOM_DENSITY_HPP
