#ifndef GARCHMOM_LIMITS_HPP
#define GARCHMOM_LIMITS_HPP

#include <cmath>
#include <string>

#include "garchmom/common.hpp"
#include "garchmom/model.hpp"

namespace garchmom {

/// An infinite-horizon limit: a finite real or a signed infinity, with the
/// parameter-region label that produced it. Infinities are symbolic, never
/// floating-point inf, so region information survives formatting and
/// serialization.
struct ExtendedMoment {
    enum class Kind { Finite, PosInf, NegInf, Unsupported };

    Kind kind = Kind::Finite;
    double value = 0.0;     // meaningful only when kind == Finite
    std::string region;

    static ExtendedMoment finite(double v, std::string region) {
        return {Kind::Finite, v, std::move(region)};
    }
    static ExtendedMoment pos_inf(std::string region) {
        return {Kind::PosInf, 0.0, std::move(region)};
    }
    static ExtendedMoment neg_inf(std::string region) {
        return {Kind::NegInf, 0.0, std::move(region)};
    }
    /// Region the theory leaves open; the label says which.
    static ExtendedMoment unsupported(std::string region) {
        return {Kind::Unsupported, 0.0, std::move(region)};
    }
    /// sgn(x) * inf under the convention sgn(0) * inf = 0.
    static ExtendedMoment signed_inf(double sign_of, std::string region) {
        if (sign_of > 0.0) return pos_inf(std::move(region));
        if (sign_of < 0.0) return neg_inf(std::move(region));
        return finite(0.0, std::move(region));
    }

    bool is_finite() const { return kind == Kind::Finite; }

    std::string to_string() const {
        switch (kind) {
            case Kind::PosInf: return "+inf";
            case Kind::NegInf: return "-inf";
            case Kind::Unsupported: return "unsupported";
            case Kind::Finite: break;
        }
        return std::to_string(value);
    }
};

struct ForwardReturnLimits {
    ExtendedMoment variance;
    ExtendedMoment skewness;
    ExtendedMoment kurtosis;
};

struct AggregatedReturnLimits {
    ExtendedMoment variance_per_period;
    ExtendedMoment skewness;
    ExtendedMoment kurtosis;
};

struct VarianceLimits {
    ExtendedMoment fwd_variance;
    ExtendedMoment agg_variance_per_period;
    ExtendedMoment fwd_skewness;
    ExtendedMoment agg_skewness;
};

namespace detail {

inline void require_phi_ne_gamma(const DerivedConstants& dc) {
    if (dc.phi_eq_gamma)
        throw UnsupportedRegionError("limits are not available when phi = gamma");
}

}  // namespace detail

/// Infinite-horizon limits of the forward one-period return moments.
/// Finite for gamma < 1 (they equal the unconditional moments), signed
/// infinities otherwise.
inline ForwardReturnLimits limit_forward_returns(const DerivedConstants& dc) {
    detail::require_phi_ne_gamma(dc);
    ForwardReturnLimits out;
    out.variance = ExtendedMoment::finite(dc.h_bar, "phi<1");
    if (!dc.near_unit_gamma && dc.gamma < 1.0) {
        out.skewness = ExtendedMoment::finite(
            0.125 * dc.tau_z * (5.0 + 3.0 * dc.c1 / (dc.h_bar * dc.h_bar)), "gamma<1");
        out.kurtosis = ExtendedMoment::finite(
            dc.kappa_z * dc.c1 / (dc.h_bar * dc.h_bar), "gamma<1");
    } else {
        out.skewness = ExtendedMoment::signed_inf(dc.tau_z, "gamma>=1");
        out.kurtosis = ExtendedMoment::pos_inf("gamma>=1");
    }
    return out;
}

/// Infinite-horizon limits of the aggregated return moments (variance per
/// period). For gamma < 1 the distribution approaches the normal: skewness 0
/// and kurtosis 3. At gamma = 1 the kurtosis stays finite only for symmetric
/// specifications with lambda = 0.
inline AggregatedReturnLimits limit_aggregated_returns(const DerivedConstants& dc) {
    detail::require_phi_ne_gamma(dc);
    AggregatedReturnLimits out;
    out.variance_per_period = ExtendedMoment::finite(dc.h_bar, "phi<1");
    if (!dc.near_unit_gamma && dc.gamma < 1.0) {
        out.skewness = ExtendedMoment::finite(0.0, "gamma<1");
        out.kurtosis = ExtendedMoment::finite(3.0, "gamma<1");
        return out;
    }
    const double skew_sign =
        dc.tau_z * (dc.params.alpha + (dc.gamma - dc.phi) / 3.0) + dc.params.lambda * dc.pm3;
    out.skewness = ExtendedMoment::signed_inf(skew_sign, "gamma>=1");
    if (dc.near_unit_gamma) {
        if (dc.params.lambda == 0.0 && dc.tau_z == 0.0) {
            const double arch = dc.params.alpha + dc.params.lambda * dc.f0;
            const double v =
                3.0 + 0.5 * dc.kappa_z * (1.0 - dc.phi * dc.phi) *
                          (1.0 + 6.0 * (arch + dc.params.beta / dc.kappa_z) / (1.0 - dc.phi));
            out.kurtosis = ExtendedMoment::finite(v, "gamma=1 & symmetric");
        } else {
            out.kurtosis = ExtendedMoment::pos_inf("gamma=1 & asymmetric");
        }
    } else {
        out.kurtosis = ExtendedMoment::pos_inf("gamma>1");
    }
    return out;
}

/// Infinite-horizon limits of the variance-of-variance term structures:
/// forward and per-period aggregated variance of variance, and the two
/// skewness limits with their full (gamma, c4) region classification.
inline VarianceLimits limit_variance_moments(const DerivedConstants& dc) {
    detail::require_phi_ne_gamma(dc);
    dc.require_third_order();
    if (dc.c4_eq_gamma)
        throw UnsupportedRegionError("variance limits are not available when c4 = gamma");
    if (dc.c4_eq_phi)
        throw UnsupportedRegionError("variance limits are not available when c4 = phi");

    VarianceLimits out;
    const bool gamma_below_1 = !dc.near_unit_gamma && dc.gamma < 1.0;
    const bool gamma_above_1 = !dc.near_unit_gamma && dc.gamma > 1.0;

    if (gamma_below_1) {
        const double v = dc.c1 - dc.h_bar * dc.h_bar;
        out.fwd_variance = ExtendedMoment::finite(v, "gamma<1");
        out.agg_variance_per_period = ExtendedMoment::finite(
            v * (1.0 + 2.0 * dc.phi / (1.0 - dc.phi)), "gamma<1");
    } else {
        out.fwd_variance = ExtendedMoment::pos_inf("gamma>=1");
        out.agg_variance_per_period = ExtendedMoment::pos_inf("gamma>=1");
    }

    // forward variance skewness: five cases over (gamma, c4)
    const bool c4_below_1 = !dc.near_unit_c4 && dc.c4 < 1.0;
    if (gamma_below_1 && c4_below_1) {
        const double num = dc.params.omega *
                               (dc.params.omega * dc.params.omega +
                                3.0 * dc.params.omega * dc.phi * dc.h_bar +
                                3.0 * dc.gamma * dc.c1) /
                               (1.0 - dc.c4) -
                           3.0 * dc.h_bar * dc.c1 +
                           2.0 * dc.h_bar * dc.h_bar * dc.h_bar;
        const double den = std::pow(dc.c1 - dc.h_bar * dc.h_bar, 1.5);
        out.fwd_skewness = ExtendedMoment::finite(num / den, "gamma<1 & c4<1");
    } else if (gamma_below_1) {
        out.fwd_skewness = ExtendedMoment::pos_inf("gamma<1 & c4>=1");
    } else {
        const double g32 = std::pow(dc.gamma, 1.5);
        const bool c4_eq_g32 = nearly_equal(dc.c4, g32);
        if (gamma_above_1 && c4_eq_g32) {
            const double den = std::pow(dc.h_next * dc.h_next - dc.c3, 1.5);
            out.fwd_skewness =
                ExtendedMoment::finite(dc.c18 / den, "gamma>1 & c4=gamma^{3/2}");
        } else if (dc.c4 < g32 && !c4_eq_g32) {
            out.fwd_skewness = ExtendedMoment::finite(0.0, "gamma>=1 & c4<gamma^{3/2}");
        } else if (dc.near_unit_gamma && dc.near_unit_c4) {
            out.fwd_skewness = ExtendedMoment::unsupported("gamma=1 & c4=1 (not covered)");
        } else {
            out.fwd_skewness = ExtendedMoment::pos_inf("gamma>=1 & c4>gamma^{3/2}");
        }
    }

    // aggregated variance skewness: the theory covers gamma in (0,1) only
    if (!gamma_below_1) {
        out.agg_skewness = ExtendedMoment::unsupported("gamma>=1 (not covered)");
        return out;
    }
    if (c4_below_1) {
        out.agg_skewness = ExtendedMoment::finite(0.0, "gamma<1 & c4<1");
    } else if (dc.near_unit_c4) {
        const double omega = dc.params.omega, phi = dc.phi, gamma = dc.gamma;
        const double hbar = dc.h_bar, c1 = dc.c1, h1 = dc.h_next;
        const double core = omega * omega + 3.0 * omega * phi * hbar + 3.0 * gamma * c1;
        const double n_value =
            0.5 * omega * core +
            1.5 * hbar *
                (c1 + phi * core + omega * omega / (1.0 - gamma) + 2.0 * omega * phi * hbar) +
            1.5 * gamma / (1.0 - gamma) * core * (omega + 2.0 * phi * hbar) +
            3.0 / (1.0 - phi) * hbar *
                (c1 * (1.0 + phi) - 2.0 * phi * hbar * hbar +
                 hbar * ((h1 - hbar) - omega) - phi * (2.0 * c1 - hbar * hbar));
        out.agg_skewness = ExtendedMoment::signed_inf(n_value, "gamma<1 & c4=1");
    } else {
        out.agg_skewness = ExtendedMoment::pos_inf("gamma<1 & c4>1");
    }
    return out;
}

}  // namespace garchmom

#endif  // GARCHMOM_LIMITS_HPP
