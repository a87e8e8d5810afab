#ifndef GARCHMOM_MODEL_HPP
#define GARCHMOM_MODEL_HPP

#include <cmath>
#include <limits>

#include "garchmom/common.hpp"
#include "garchmom/innovation.hpp"

namespace garchmom {

/// Parameters of r_t = mu + eps_t, eps_t = z_t sqrt(h_t),
/// h_t = omega + alpha eps^2 + lambda eps^2 1{eps<0} + beta h.
struct GjrParams {
    double mu = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    double beta = 0.0;
};

/// The known one-step-ahead conditional variance, in variance units.
struct ForecastOrigin {
    double h_next = 0.0;
};

/// Relative tolerance below which two persistence constants are treated as
/// equal. Centralized so every module selects degenerate-case formulas the
/// same way.
inline constexpr double kDegeneracyTol = 1e-10;

inline bool nearly_equal(double a, double b) {
    return std::fabs(a - b) <= kDegeneracyTol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

/// Everything the moment formulas need, precomputed once per
/// (params, innovation, origin) triple.
///
/// Third-order constants (c4, c6, c10, c18) need the sixth/fifth innovation
/// moments, fourth-order ones (c7) the eighth; for a Student t with small nu
/// those do not exist, so each tier carries a validity flag and the accessors
/// throw UndefinedMomentError past the supported tier.
struct DerivedConstants {
    GjrParams params;
    double h_next = 0.0;

    // innovation summaries
    double f0 = 0.5;       // distribution function at zero
    double tau_z = 0.0;    // innovation skewness
    double kappa_z = 3.0;  // innovation kurtosis
    double mu_z5 = 0.0;
    double mu_z6 = 0.0;
    double mu_z8 = 0.0;
    double pm3 = 0.0;  // lower partial moment of order 3
    double pm5 = 0.0;  //                            ... 5

    double phi = 0.0;
    double gamma = 0.0;
    double h_bar = 0.0;

    // c1..c3 exist only away from the gamma=1 / phi=gamma degeneracies
    double c1 = std::numeric_limits<double>::quiet_NaN();
    double c2 = std::numeric_limits<double>::quiet_NaN();
    double c3 = std::numeric_limits<double>::quiet_NaN();
    double c4 = std::numeric_limits<double>::quiet_NaN();
    double c5 = 0.0;
    double c6 = std::numeric_limits<double>::quiet_NaN();
    double c7 = std::numeric_limits<double>::quiet_NaN();
    double c9 = 0.0;
    double c10 = std::numeric_limits<double>::quiet_NaN();
    double c12 = 0.0;
    double c13 = 0.0;
    double c14 = std::numeric_limits<double>::quiet_NaN();
    double c17 = 0.0;
    double c18 = std::numeric_limits<double>::quiet_NaN();

    bool third_order_available = false;   // c4, c6 (needs mu_z6) and c10 (needs mu_z5, pm5)
    bool fourth_order_available = false;  // c7 (needs mu_z8)

    // degeneracy flags, all at kDegeneracyTol relative
    bool near_unit_gamma = false;
    bool near_unit_c4 = false;
    bool phi_eq_gamma = false;
    bool c4_eq_gamma = false;
    bool c4_eq_phi = false;

    void require_third_order() const {
        if (!third_order_available)
            throw UndefinedMomentError(
                "third variance moment needs innovation moments up to order 6");
    }
    void require_fourth_order() const {
        if (!fourth_order_available)
            throw UndefinedMomentError(
                "fourth variance moment needs innovation moments up to order 8");
    }
};

/// Validates the parameter invariants and computes every derived constant.
/// Throws NonStationaryError when phi is outside (0,1) and InvalidParamsError
/// on any other invariant breach.
inline DerivedConstants derive_constants(const GjrParams& p, const Innovation& inn,
                                         const ForecastOrigin& origin) {
    DerivedConstants dc;
    dc.params = p;
    dc.h_next = origin.h_next;

    if (!(p.omega > 0.0)) throw InvalidParamsError("omega must be positive");
    if (!(p.alpha >= 0.0)) throw InvalidParamsError("alpha must be nonnegative");
    if (!(p.beta >= 0.0)) throw InvalidParamsError("beta must be nonnegative");
    if (!(origin.h_next > 0.0)) throw InvalidParamsError("h_next must be positive");

    dc.f0 = inn.cdf_at_zero();
    if (!(dc.f0 > 0.0 && dc.f0 < 1.0))
        throw InvalidParamsError("innovation distribution function at zero must lie in (0,1)");

    const double arch = p.alpha + p.lambda * dc.f0;
    if (!(arch >= 0.0))
        throw InvalidParamsError("alpha + lambda*F0 must be nonnegative");

    dc.tau_z = inn.moment(3);
    dc.kappa_z = inn.moment(4);
    dc.pm3 = inn.lower_partial_moment(3);

    dc.phi = arch + p.beta;
    if (!(dc.phi > 0.0 && dc.phi < 1.0))
        throw NonStationaryError("phi = alpha + lambda*F0 + beta must lie in (0,1)");
    dc.h_bar = p.omega / (1.0 - dc.phi);

    dc.gamma = dc.phi * dc.phi + (dc.kappa_z - 1.0) * arch * arch +
               dc.kappa_z * p.lambda * p.lambda * dc.f0 * (1.0 - dc.f0);

    dc.near_unit_gamma = nearly_equal(dc.gamma, 1.0);
    dc.phi_eq_gamma = nearly_equal(dc.phi, dc.gamma);

    if (!dc.near_unit_gamma)
        dc.c1 = (p.omega * p.omega + 2.0 * p.omega * dc.phi * dc.h_bar) / (1.0 - dc.gamma);
    if (!dc.phi_eq_gamma)
        dc.c2 = 2.0 * p.omega * dc.phi * (dc.h_next - dc.h_bar) / (dc.phi - dc.gamma);
    dc.c3 = dc.c1 + dc.c2;

    dc.c5 = 6.0 * p.omega * p.omega * dc.gamma;
    dc.c9 = p.alpha * dc.tau_z + p.lambda * dc.pm3;
    dc.c12 = 0.125 * (dc.tau_z + 3.0 * dc.c9 / (1.0 - dc.phi));
    dc.c13 = 0.375 * dc.c9 / (1.0 - dc.phi);
    if (dc.c13 != 0.0) dc.c14 = dc.c12 / dc.c13;
    dc.c17 = dc.tau_z + 3.0 * dc.c9 / (1.0 - dc.phi);

    // third-order tier
    try {
        dc.mu_z5 = inn.moment(5);
        dc.mu_z6 = inn.moment(6);
        dc.pm5 = inn.lower_partial_moment(5);
        dc.third_order_available = true;
    } catch (const UndefinedMomentError&) {
        dc.third_order_available = false;
    }
    if (dc.third_order_available) {
        dc.c4 = dc.mu_z6 * (p.alpha * p.alpha * p.alpha +
                            3.0 * p.alpha * p.lambda * (p.alpha + p.lambda) * dc.f0 +
                            p.lambda * p.lambda * p.lambda * dc.f0) +
                3.0 * p.beta * dc.gamma -
                p.beta * p.beta * (2.0 * p.beta + 3.0 * arch);
        dc.c6 = 4.0 * p.omega * dc.c4;
        dc.c10 = p.alpha * (p.alpha * dc.mu_z5 + 2.0 * p.beta * dc.tau_z) +
                 p.lambda * (2.0 * p.alpha + p.lambda) * dc.pm5 +
                 2.0 * p.beta * p.lambda * dc.pm3;
        dc.near_unit_c4 = nearly_equal(dc.c4, 1.0);
        dc.c4_eq_gamma = nearly_equal(dc.c4, dc.gamma);
        dc.c4_eq_phi = nearly_equal(dc.c4, dc.phi);
        if (!dc.near_unit_gamma && !dc.phi_eq_gamma && !dc.near_unit_c4 &&
            !dc.c4_eq_gamma && !dc.c4_eq_phi) {
            // grouping constant of the closed-form third variance moment
            const double p3 = p.omega * (p.omega * p.omega +
                                         3.0 * p.omega * dc.phi * dc.h_bar +
                                         3.0 * dc.gamma * dc.c1);
            const double q3 = 3.0 * p.omega * p.omega * dc.phi * (dc.h_next - dc.h_bar) +
                              3.0 * p.omega * dc.gamma * dc.c2;
            const double r3 = 3.0 * p.omega * dc.gamma * (dc.h_next * dc.h_next - dc.c3);
            dc.c18 = dc.h_next * dc.h_next * dc.h_next - p3 / (1.0 - dc.c4) -
                     q3 / (dc.phi - dc.c4) - r3 / (dc.gamma - dc.c4);
        }
    }

    // fourth-order tier
    try {
        dc.mu_z8 = inn.moment(8);
        dc.fourth_order_available = true;
    } catch (const UndefinedMomentError&) {
        dc.fourth_order_available = false;
    }
    if (dc.fourth_order_available) {
        const double a = p.alpha, l = p.lambda, b = p.beta, f0 = dc.f0;
        dc.c7 = dc.mu_z8 * (a * a * a * a +
                            f0 * (l * l * l * l + 4.0 * (a * a * a * l + a * l * l * l) +
                                  6.0 * a * a * l * l)) +
                b * b * b * b +
                4.0 * (dc.mu_z6 * b *
                           (a * a * a + f0 * (l * l * l + 3.0 * (a * a * l + a * l * l))) +
                       b * b * b * arch) +
                6.0 * dc.kappa_z * b * b * (a * a + l * l * f0 + 2.0 * a * l * f0);
    }

    return dc;
}

}  // namespace garchmom

#endif  // GARCHMOM_MODEL_HPP
