#ifndef GARCHMOM_MOMENTS_FORWARD_HPP
#define GARCHMOM_MOMENTS_FORWARD_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "garchmom/common.hpp"
#include "garchmom/model.hpp"

namespace garchmom {

/// Raw moments E[h_{t+s}^i], i = 1..4, of the forward conditional variance.
struct VarianceRawMoments {
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

/// Horizon-indexed table of the forward variance raw moments, the Taylor
/// values of E[h^{3/2}] and E[h^{5/2}], and the power/geometric-sum arrays
/// every multi-horizon formula consumes.
///
/// Entries are built once per (constants, s_max, order) by the one-step
/// recursions, which are division-free and therefore valid in every
/// parameter region including gamma = 1, c4 = 1 and phi = gamma. The table
/// is immutable after construction and safe for concurrent readers; callers
/// that aggregate over n should build one table with s_max >= n and reuse it
/// instead of recomputing per horizon.
class MomentTable {
public:
    /// order: highest variance moment to tabulate (2..4). Orders 3 and 4
    /// need the sixth resp. eighth innovation moment to exist.
    MomentTable(const DerivedConstants& dc, std::size_t s_max, int order = 4)
        : dc_(dc), s_max_(s_max), order_(order) {
        if (s_max < 1) throw InvalidParamsError("s_max must be at least 1");
        if (order < 2 || order > 4) throw InvalidParamsError("order must be 2, 3 or 4");
        if (order >= 3) dc.require_third_order();
        if (order >= 4) dc.require_fourth_order();
        build();
    }

    const DerivedConstants& constants() const { return dc_; }
    std::size_t s_max() const { return s_max_; }
    int order() const { return order_; }

    double m1(std::size_t s) const { return m1_[check(s)]; }
    double m2(std::size_t s) const { return m2_[check(s)]; }
    double m3(std::size_t s) const { return m3_[check_order(s, 3)]; }
    double m4(std::size_t s) const { return m4_[check_order(s, 4)]; }

    VarianceRawMoments raw(std::size_t s) const {
        return {m1(s), m2(s), m3(s), m4(s)};
    }

    /// Second-order Taylor value of E[h_{t+s}^{3/2}]; exact at s = 1 where
    /// m2 = m1^2 collapses the expansion.
    double eh32(std::size_t s) const { return eh32_[check(s)]; }
    /// Same for E[h_{t+s}^{5/2}].
    double eh52(std::size_t s) const { return eh52_[check(s)]; }

    // power tables, index 0..s_max
    double phi_pow(std::size_t k) const { return phi_pow_[k]; }
    double gamma_pow(std::size_t k) const { return gamma_pow_[k]; }
    /// gs(x, k) = sum_{j<k} x^j, tabulated for x = phi and x = gamma.
    double gs_phi(std::size_t k) const { return gs_phi_[k]; }
    double gs_gamma(std::size_t k) const { return gs_gamma_[k]; }
    /// gdr(k) = sum_{j<k} gamma^j phi^{k-1-j}; the divided difference
    /// (phi^k - gamma^k) / (phi - gamma) without the division.
    double gdr_phi_gamma(std::size_t k) const { return gdr_phi_gamma_[k]; }

private:
    std::size_t check(std::size_t s) const {
        if (s < 1 || s > s_max_) throw InvalidParamsError("horizon out of table range");
        return s;
    }
    std::size_t check_order(std::size_t s, int order) const {
        if (order_ < order)
            throw InvalidParamsError("moment order not tabulated; rebuild with higher order");
        return check(s);
    }

    void build() {
        const double omega = dc_.params.omega;
        const double phi = dc_.phi, gamma = dc_.gamma, hbar = dc_.h_bar;
        const double h1 = dc_.h_next;

        m1_.resize(s_max_ + 1);
        m2_.resize(s_max_ + 1);
        eh32_.resize(s_max_ + 1);
        eh52_.resize(s_max_ + 1);
        phi_pow_.resize(s_max_ + 1);
        gamma_pow_.resize(s_max_ + 1);
        gs_phi_.resize(s_max_ + 1);
        gs_gamma_.resize(s_max_ + 1);
        gdr_phi_gamma_.resize(s_max_ + 1);
        if (order_ >= 3) m3_.resize(s_max_ + 1);
        if (order_ >= 4) m4_.resize(s_max_ + 1);

        phi_pow_[0] = gamma_pow_[0] = 1.0;
        gs_phi_[0] = gs_gamma_[0] = gdr_phi_gamma_[0] = 0.0;
        for (std::size_t k = 1; k <= s_max_; ++k) {
            phi_pow_[k] = phi_pow_[k - 1] * phi;
            gamma_pow_[k] = gamma_pow_[k - 1] * gamma;
            gs_phi_[k] = 1.0 + phi * gs_phi_[k - 1];
            gs_gamma_[k] = 1.0 + gamma * gs_gamma_[k - 1];
            gdr_phi_gamma_[k] = phi_pow_[k - 1] + gamma * gdr_phi_gamma_[k - 1];
        }

        m1_[1] = h1;
        m2_[1] = h1 * h1;
        if (order_ >= 3) m3_[1] = h1 * h1 * h1;
        if (order_ >= 4) m4_[1] = h1 * h1 * h1 * h1;
        for (std::size_t s = 2; s <= s_max_; ++s) {
            m1_[s] = hbar + phi_pow_[s - 1] * (h1 - hbar);
            m2_[s] = omega * omega + 2.0 * omega * phi * m1_[s - 1] + gamma * m2_[s - 1];
            if (order_ >= 3)
                m3_[s] = omega * omega * omega + 3.0 * omega * omega * phi * m1_[s - 1] +
                         3.0 * omega * gamma * m2_[s - 1] + dc_.c4 * m3_[s - 1];
            if (order_ >= 4)
                m4_[s] = omega * omega * omega * omega +
                         4.0 * omega * omega * omega * phi * m1_[s - 1] +
                         dc_.c5 * m2_[s - 1] + dc_.c6 * m3_[s - 1] + dc_.c7 * m4_[s - 1];
        }
        const double last_hi = order_ >= 4 ? m4_[s_max_] : (order_ >= 3 ? m3_[s_max_] : m2_[s_max_]);
        if (!std::isfinite(last_hi))
            throw OverflowError("variance moment recursion overflowed at the requested horizon");

        for (std::size_t s = 1; s <= s_max_; ++s) {
            const double r = std::sqrt(m1_[s]);
            eh32_[s] = 0.625 * m1_[s] * r + 0.375 * m2_[s] / r;
            eh52_[s] = 0.125 * r * (15.0 * m2_[s] - 7.0 * m1_[s] * m1_[s]);
        }
    }

    DerivedConstants dc_;
    std::size_t s_max_;
    int order_;
    std::vector<double> m1_, m2_, m3_, m4_, eh32_, eh52_;
    std::vector<double> phi_pow_, gamma_pow_, gs_phi_, gs_gamma_, gdr_phi_gamma_;
};

/// Raw variance moments at a single horizon (builds a throwaway table; use
/// MomentTable directly when several horizons are needed).
inline VarianceRawMoments variance_raw_moments(const DerivedConstants& dc, std::size_t s) {
    return MomentTable(dc, s, 4).raw(s);
}

/// Closed form of E[h_{t+s}^2], selecting the gamma = 1 branch when the
/// degeneracy flag is set. Provided alongside the recursion so the two
/// routes can be checked against each other.
inline double variance_m2_closed_form(const DerivedConstants& dc, std::size_t s) {
    const double omega = dc.params.omega;
    const double phi = dc.phi, hbar = dc.h_bar, h1 = dc.h_next;
    const double sd = static_cast<double>(s);
    if (dc.near_unit_gamma) {
        return (sd - 1.0) * (omega * omega + 2.0 * omega * phi * hbar) +
               2.0 * phi * hbar * (1.0 - std::pow(phi, sd - 1.0)) * (h1 - hbar) +
               h1 * h1;
    }
    if (dc.phi_eq_gamma)
        throw UnsupportedRegionError("closed-form m2 needs phi != gamma; use the recursion");
    return dc.c1 + (h1 * h1 - dc.c3) * std::pow(dc.gamma, sd - 1.0) +
           dc.c2 * std::pow(phi, sd - 1.0);
}

/// Closed form of E[h_{t+s}^3] away from the degeneracies, with the c4 = 1
/// and gamma = 1 branches. The generic branch groups the recursion's
/// geometric sums by powers of phi, gamma and c4.
inline double variance_m3_closed_form(const DerivedConstants& dc, std::size_t s) {
    dc.require_third_order();
    const double omega = dc.params.omega;
    const double phi = dc.phi, gamma = dc.gamma, hbar = dc.h_bar, h1 = dc.h_next;
    const double c4 = dc.c4;
    const double sd = static_cast<double>(s);
    if (dc.phi_eq_gamma || dc.c4_eq_gamma || dc.c4_eq_phi)
        throw UnsupportedRegionError("closed-form m3 needs distinct phi, gamma, c4");
    if (!dc.near_unit_gamma && !dc.near_unit_c4) {
        const double p3 =
            omega * (omega * omega + 3.0 * omega * phi * hbar + 3.0 * gamma * dc.c1);
        const double q3 =
            3.0 * omega * omega * phi * (h1 - hbar) + 3.0 * omega * gamma * dc.c2;
        const double r3 = 3.0 * omega * gamma * (h1 * h1 - dc.c3);
        return p3 / (1.0 - c4) + q3 / (phi - c4) * std::pow(phi, sd - 1.0) +
               dc.c18 * std::pow(c4, sd - 1.0) +
               r3 / (gamma - c4) * std::pow(gamma, sd - 1.0);
    }
    if (dc.near_unit_c4 && !dc.near_unit_gamma) {
        return h1 * h1 * h1 +
               (sd - 1.0) * omega *
                   (omega * omega + 3.0 * hbar * phi * omega + 3.0 * gamma * dc.c1) +
               3.0 * omega * (omega * phi * (h1 - hbar) + gamma * dc.c2) /
                   (1.0 - phi) * (1.0 - std::pow(phi, sd - 1.0)) +
               3.0 * omega * gamma * (h1 * h1 - dc.c3) / (1.0 - gamma) *
                   (1.0 - std::pow(gamma, sd - 1.0));
    }
    if (dc.near_unit_gamma && !dc.near_unit_c4) {
        const double a = (omega * omega * omega + 3.0 * omega * omega * phi * hbar +
                          6.0 * omega * gamma * phi * hbar * (h1 - hbar) +
                          3.0 * omega * gamma * h1 * h1);
        const double b = 3.0 * omega * omega * phi * (h1 - hbar) -
                         6.0 * omega * gamma * phi * hbar * (h1 - hbar);
        const double g = 3.0 * omega * gamma * (omega * omega + 2.0 * omega * phi * hbar);
        return a / (1.0 - c4) * (1.0 - std::pow(c4, sd - 1.0)) +
               b / (phi - c4) * (std::pow(phi, sd - 1.0) - std::pow(c4, sd - 1.0)) +
               g * ((sd - 2.0) / (1.0 - c4) -
                    c4 / ((1.0 - c4) * (1.0 - c4)) * (1.0 - std::pow(c4, sd - 2.0))) +
               std::pow(c4, sd - 1.0) * h1 * h1 * h1;
    }
    throw UnsupportedRegionError("closed-form m3 has no branch for gamma = 1 and c4 = 1");
}

/// Second-order Taylor value of E[h_{t+s}^p], p in {3/2, 5/2}.
inline double expected_h_power(const DerivedConstants& dc, std::size_t s, double p) {
    MomentTable table(dc, s, 2);
    if (p == 1.5) return table.eh32(s);
    if (p == 2.5) return table.eh52(s);
    throw InvalidParamsError("expected_h_power supports p = 3/2 and p = 5/2");
}

/// Conditional moments of the one-period return s steps ahead. The ratio
/// m2 / m1^2 is formed first so that at s = 1, where it is identically one,
/// the kurtosis equals the innovation kurtosis to the last bit.
inline MomentSet forward_return_moments(const MomentTable& table, std::size_t s) {
    const DerivedConstants& dc = table.constants();
    MomentSet m;
    m.mean = dc.params.mu;
    m.variance = table.m1(s);
    m.skewness = dc.tau_z * (table.eh32(s) / (m.variance * std::sqrt(m.variance)));
    m.kurtosis = dc.kappa_z * (table.m2(s) / (m.variance * m.variance));
    return m;
}

inline MomentSet forward_return_moments(const DerivedConstants& dc, std::size_t s) {
    return forward_return_moments(MomentTable(dc, s, 2), s);
}

/// Mean and variance of the forward conditional variance; defined for every
/// s >= 1 (the variance is zero at s = 1 where h_{t+1} is known).
inline void forward_variance_mean_variance(const MomentTable& table, std::size_t s,
                                           double& mean, double& variance) {
    mean = table.m1(s);
    variance = s == 1 ? 0.0 : table.m2(s) - mean * mean;
}

/// All four conditional moments of the forward variance. Throws
/// DegenerateDistributionError at s = 1 where the distribution is a point
/// mass and skewness/kurtosis are undefined.
inline MomentSet forward_variance_moments(const MomentTable& table, std::size_t s) {
    if (s < 2)
        throw DegenerateDistributionError(
            "forward variance at s = 1 is known; skewness/kurtosis undefined");
    const double m1 = table.m1(s), m2 = table.m2(s), m3 = table.m3(s), m4 = table.m4(s);
    MomentSet m;
    m.mean = m1;
    m.variance = m2 - m1 * m1;
    const double c3 = m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1;
    const double c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
    m.skewness = c3 / (m.variance * std::sqrt(m.variance));
    m.kurtosis = c4 / (m.variance * m.variance);
    return m;
}

inline MomentSet forward_variance_moments(const DerivedConstants& dc, std::size_t s) {
    return forward_variance_moments(MomentTable(dc, s, 4), s);
}

}  // namespace garchmom

#endif  // GARCHMOM_MOMENTS_FORWARD_HPP
