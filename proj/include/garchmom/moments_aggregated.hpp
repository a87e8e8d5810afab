#ifndef GARCHMOM_MOMENTS_AGGREGATED_HPP
#define GARCHMOM_MOMENTS_AGGREGATED_HPP

#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "garchmom/common.hpp"
#include "garchmom/model.hpp"
#include "garchmom/moments_forward.hpp"

namespace garchmom {

/// Horizon caps for the aggregated sums. Return skewness/kurtosis collapse
/// to double sums; the third and fourth moments of the aggregated variance
/// run O(n^3) and O(n^4) loops and get a much lower default.
struct AggregationCaps {
    std::size_t max_n_returns = 2000;
    std::size_t max_n_variance_tail = 200;
};

/// Cross-moment engine for products of forward variances and shocks at two,
/// three and four distinct horizons.
///
/// Every product reduces, by repeatedly pushing the conditioning time
/// forward, to the per-horizon raw moments plus division-free geometric
/// tables, so each accessor is O(1) and valid in every parameter region
/// (gamma = 1, c4 = 1, phi = gamma included). Construction is single-writer;
/// afterwards the object is immutable and safe for concurrent readers. The
/// O(n^3)/O(n^4) aggregation loops below stream over these accessors rather
/// than materializing triple/quadruple tables.
class CrossMomentTables {
public:
    /// order 2 suffices for aggregated returns; aggregated variances need 4.
    CrossMomentTables(const DerivedConstants& dc, std::size_t s_max, int order = 4)
        : table_(dc, s_max, order) {
        if (order >= 3) {
            const double c4 = dc.c4;
            c4_pow_.resize(s_max + 1);
            gs_c4_.resize(s_max + 1);
            gdr_phi_c4_.resize(s_max + 1);
            gdr_gamma_c4_.resize(s_max + 1);
            ggs_.resize(s_max + 1);
            ggdr_.resize(s_max + 1);
            c4_pow_[0] = 1.0;
            gs_c4_[0] = gdr_phi_c4_[0] = gdr_gamma_c4_[0] = ggs_[0] = ggdr_[0] = 0.0;
            for (std::size_t k = 1; k <= s_max; ++k) {
                c4_pow_[k] = c4_pow_[k - 1] * c4;
                gs_c4_[k] = 1.0 + c4 * gs_c4_[k - 1];
                gdr_phi_c4_[k] = table_.phi_pow(k - 1) + c4 * gdr_phi_c4_[k - 1];
                gdr_gamma_c4_[k] = table_.gamma_pow(k - 1) + c4 * gdr_gamma_c4_[k - 1];
                ggs_[k] = table_.gs_gamma(k - 1) + c4 * ggs_[k - 1];
                ggdr_[k] = table_.gdr_phi_gamma(k - 1) + c4 * ggdr_[k - 1];
            }
        }
    }

    const MomentTable& table() const { return table_; }
    const DerivedConstants& constants() const { return table_.constants(); }
    std::size_t s_max() const { return table_.s_max(); }

    // -- shock cross moments --------------------------------------------

    /// E[eps_{t+s} h_{t+s+u}] = c9 phi^{u-1} E[h_{t+s}^{3/2}].
    double theta1(std::size_t s, std::size_t u) const {
        return constants().c9 * table_.phi_pow(u - 1) * table_.eh32(s);
    }

    /// E[eps_{t+s} h_{t+s+u}^2].
    double theta2(std::size_t s, std::size_t u) const {
        const DerivedConstants& c = constants();
        c.require_third_order();
        const double omega = c.params.omega;
        const double base = c.c10 * table_.eh52(s) + 2.0 * omega * c.c9 * table_.eh32(s);
        return table_.gamma_pow(u - 1) * base +
               2.0 * omega * c.phi * c.c9 * table_.gdr_phi_gamma(u - 1) * table_.eh32(s);
    }

    /// E[eps_{t+s} h_{t+s+u}^{3/2}] by the second-order Taylor expansion of
    /// h^{3/2} around E[h_{t+s+u}].
    double theta32(std::size_t s, std::size_t u) const {
        const double m1su = table_.m1(s + u);
        return 0.75 * std::sqrt(m1su) * (theta1(s, u) + 0.5 * theta2(s, u) / m1su);
    }

    /// E[eps_{t+s} eps_{t+s+u}^2]; the inner square collapses to the forward
    /// variance, so this equals theta1.
    double eps_eps2(std::size_t s, std::size_t u) const { return theta1(s, u); }

    /// E[eps_{t+s} eps_{t+s+u}^3] = tau_z theta32.
    double eps_eps3(std::size_t s, std::size_t u) const {
        return constants().tau_z * theta32(s, u);
    }

    /// E[eps_{t+s}^2 eps_{t+s+u}^2].
    double eps2_eps2(std::size_t s, std::size_t u) const {
        const DerivedConstants& c = constants();
        const double coef =
            c.kappa_z * (c.params.alpha + c.params.lambda * c.f0) + c.params.beta;
        return c.h_bar * (1.0 - table_.phi_pow(u)) * table_.m1(s) +
               table_.phi_pow(u - 1) * coef * table_.m2(s);
    }

    /// E[eps_{t+s} eps_{t+s+u} eps_{t+s+u+v}^2] = c9 phi^{v-1} theta32(s,u).
    double eps_eps_eps2(std::size_t s, std::size_t u, std::size_t v) const {
        return constants().c9 * table_.phi_pow(v - 1) * theta32(s, u);
    }

    // -- variance cross moments -------------------------------------------
    // vIJ(s, u) = E[h_{t+s}^I h_{t+s+u}^J], u >= 1. Raising the trailing
    // power to 1 is one mean-reversion step; to 2 and 3, the grouped second-
    // and third-moment recursions.

    double v11(std::size_t s, std::size_t u) const {
        return raise_first(table_.m1(s), table_.m2(s), u);
    }
    double v21(std::size_t s, std::size_t u) const {
        return raise_first(table_.m2(s), table_.m3(s), u);
    }
    double v31(std::size_t s, std::size_t u) const {
        return raise_first(table_.m3(s), table_.m4(s), u);
    }
    double v12(std::size_t s, std::size_t u) const {
        return raise_second(table_.m1(s), table_.m2(s), table_.m3(s), u);
    }
    double v22(std::size_t s, std::size_t u) const {
        return raise_second(table_.m2(s), table_.m3(s), table_.m4(s), u);
    }
    double v13(std::size_t s, std::size_t u) const {
        return raise_third(table_.m1(s), table_.m2(s), table_.m3(s), table_.m4(s), u);
    }

    // -- triple and quadruple products --------------------------------------
    // tIJK(s, u, v) = E[h_{t+s}^I h_{t+s+u}^J h_{t+s+u+v}^K], u, v >= 1.

    double t111(std::size_t s, std::size_t u, std::size_t v) const {
        return raise_first(v11(s, u), v12(s, u), v);
    }
    double t211(std::size_t s, std::size_t u, std::size_t v) const {
        return raise_first(v21(s, u), v22(s, u), v);
    }
    double t121(std::size_t s, std::size_t u, std::size_t v) const {
        return raise_first(v12(s, u), v13(s, u), v);
    }
    double t112(std::size_t s, std::size_t u, std::size_t v) const {
        return raise_second(v11(s, u), v12(s, u), v13(s, u), v);
    }

    /// E[h_{t+s} h_{t+s+u} h_{t+s+u+v} h_{t+s+u+v+w}].
    double q1111(std::size_t s, std::size_t u, std::size_t v, std::size_t w) const {
        return raise_first(t111(s, u, v), t112(s, u, v), w);
    }

private:
    /// Appends a variance factor k steps beyond the last time in A:
    /// E[A h_{T+k}] = hbar E[A] + phi^k (E[A h_T] - hbar E[A]),
    /// from one mean-reversion step per lag.
    double raise_first(double x, double y, std::size_t k) const {
        const double hbar = constants().h_bar;
        return hbar * x + table_.phi_pow(k) * (y - hbar * x);
    }

    /// E[A h_{T+k}^2] from a1 = E[A], a2 = E[A h_T], a3 = E[A h_T^2]:
    /// iterating h'^2 = w^2 + 2 w phi h + gamma h^2 in expectation gives
    /// (w^2 + 2 w phi hbar) gs_gamma(k) a1
    ///   + 2 w phi gdr_{phi,gamma}(k) (a2 - hbar a1) + gamma^k a3.
    double raise_second(double a1, double a2, double a3, std::size_t k) const {
        const DerivedConstants& c = constants();
        const double omega = c.params.omega;
        return (omega * omega + 2.0 * omega * c.phi * c.h_bar) * table_.gs_gamma(k) * a1 +
               2.0 * omega * c.phi * table_.gdr_phi_gamma(k) * (a2 - c.h_bar * a1) +
               table_.gamma_pow(k) * a3;
    }

    /// E[A h_{T+k}^3] from a1..a4 = E[A h_T^{0..3}], by the same grouping of
    /// the cubic recursion h'^3 = w^3 + 3w^2 phi h + 3w gamma h^2 + c4 h^3.
    double raise_third(double a1, double a2, double a3, double a4, std::size_t k) const {
        const DerivedConstants& c = constants();
        const double omega = c.params.omega, hbar = c.h_bar;
        const double big_a = omega * omega + 2.0 * omega * c.phi * hbar;
        return omega * omega * omega * a1 * gs_c4_[k] +
               3.0 * omega * omega * c.phi *
                   (hbar * a1 * gs_c4_[k] + (a2 - hbar * a1) * gdr_phi_c4_[k]) +
               3.0 * omega * c.gamma *
                   (big_a * a1 * ggs_[k] +
                    2.0 * omega * c.phi * (a2 - hbar * a1) * ggdr_[k] +
                    a3 * gdr_gamma_c4_[k]) +
               c4_pow_[k] * a4;
    }

    MomentTable table_;
    std::vector<double> c4_pow_, gs_c4_, gdr_phi_c4_, gdr_gamma_c4_, ggs_, ggdr_;
};

namespace detail {

/// Runs fn(s) for s in [1, n] across a fixed partition and merges the
/// partial sums in index order, so the result is identical for any thread
/// count.
template <typename Fn>
double parallel_sum_over_s(std::size_t n, Fn&& fn) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, n);
    std::vector<double> partial(n + 1, 0.0);
    if (workers <= 1 || n < 16) {
        for (std::size_t s = 1; s <= n; ++s) partial[s] = fn(s);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t s = 1 + w; s <= n; s += workers) partial[s] = fn(s);
            });
        }
        for (auto& t : pool) t.join();
    }
    KahanSum total;
    for (std::size_t s = 1; s <= n; ++s) total.add(partial[s]);
    return total.value();
}

}  // namespace detail

/// Variance of the n-period aggregated return: the sum of the s-step-ahead
/// forward variances, in closed form.
inline double aggregated_return_variance(const DerivedConstants& dc, std::size_t n) {
    const double nd = static_cast<double>(n);
    return nd * dc.h_bar +
           (1.0 - std::pow(dc.phi, nd)) / (1.0 - dc.phi) * (dc.h_next - dc.h_bar);
}

/// Four conditional moments of the n-period aggregated return.
///
/// The third moment keeps the shock/variance cross terms in a single pass
/// over s (the u sum collapses to a geometric table); the fourth moment runs
/// the (s, u) double sum with the three-shock triple sum collapsed the same
/// way. Kahan compensation throughout.
inline MomentSet aggregated_return_moments(const CrossMomentTables& ctx, std::size_t n,
                                           const AggregationCaps& caps = {}) {
    if (n < 1) throw InvalidParamsError("aggregation horizon must be >= 1");
    if (n > caps.max_n_returns)
        throw ComplexityBudgetError("aggregated return moments capped at n = " +
                                    std::to_string(caps.max_n_returns));
    if (ctx.s_max() < n) throw InvalidParamsError("CrossMomentTables built too short");
    const DerivedConstants& dc = ctx.constants();
    const MomentTable& t = ctx.table();

    MomentSet out;
    out.mean = static_cast<double>(n) * dc.params.mu;

    KahanSum m2sum;
    for (std::size_t s = 1; s <= n; ++s) m2sum.add(t.m1(s));
    const double big_m2 = m2sum.value();

    // third central moment: tau_z sum_s E[h^{3/2}] + 3 sum_s sum_u E[eps eps'^2]
    KahanSum m3sum;
    for (std::size_t s = 1; s <= n; ++s)
        m3sum.add((dc.tau_z + 3.0 * dc.c9 * t.gs_phi(n - s)) * t.eh32(s));
    const double big_m3 = m3sum.value();

    // fourth central moment
    const bool needs_theta = dc.tau_z != 0.0 || dc.c9 != 0.0;
    const double m4_diag = [&] {
        KahanSum acc;
        for (std::size_t s = 1; s <= n; ++s) acc.add(t.m2(s));
        return dc.kappa_z * acc.value();
    }();
    const double m4_cross = detail::parallel_sum_over_s(n, [&](std::size_t s) {
        KahanSum acc;
        for (std::size_t u = 1; u + s <= n; ++u) {
            double term = 6.0 * ctx.eps2_eps2(s, u);
            if (needs_theta) {
                const double th = ctx.theta32(s, u);
                term += 4.0 * dc.tau_z * th +
                        12.0 * dc.c9 * t.gs_phi(n - s - u) * th;
            }
            acc.add(term);
        }
        return acc.value();
    });
    const double big_m4 = m4_diag + m4_cross;

    out.variance = big_m2;
    out.skewness = big_m3 / (big_m2 * std::sqrt(big_m2));
    out.kurtosis = big_m4 / (big_m2 * big_m2);
    return out;
}

/// Mean and variance of the aggregated variance, for any n. The covariance
/// of two forward variances lagged u is exactly phi^u times the nearer
/// variance-of-variance, which keeps this O(n) and cancellation-free.
inline void aggregated_variance_mean_variance(const CrossMomentTables& ctx, std::size_t n,
                                              double& mean, double& variance) {
    if (ctx.s_max() < n) throw InvalidParamsError("CrossMomentTables built too short");
    const MomentTable& t = ctx.table();
    const double phi = ctx.constants().phi;
    KahanSum msum, vsum;
    for (std::size_t s = 1; s <= n; ++s) {
        msum.add(t.m1(s));
        const double varh = t.m2(s) - t.m1(s) * t.m1(s);
        vsum.add(varh * (1.0 + 2.0 * phi * t.gs_phi(n - s)));
    }
    mean = msum.value();
    variance = vsum.value();
}

/// Brute-force second moment of the aggregated variance from the pairwise
/// cross moments; an independent route kept for cross-checking.
inline double aggregated_variance_m2_pairwise(const CrossMomentTables& ctx, std::size_t n) {
    const MomentTable& t = ctx.table();
    KahanSum acc;
    for (std::size_t s = 1; s <= n; ++s) acc.add(t.m2(s) - t.m1(s) * t.m1(s));
    for (std::size_t s = 1; s <= n; ++s)
        for (std::size_t u = 1; u + s <= n; ++u)
            acc.add(2.0 * (ctx.v11(s, u) - t.m1(s) * t.m1(s + u)));
    return acc.value();
}

/// Closed-form second moment of the aggregated variance (uncentered
/// aggregate minus the product sums, every sum in geometric closed form).
/// Needs gamma != 1 and phi != gamma.
inline double aggregated_variance_m2_closed_form(const DerivedConstants& dc, std::size_t n) {
    if (dc.near_unit_gamma || dc.phi_eq_gamma)
        throw UnsupportedRegionError(
            "closed-form aggregated variance needs gamma != 1 and phi != gamma");
    const double nd = static_cast<double>(n);
    const double p = dc.phi, g = dc.gamma, hbar = dc.h_bar, h1 = dc.h_next;
    const double pn = std::pow(p, nd), gn = std::pow(g, nd);
    const double h1sq_c3 = h1 * h1 - dc.c3;
    const double uncentered =
        nd * dc.c1 + h1sq_c3 * (1.0 - gn) / (1.0 - g) + dc.c2 * (1.0 - pn) / (1.0 - p) +
        2.0 * hbar *
            (0.5 * nd * (nd - 1.0) * hbar +
             (nd - (1.0 - pn) / (1.0 - p)) / (1.0 - p) * (h1 - hbar)) +
        2.0 * p / (1.0 - p) *
            (nd * (dc.c1 - dc.c2 * std::pow(p, nd - 1.0)) +
             (dc.c2 - dc.c1) * (1.0 - pn) / (1.0 - p) +
             h1sq_c3 * ((1.0 - gn) / (1.0 - g) - (pn - gn) / (p - g))) -
        2.0 * hbar * p / (1.0 - p) *
            (nd * (hbar - std::pow(p, nd - 1.0) * (h1 - hbar)) +
             (h1 - 2.0 * hbar) * (1.0 - pn) / (1.0 - p));
    const double sum_m1_sq =
        nd * hbar * hbar + (h1 - hbar) * (h1 - hbar) * (1.0 - pn * pn) / (1.0 - p * p) +
        2.0 * hbar * (h1 - hbar) * (1.0 - pn) / (1.0 - p);
    const double sum_m1_m1 =
        0.5 * nd * (nd - 1.0) * hbar * hbar +
        hbar * (h1 - hbar) / (1.0 - p) * (nd - (1.0 - pn) / (1.0 - p)) +
        hbar * (h1 - hbar) / (1.0 - p) * (p * (1.0 - pn) / (1.0 - p) - nd * pn) +
        (h1 - hbar) * (h1 - hbar) / (1.0 - p) *
            (p * (1.0 - pn * pn) / (1.0 - p * p) - pn * (1.0 - pn) / (1.0 - p));
    return uncentered - sum_m1_sq - 2.0 * sum_m1_m1;
}

/// Four conditional moments of the n-period aggregated variance.
///
/// The third and fourth central moments expand the power of the centered sum
/// into the two-, three- and four-time cross moments; each summand is O(1)
/// through CrossMomentTables, the loops are O(n^3) and O(n^4) and run
/// parallel over the outer index with a fixed reduction order.
inline MomentSet aggregated_variance_moments(const CrossMomentTables& ctx, std::size_t n,
                                             const AggregationCaps& caps = {}) {
    if (n < 2)
        throw DegenerateDistributionError(
            "aggregated variance at n = 1 is known; skewness/kurtosis undefined");
    if (n > caps.max_n_variance_tail)
        throw ComplexityBudgetError("aggregated variance tail moments capped at n = " +
                                    std::to_string(caps.max_n_variance_tail));
    if (ctx.s_max() < n) throw InvalidParamsError("CrossMomentTables built too short");
    const MomentTable& t = ctx.table();

    MomentSet out;
    aggregated_variance_mean_variance(ctx, n, out.mean, out.variance);

    auto m1 = [&](std::size_t s) { return t.m1(s); };
    auto m2 = [&](std::size_t s) { return t.m2(s); };
    auto m3 = [&](std::size_t s) { return t.m3(s); };

    // third central moment
    const double m3_total = detail::parallel_sum_over_s(n, [&](std::size_t s) {
        KahanSum acc;
        const double a = m1(s);
        acc.add(m3(s) - 3.0 * m2(s) * a + 2.0 * a * a * a);
        for (std::size_t u = 1; s + u <= n; ++u) {
            const double b = m1(s + u);
            const double pair = ctx.v11(s, u);
            acc.add(3.0 * (ctx.v21(s, u) + ctx.v12(s, u) +
                           2.0 * (a + b) * (a * b - pair) - a * m2(s + u) - b * m2(s)));
            for (std::size_t v = 1; s + u + v <= n; ++v) {
                const double c = m1(s + u + v);
                acc.add(6.0 * (ctx.t111(s, u, v) - a * ctx.v11(s + u, v) -
                               b * ctx.v11(s, u + v) - c * pair + 2.0 * a * b * c));
            }
        }
        return acc.value();
    });

    // fourth central moment
    const double m4_total = detail::parallel_sum_over_s(n, [&](std::size_t s) {
        KahanSum acc;
        const double a = m1(s);
        acc.add(t.m4(s) - 4.0 * a * m3(s) + 6.0 * a * a * m2(s) - 3.0 * a * a * a * a);
        for (std::size_t u = 1; s + u <= n; ++u) {
            const double b = m1(s + u);
            const double pair = ctx.v11(s, u);
            const double quad_block =
                ctx.v31(s, u) + ctx.v13(s, u) -
                3.0 * (a * ctx.v21(s, u) + b * ctx.v12(s, u)) -
                (b * m3(s) + a * m3(s + u)) +
                3.0 * a * (a * pair + b * m2(s) - a * a * b) +
                3.0 * b * (b * pair + a * m2(s + u) - a * b * b);
            const double six_block =
                ctx.v22(s, u) - 2.0 * (a * ctx.v12(s, u) + b * ctx.v21(s, u)) +
                a * a * m2(s + u) + b * b * m2(s) + 4.0 * a * b * pair -
                3.0 * a * a * b * b;
            acc.add(4.0 * quad_block + 6.0 * six_block);
            for (std::size_t v = 1; s + u + v <= n; ++v) {
                const double c = m1(s + u + v);
                const double trip = ctx.t111(s, u, v);
                // E[(h_s - a)^2 (h_{s+u} - b)(h_{s+u+v} - c)] and the two
                // sibling placements of the square, expanded term by term
                const double d1 = ctx.t211(s, u, v) - 2.0 * a * trip -
                                  b * ctx.v21(s, u + v) - c * ctx.v21(s, u) +
                                  a * a * ctx.v11(s + u, v) +
                                  2.0 * a * b * ctx.v11(s, u + v) + 2.0 * a * c * pair +
                                  b * c * m2(s) - 3.0 * a * a * b * c;
                const double d2 = ctx.t121(s, u, v) - 2.0 * b * trip -
                                  a * ctx.v21(s + u, v) - c * ctx.v12(s, u) +
                                  b * b * ctx.v11(s, u + v) +
                                  2.0 * a * b * ctx.v11(s + u, v) + 2.0 * b * c * pair +
                                  a * c * m2(s + u) - 3.0 * a * b * b * c;
                const double d3 = ctx.t112(s, u, v) - 2.0 * c * trip -
                                  a * ctx.v12(s + u, v) - b * ctx.v12(s, u + v) +
                                  c * c * pair + 2.0 * a * c * ctx.v11(s + u, v) +
                                  2.0 * b * c * ctx.v11(s, u + v) + a * b * m2(s + u + v) -
                                  3.0 * a * b * c * c;
                acc.add(12.0 * (d1 + d2 + d3));
                for (std::size_t w = 1; s + u + v + w <= n; ++w) {
                    const double d = m1(s + u + v + w);
                    acc.add(24.0 *
                            (ctx.q1111(s, u, v, w) - a * ctx.t111(s + u, v, w) -
                             b * ctx.t111(s, u + v, w) - c * ctx.t111(s, u, v + w) -
                             d * trip + a * b * ctx.v11(s + u + v, w) +
                             a * c * ctx.v11(s + u, v + w) + a * d * ctx.v11(s + u, v) +
                             b * c * ctx.v11(s, u + v + w) + b * d * ctx.v11(s, u + v) +
                             c * d * pair - 3.0 * a * b * c * d));
                }
            }
        }
        return acc.value();
    });

    out.skewness = m3_total / (out.variance * std::sqrt(out.variance));
    out.kurtosis = m4_total / (out.variance * out.variance);
    return out;
}

}  // namespace garchmom

#endif  // GARCHMOM_MOMENTS_AGGREGATED_HPP
