#ifndef GARCHMOM_GOF_HPP
#define GARCHMOM_GOF_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "garchmom/common.hpp"
#include "garchmom/rng.hpp"

namespace garchmom {

enum class GofKind { KS, CVM, AD };

/// One goodness-of-fit evaluation. `statistic` carries the scaled test
/// statistic (for KS that is sqrt(T) times the sup distance, which is also
/// reported separately as `distance`). When a 5% critical value is attached,
/// `rejected` compares against it.
struct GofResult {
    GofKind kind = GofKind::KS;
    double statistic = 0.0;
    double distance = 0.0;  // KS only: statistic / sqrt(T)
    std::size_t sample_size = 0;
    std::optional<double> critical_value_5pct;
    std::optional<bool> rejected;
    // AD guard bookkeeping: how many cdf values had to be clamped away from
    // {0, 1}, and the first offending sample index (0-based) if any.
    std::size_t clamped_values = 0;
    std::optional<std::size_t> first_clamped_index;

    void attach_critical_value(double cv) {
        critical_value_5pct = cv;
        rejected = statistic > cv;
    }
};

using CdfFn = std::function<double(double)>;

namespace detail {

inline void require_sorted_nonempty(std::span<const double> sample) {
    if (sample.empty()) throw EmptySampleError("goodness-of-fit sample is empty");
    for (std::size_t i = 1; i < sample.size(); ++i)
        if (sample[i] < sample[i - 1])
            throw InvalidParamsError("goodness-of-fit sample must be sorted ascending");
}

}  // namespace detail

/// KS statistic sqrt(T) max_i max[F(x_i) - (i-1)/T, i/T - F(x_i)] against an
/// ascending sample.
inline GofResult ks_statistic(const CdfFn& cdf, std::span<const double> sample) {
    detail::require_sorted_nonempty(sample);
    const std::size_t t = sample.size();
    const double td = static_cast<double>(t);
    double d = 0.0;
    for (std::size_t i = 1; i <= t; ++i) {
        const double f = cdf(sample[i - 1]);
        d = std::max(d, f - static_cast<double>(i - 1) / td);
        d = std::max(d, static_cast<double>(i) / td - f);
    }
    GofResult r;
    r.kind = GofKind::KS;
    r.distance = d;
    r.statistic = std::sqrt(td) * d;
    r.sample_size = t;
    return r;
}

/// CVM statistic sum_i [F(x_i) - (2i-1)/(2T)]^2 + 1/(12T).
inline GofResult cvm_statistic(const CdfFn& cdf, std::span<const double> sample) {
    detail::require_sorted_nonempty(sample);
    const std::size_t t = sample.size();
    const double td = static_cast<double>(t);
    KahanSum acc;
    for (std::size_t i = 1; i <= t; ++i) {
        const double gap = cdf(sample[i - 1]) - (2.0 * static_cast<double>(i) - 1.0) / (2.0 * td);
        acc.add(gap * gap);
    }
    GofResult r;
    r.kind = GofKind::CVM;
    r.statistic = acc.value() + 1.0 / (12.0 * td);
    r.sample_size = t;
    return r;
}

/// AD statistic -sum_i (2i-1)/T [ln F(x_i) + ln(1 - F(x_{T+1-i}))] - T.
/// F values are clamped to [1e-15, 1 - 1e-15] so a cdf that exits (0,1)
/// (an Edgeworth expansion can) yields a finite statistic; the clamp count
/// and first offending index are reported on the result.
inline GofResult ad_statistic(const CdfFn& cdf, std::span<const double> sample) {
    detail::require_sorted_nonempty(sample);
    const std::size_t t = sample.size();
    const double td = static_cast<double>(t);
    GofResult r;
    r.kind = GofKind::AD;
    r.sample_size = t;

    std::vector<double> f(t);
    for (std::size_t i = 0; i < t; ++i) {
        double v = cdf(sample[i]);
        if (v < 1e-15 || v > 1.0 - 1e-15) {
            v = std::clamp(v, 1e-15, 1.0 - 1e-15);
            ++r.clamped_values;
            if (!r.first_clamped_index) r.first_clamped_index = i;
        }
        f[i] = v;
    }
    KahanSum acc;
    for (std::size_t i = 1; i <= t; ++i) {
        const double w = (2.0 * static_cast<double>(i) - 1.0) / td;
        acc.add(w * (std::log(f[i - 1]) + std::log(1.0 - f[t - i])));
    }
    r.statistic = -acc.value() - td;
    return r;
}

inline GofResult gof_statistic(GofKind kind, const CdfFn& cdf,
                               std::span<const double> sample) {
    switch (kind) {
        case GofKind::KS: return ks_statistic(cdf, sample);
        case GofKind::CVM: return cvm_statistic(cdf, sample);
        case GofKind::AD: return ad_statistic(cdf, sample);
    }
    throw InvalidParamsError("unknown statistic kind");
}

/// Asymptotic 5% critical values: 1.358 for the KS statistic (0.0136 on the
/// distance scale at T = 10^4) and 0.461 for CVM.
inline double asymptotic_critical_value_5pct(GofKind kind) {
    switch (kind) {
        case GofKind::KS: return 1.358;
        case GofKind::CVM: return 0.461;
        case GofKind::AD: return 2.492;
    }
    throw InvalidParamsError("unknown statistic kind");
}

/// One trial of a critical-value simulation: draws a sample of size T from
/// the null (via its quantile function) and produces the cdf the statistic
/// is evaluated against. A fully-specified null returns the null cdf itself;
/// an estimated-parameter pipeline re-fits its approximation on the drawn
/// sample and returns the refitted cdf.
struct CriticalValuePipeline {
    std::function<double(double)> sampler_quantile;  // maps u in (0,1) to a draw
    std::function<CdfFn(std::span<const double>)> build_cdf;

    /// Null with no estimation step: sample from `cdf`'s inverse and test
    /// against `cdf` itself.
    static CriticalValuePipeline fully_specified(std::function<double(double)> quantile,
                                                 CdfFn cdf) {
        CriticalValuePipeline p;
        p.sampler_quantile = std::move(quantile);
        p.build_cdf = [cdf](std::span<const double>) { return cdf; };
        return p;
    }
};

/// Simulates the level-quantile of a statistic's null distribution.
/// Per-trial streams derive from (seed, trial index), so the result is
/// reproducible bit-exactly for a given seed regardless of scheduling.
inline double simulate_critical_values(const CriticalValuePipeline& pipeline, GofKind kind,
                                       std::size_t n_trials, std::size_t t, double level,
                                       std::uint64_t seed) {
    if (n_trials < 100)
        throw InvalidParamsError("critical-value simulation needs at least 100 trials");
    if (!(level > 0.0 && level < 1.0))
        throw InvalidParamsError("level must lie in (0,1)");
    std::vector<double> stats(n_trials);
    std::vector<double> sample(t);
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        RngStream rng(seed, trial);
        for (std::size_t i = 0; i < t; ++i) sample[i] = pipeline.sampler_quantile(rng.next_uniform());
        std::sort(sample.begin(), sample.end());
        const CdfFn cdf = pipeline.build_cdf(sample);
        stats[trial] = gof_statistic(kind, cdf, sample).statistic;
    }
    std::sort(stats.begin(), stats.end());
    const double pos = (1.0 - level) * static_cast<double>(n_trials - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n_trials - 1);
    const double w = pos - static_cast<double>(lo);
    return stats[lo] * (1.0 - w) + stats[hi] * w;
}

}  // namespace garchmom

#endif  // GARCHMOM_GOF_HPP
