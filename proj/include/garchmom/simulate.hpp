#ifndef GARCHMOM_SIMULATE_HPP
#define GARCHMOM_SIMULATE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "garchmom/common.hpp"
#include "garchmom/innovation.hpp"
#include "garchmom/model.hpp"
#include "garchmom/rng.hpp"

namespace garchmom {

/// Monte Carlo configuration. Path i always draws from the stream derived
/// from (seed, i), so results are independent of threading and of how paths
/// are batched, and pooling two runs with path ranges [0,n) and [n,2n)
/// reproduces one run of 2n paths exactly.
struct SimulationSpec {
    GjrParams params;
    Innovation innovation = Innovation::normal();
    ForecastOrigin origin;
    std::size_t horizon = 1;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::size_t first_path = 0;  // offset into the path-index space
};

/// Materialized simulation output, one row per horizon, one column per path.
struct SimulationOutput {
    std::size_t horizon = 0;
    std::size_t n_paths = 0;
    // [s-1][path]: return/variance at t+s, and the running sums up to t+s
    std::vector<std::vector<double>> forward_returns;
    std::vector<std::vector<double>> aggregated_returns;
    std::vector<std::vector<double>> forward_variances;
    std::vector<std::vector<double>> aggregated_variances;
};

/// Streaming sample-moment accumulator: central power sums about a fixed,
/// caller-chosen shift (a nearby constant kills the cancellation that raw
/// power sums would suffer at daily-variance scale). Deterministic merges.
class MomentAccumulator {
public:
    explicit MomentAccumulator(double shift = 0.0) : shift_(shift) {}

    void add(double x) {
        const double d = x - shift_;
        const double d2 = d * d;
        ++count_;
        p_[0].add(d);
        p_[1].add(d2);
        p_[2].add(d2 * d);
        p_[3].add(d2 * d2);
        p_[4].add(d2 * d2 * d);
        p_[5].add(d2 * d2 * d2);
        p_[6].add(d2 * d2 * d2 * d);
        p_[7].add(d2 * d2 * d2 * d2);
    }

    void merge(const MomentAccumulator& other) {
        count_ += other.count_;
        for (int k = 0; k < 8; ++k) p_[k].merge(other.p_[k]);
    }

    std::size_t count() const { return count_; }
    double shift() const { return shift_; }
    /// E[(x - shift)^k] for k = 1..8.
    double shifted_moment(int k) const {
        return p_[k - 1].value() / static_cast<double>(count_);
    }

private:
    double shift_;
    std::size_t count_ = 0;
    KahanSum p_[8];
};

/// Empirical moments plus standard errors. The skewness/kurtosis errors come
/// in two flavours: the large-sample normal-theory values sqrt(6/T) and
/// sqrt(24/T), and moment-based (delta-method) estimates that stay honest
/// for skewed, heavy-tailed samples; the latter are what oracle-equivalence
/// tolerances should use.
struct EmpiricalMoments {
    MomentSet moments;
    std::size_t count = 0;
    double se_mean = 0.0;
    double se_variance = 0.0;
    double se_skewness = 0.0;
    double se_kurtosis = 0.0;
    double se_skewness_normal = 0.0;
    double se_kurtosis_normal = 0.0;
};

/// Finalizes an accumulator into moments and standard errors.
inline EmpiricalMoments empirical_moments(const MomentAccumulator& acc) {
    if (acc.count() < 4)
        throw TooFewObservationsError("need at least 4 observations for four moments");
    const double n = static_cast<double>(acc.count());
    const double a1 = acc.shifted_moment(1);
    // central moments about the sample mean from the shifted power sums
    double c[9];
    c[0] = 1.0;
    c[1] = 0.0;
    double apow[9];
    apow[0] = 1.0;
    for (int k = 1; k <= 8; ++k) apow[k] = apow[k - 1] * (-a1);
    for (int k = 2; k <= 8; ++k) {
        double binom = 1.0;
        double sum = 0.0;
        for (int j = 0; j <= k; ++j) {
            const double mj = j == 0 ? 1.0 : acc.shifted_moment(j);
            sum += binom * mj * apow[k - j];
            binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
        c[k] = sum;
    }

    EmpiricalMoments out;
    out.count = acc.count();
    out.moments.mean = acc.shift() + a1;
    const double m2 = c[2];
    if (!(m2 > 0.0))
        throw DegenerateSampleError("sample variance is zero; standardized moments undefined");
    out.moments.variance = m2 * n / (n - 1.0);
    out.moments.skewness = c[3] / (m2 * std::sqrt(m2));
    out.moments.kurtosis = c[4] / (m2 * m2);

    out.se_mean = std::sqrt(m2 / n);
    out.se_variance = std::sqrt(std::max(0.0, c[4] - m2 * m2) / n);
    out.se_skewness_normal = std::sqrt(6.0 / n);
    out.se_kurtosis_normal = std::sqrt(24.0 / n);

    // delta method on (m2_hat, m3_hat) and (m2_hat, m4_hat)
    const double var_m2 = c[4] - m2 * m2;
    const double var_m3 = c[6] - c[3] * c[3] - 6.0 * c[4] * m2 + 9.0 * m2 * m2 * m2;
    const double cov_23 = c[5] - 4.0 * m2 * c[3];
    const double var_m4 = c[8] - c[4] * c[4] + 16.0 * c[3] * c[3] * m2 - 8.0 * c[3] * c[5];
    const double cov_24 = c[6] - m2 * c[4] - 4.0 * c[3] * c[3];
    {
        const double d3 = 1.0 / (m2 * std::sqrt(m2));
        const double d2 = -1.5 * c[3] / (m2 * m2 * std::sqrt(m2));
        const double v = d3 * d3 * var_m3 + d2 * d2 * var_m2 + 2.0 * d2 * d3 * cov_23;
        out.se_skewness = std::sqrt(std::max(0.0, v) / n);
    }
    {
        const double d4 = 1.0 / (m2 * m2);
        const double d2 = -2.0 * c[4] / (m2 * m2 * m2);
        const double v = d4 * d4 * var_m4 + d2 * d2 * var_m2 + 2.0 * d2 * d4 * cov_24;
        out.se_kurtosis = std::sqrt(std::max(0.0, v) / n);
    }
    return out;
}

/// Empirical moments of a plain sample (zero variance yields
/// DegenerateSampleError, fewer than 4 points TooFewObservationsError).
inline EmpiricalMoments empirical_moments(std::span<const double> sample) {
    if (sample.size() < 4)
        throw TooFewObservationsError("need at least 4 observations for four moments");
    // two-pass: mean first, then centered powers
    KahanSum mean_acc;
    for (double x : sample) mean_acc.add(x);
    MomentAccumulator acc(mean_acc.value() / static_cast<double>(sample.size()));
    for (double x : sample) acc.add(x);
    return empirical_moments(acc);
}

namespace detail {

/// Runs fn(path) over the half-open path range, chunked for the thread pool.
/// The chunk grid is fixed (independent of thread count) and chunk results
/// are merged in chunk order, so any observable reduction is bit-stable.
template <typename PerPath>
void for_each_path(std::size_t first, std::size_t count, PerPath&& per_path) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (hw <= 1 || count < 1024) {
        for (std::size_t p = 0; p < count; ++p) per_path(first + p);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(hw);
    std::atomic<std::size_t> cursor{0};
    const std::size_t chunk = std::max<std::size_t>(1024, count / 256);
    for (std::size_t w = 0; w < hw; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t start = cursor.fetch_add(chunk);
                if (start >= count) return;
                const std::size_t end = std::min(count, start + chunk);
                for (std::size_t p = start; p < end; ++p) per_path(first + p);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Simulates every path and materializes all four families. Memory is
/// 4 * horizon * n_paths doubles; use StreamingMoments for oracle-sized runs.
inline SimulationOutput simulate(const SimulationSpec& spec) {
    if (spec.horizon < 1 || spec.n_paths < 1)
        throw InvalidParamsError("simulation needs horizon >= 1 and n_paths >= 1");
    if (!(spec.origin.h_next > 0.0)) throw InvalidParamsError("h_next must be positive");

    SimulationOutput out;
    out.horizon = spec.horizon;
    out.n_paths = spec.n_paths;
    auto alloc = [&](std::vector<std::vector<double>>& family) {
        family.assign(spec.horizon, std::vector<double>(spec.n_paths));
    };
    alloc(out.forward_returns);
    alloc(out.aggregated_returns);
    alloc(out.forward_variances);
    alloc(out.aggregated_variances);

    const GjrParams p = spec.params;
    const Innovation inn = spec.innovation;
    detail::for_each_path(spec.first_path, spec.n_paths, [&](std::size_t path) {
        RngStream rng(spec.seed, path);
        const std::size_t col = path - spec.first_path;
        double h = spec.origin.h_next;
        double ret_sum = 0.0;
        double var_sum = 0.0;
        for (std::size_t s = 1; s <= spec.horizon; ++s) {
            const double z = inn.sample(rng);
            const double eps = z * std::sqrt(h);
            const double r = p.mu + eps;
            ret_sum += r;
            var_sum += h;
            out.forward_returns[s - 1][col] = r;
            out.aggregated_returns[s - 1][col] = ret_sum;
            out.forward_variances[s - 1][col] = h;
            out.aggregated_variances[s - 1][col] = var_sum;
            h = p.omega + (p.alpha + (eps < 0.0 ? p.lambda : 0.0)) * eps * eps + p.beta * h;
        }
    });
    return out;
}

/// Streaming per-horizon moment accumulators for all four families; memory
/// O(horizon), any number of paths. Shifts: returns are centered at mu
/// (resp. s*mu), variances at the analytic forward mean when available.
class StreamingMoments {
public:
    StreamingMoments(const SimulationSpec& spec, std::span<const double> variance_shifts)
        : spec_(spec) {
        fwd_ret_.reserve(spec.horizon);
        agg_ret_.reserve(spec.horizon);
        fwd_var_.reserve(spec.horizon);
        agg_var_.reserve(spec.horizon);
        double shift_sum = 0.0;
        for (std::size_t s = 1; s <= spec.horizon; ++s) {
            const double vshift =
                s <= variance_shifts.size() ? variance_shifts[s - 1] : spec.origin.h_next;
            shift_sum += vshift;
            fwd_ret_.emplace_back(spec.params.mu);
            agg_ret_.emplace_back(spec.params.mu * static_cast<double>(s));
            fwd_var_.emplace_back(vshift);
            agg_var_.emplace_back(shift_sum);
        }
    }

    /// Runs the whole simulation. Paths are processed in fixed-size chunks,
    /// each chunk accumulating privately; chunk accumulators merge in chunk
    /// order so the result does not depend on the thread count.
    /// n_threads = 0 picks the hardware concurrency.
    void run(std::size_t n_threads = 0) {
        const std::size_t chunk = 1u << 16;
        const std::size_t n_chunks = (spec_.n_paths + chunk - 1) / chunk;
        struct ChunkAcc {
            std::vector<MomentAccumulator> fr, ar, fv, av;
        };
        std::vector<ChunkAcc> partial(n_chunks);
        const std::size_t hw =
            n_threads > 0 ? n_threads
                          : std::max<std::size_t>(1, std::thread::hardware_concurrency());
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(hw);
        for (std::size_t w = 0; w < hw; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t ci = cursor.fetch_add(1);
                    if (ci >= n_chunks) return;
                    ChunkAcc& acc = partial[ci];
                    acc.fr = fresh(fwd_ret_);
                    acc.ar = fresh(agg_ret_);
                    acc.fv = fresh(fwd_var_);
                    acc.av = fresh(agg_var_);
                    const std::size_t begin = ci * chunk;
                    const std::size_t end = std::min(spec_.n_paths, begin + chunk);
                    run_paths(begin, end, acc.fr, acc.ar, acc.fv, acc.av);
                }
            });
        }
        for (auto& t : pool) t.join();
        for (std::size_t ci = 0; ci < n_chunks; ++ci) {
            for (std::size_t s = 0; s < spec_.horizon; ++s) {
                fwd_ret_[s].merge(partial[ci].fr[s]);
                agg_ret_[s].merge(partial[ci].ar[s]);
                fwd_var_[s].merge(partial[ci].fv[s]);
                agg_var_[s].merge(partial[ci].av[s]);
            }
        }
    }

    EmpiricalMoments forward_returns(std::size_t s) const {
        return empirical_moments(fwd_ret_[s - 1]);
    }
    EmpiricalMoments aggregated_returns(std::size_t n) const {
        return empirical_moments(agg_ret_[n - 1]);
    }
    EmpiricalMoments forward_variances(std::size_t s) const {
        return empirical_moments(fwd_var_[s - 1]);
    }
    EmpiricalMoments aggregated_variances(std::size_t n) const {
        return empirical_moments(agg_var_[n - 1]);
    }

private:
    static std::vector<MomentAccumulator> fresh(const std::vector<MomentAccumulator>& proto) {
        std::vector<MomentAccumulator> v;
        v.reserve(proto.size());
        for (const auto& a : proto) v.emplace_back(a.shift());
        return v;
    }

    void run_paths(std::size_t begin, std::size_t end, std::vector<MomentAccumulator>& fr,
                   std::vector<MomentAccumulator>& ar, std::vector<MomentAccumulator>& fv,
                   std::vector<MomentAccumulator>& av) const {
        const GjrParams p = spec_.params;
        for (std::size_t path = begin; path < end; ++path) {
            RngStream rng(spec_.seed, spec_.first_path + path);
            double h = spec_.origin.h_next;
            double ret_sum = 0.0;
            double var_sum = 0.0;
            for (std::size_t s = 1; s <= spec_.horizon; ++s) {
                const double z = spec_.innovation.sample(rng);
                const double eps = z * std::sqrt(h);
                const double r = p.mu + eps;
                ret_sum += r;
                var_sum += h;
                fr[s - 1].add(r);
                ar[s - 1].add(ret_sum);
                fv[s - 1].add(h);
                av[s - 1].add(var_sum);
                h = p.omega + (p.alpha + (eps < 0.0 ? p.lambda : 0.0)) * eps * eps + p.beta * h;
            }
        }
    }

    SimulationSpec spec_;
    std::vector<MomentAccumulator> fwd_ret_, agg_ret_, fwd_var_, agg_var_;
};

/// Raw-sample dump: comma-separated, one row per path, header naming the
/// horizons of the chosen family.
inline void write_sample_csv(std::ostream& os, const std::vector<std::vector<double>>& family,
                             const char* prefix) {
    const std::size_t horizon = family.size();
    for (std::size_t s = 1; s <= horizon; ++s) os << (s > 1 ? "," : "") << prefix << s;
    os << "\n";
    if (horizon == 0) return;
    const std::size_t n = family[0].size();
    char buf[32];
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t s = 0; s < horizon; ++s) {
            std::snprintf(buf, sizeof(buf), "%.12g", family[s][p]);
            os << (s > 0 ? "," : "") << buf;
        }
        os << "\n";
    }
}

}  // namespace garchmom

#endif  // GARCHMOM_SIMULATE_HPP
