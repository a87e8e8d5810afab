#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "garchmom/moments_aggregated.hpp"
#include "garchmom/simulate.hpp"

using namespace garchmom;
using Catch::Approx;

namespace {

const GjrParams kFixture{0.0, 1e-6, 0.04, 0.06, 0.90};
const ForecastOrigin kOrigin{5e-5};

DerivedConstants fixture_dc() {
    return derive_constants(kFixture, Innovation::normal(), kOrigin);
}

}  // namespace

TEST_CASE("eps cross moments: exact values and symmetric collapse") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 16);

    // s = 1 makes E[h^{3/2}] exact, so eps_eps2(1,1) is pure arithmetic
    const double expected = -0.06 * std::sqrt(2.0 / M_PI) * std::pow(5e-5, 1.5);
    CHECK(ctx.eps_eps2(1, 1) == Approx(expected).epsilon(1e-12));
    CHECK(ctx.eps_eps2(1, 1) == Approx(-1.6926e-8).epsilon(1e-4));

    // symmetric GARCH(1,1): c9 = 0 kills every shock cross moment
    const auto dc_sym =
        derive_constants({0.0, 1e-6, 0.05, 0.0, 0.90}, Innovation::normal(), kOrigin);
    const CrossMomentTables sym(dc_sym, 16);
    for (std::size_t s = 1; s <= 8; ++s)
        for (std::size_t u = 1; s + u <= 16; ++u) {
            CHECK(sym.eps_eps2(s, u) == 0.0);
            CHECK(sym.eps_eps3(s, u) == 0.0);
        }
}

TEST_CASE("pair moment v22 matches an independently coded recursion") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 16);
    const MomentTable& t = ctx.table();
    // mu(2,2) at lag u from the direct recursion over the closing index
    auto v22_oracle = [&](std::size_t s, std::size_t u) {
        std::vector<double> v21(u + 1), v22(u + 1);
        v21[0] = t.m3(s);
        v22[0] = t.m4(s);
        const double w = dc.params.omega;
        for (std::size_t k = 1; k <= u; ++k) {
            v21[k] = w * t.m2(s) + dc.phi * v21[k - 1];
            v22[k] = w * w * t.m2(s) + 2.0 * w * dc.phi * v21[k - 1] + dc.gamma * v22[k - 1];
        }
        return v22[u];
    };
    for (std::size_t s = 1; s <= 8; ++s)
        for (std::size_t u = 1; u <= 8; ++u)
            CHECK(ctx.v22(s, u) == Approx(v22_oracle(s, u)).epsilon(1e-12));
    CHECK(ctx.v22(2, 2) == Approx(v22_oracle(2, 2)).epsilon(1e-12));
}

TEST_CASE("v12 and v13 match their direct recursions") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 12);
    const MomentTable& t = ctx.table();
    const double w = dc.params.omega;
    for (std::size_t s = 1; s <= 6; ++s) {
        std::vector<double> v11(13), v12(13), v13(13);
        v11[0] = t.m2(s);
        v12[0] = t.m3(s);
        v13[0] = t.m4(s);
        for (std::size_t k = 1; k <= 12; ++k) {
            v11[k] = w * t.m1(s) + dc.phi * v11[k - 1];
            v12[k] = w * w * t.m1(s) + 2.0 * w * dc.phi * v11[k - 1] + dc.gamma * v12[k - 1];
            v13[k] = w * w * w * t.m1(s) +
                     3.0 * w * (w * dc.phi * v11[k - 1] + dc.gamma * v12[k - 1]) +
                     dc.c4 * v13[k - 1];
        }
        for (std::size_t u = 1; u <= 12; ++u) {
            CHECK(ctx.v11(s, u) == Approx(v11[u]).epsilon(1e-12));
            CHECK(ctx.v12(s, u) == Approx(v12[u]).epsilon(1e-12));
            CHECK(ctx.v13(s, u) == Approx(v13[u]).epsilon(1e-12));
        }
    }
}

TEST_CASE("triple moment in affine-coefficient form (independent route)") {
    // re-derives t111 through the explicit conditional-pair coefficients
    // (A, B, C) in powers of the intermediate variance, with divided
    // differences, valid when phi != gamma
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 16);
    const MomentTable& t = ctx.table();
    const double w = dc.params.omega, p = dc.phi, g = dc.gamma, hb = dc.h_bar;
    auto t111_affine = [&](std::size_t s, std::size_t u, std::size_t v) {
        const double pv = std::pow(p, double(v)), pu1 = std::pow(p, double(u - 1));
        const double gu1 = std::pow(g, double(u - 1));
        const double a = pv * gu1;
        const double b = hb * pu1 * (1.0 - pv) + 2.0 * w * std::pow(p, double(v + 1)) /
                                                      (p - g) * (pu1 - gu1);
        const double c =
            hb * hb * (1.0 - pu1) +
            pv * (dc.c1 + (2.0 * w * p * hb / (p - g) - dc.c1) * gu1 -
                  2.0 * w * std::pow(p, double(u)) * hb / (p - g) - hb * hb * (1.0 - pu1));
        const double e_h_hsq = w * w * t.m1(s) + 2.0 * w * p * t.m2(s) + g * t.m3(s);
        const double e_h_h = w * t.m1(s) + p * t.m2(s);
        return a * e_h_hsq + b * e_h_h + c * t.m1(s);
    };
    for (auto [s, u, v] : {std::array<std::size_t, 3>{1, 1, 1},
                           std::array<std::size_t, 3>{2, 3, 4},
                           std::array<std::size_t, 3>{5, 2, 1},
                           std::array<std::size_t, 3>{3, 1, 6}})
        CHECK(ctx.t111(s, u, v) == Approx(t111_affine(s, u, v)).epsilon(1e-11));
}

TEST_CASE("pair moment approaches independence as the lag grows") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 1200);
    const double far = ctx.v11(3, 1100);
    CHECK(far == Approx(dc.h_bar * ctx.table().m1(3)).epsilon(1e-12));
}

TEST_CASE("aggregated return variance equals the sum of forward variances") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 128, 2);
    for (std::size_t n : {1u, 2u, 5u, 17u, 128u}) {
        KahanSum sum;
        for (std::size_t s = 1; s <= n; ++s) sum.add(ctx.table().m1(s));
        const double closed = aggregated_return_variance(dc, n);
        CHECK(closed == Approx(sum.value()).epsilon(1e-14));
    }
}

TEST_CASE("aggregated moments at n = 1 coincide with forward moments at s = 1") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 4);
    const MomentSet agg = aggregated_return_moments(ctx, 1);
    const MomentSet fwd = forward_return_moments(ctx.table(), 1);
    CHECK(agg.mean == fwd.mean);
    CHECK(agg.variance == Approx(fwd.variance).epsilon(1e-15));
    CHECK(agg.skewness == Approx(fwd.skewness).margin(1e-15));
    CHECK(agg.kurtosis == Approx(fwd.kurtosis).epsilon(1e-14));

    double mean = 0.0, variance = 1.0;
    aggregated_variance_mean_variance(ctx, 1, mean, variance);
    CHECK(mean == dc.h_next);
    CHECK(variance == 0.0);
    CHECK_THROWS_AS(aggregated_variance_moments(ctx, 1), DegenerateDistributionError);
}

TEST_CASE("normal GARCH(1,1) aggregated skewness vanishes identically") {
    const auto dc =
        derive_constants({0.0, 1e-6, 0.05, 0.0, 0.90}, Innovation::normal(), kOrigin);
    const CrossMomentTables ctx(dc, 100);
    for (std::size_t n = 1; n <= 100; ++n)
        CHECK(aggregated_return_moments(ctx, n).skewness == 0.0);
}

TEST_CASE("frozen aggregated values from the validated recursion oracle") {
    // frozen against the independent step-by-step recursions and a
    // 4-million-path simulation run during development
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 6);
    const MomentSet h = aggregated_variance_moments(ctx, 6);
    CHECK(h.mean == Approx(2.92793330595e-4).epsilon(1e-10));
    CHECK(h.variance == Approx(1.5561562091102804e-9).epsilon(1e-10));
    CHECK(h.skewness == Approx(2.438781641478547).epsilon(1e-10));
    CHECK(h.kurtosis == Approx(13.787982074615789).epsilon(1e-9));
    const MomentSet r = aggregated_return_moments(ctx, 6);
    CHECK(r.variance == Approx(2.92793330595e-4).epsilon(1e-10));
    CHECK(r.skewness == Approx(-0.14408565383219732).epsilon(1e-10));
    CHECK(r.kurtosis == Approx(3.4291825879598505).epsilon(1e-10));
}

TEST_CASE("three routes to the aggregated variance second moment agree") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 16);
    for (std::size_t n : {2u, 5u, 10u, 16u}) {
        double mean = 0.0, variance = 0.0;
        aggregated_variance_mean_variance(ctx, n, mean, variance);
        CHECK(aggregated_variance_m2_pairwise(ctx, n) == Approx(variance).epsilon(1e-10));
        CHECK(aggregated_variance_m2_closed_form(dc, n) == Approx(variance).epsilon(1e-10));
    }
}

TEST_CASE("variance of the aggregate exceeds the sum of variances at long horizons") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 500, 2);
    double mean = 0.0, agg_var = 0.0;
    aggregated_variance_mean_variance(ctx, 500, mean, agg_var);
    const MomentTable& t = ctx.table();
    const double fwd_var = t.m2(500) - t.m1(500) * t.m1(500);
    CHECK(agg_var / 500.0 > fwd_var);
}

TEST_CASE("fourth-moment sums are invariant to loop restructuring") {
    // recompute the triple/quadruple contributions with the loop nest run in
    // a different order and compare
    const auto dc = fixture_dc();
    const std::size_t n = 9;
    const CrossMomentTables ctx(dc, n);
    const MomentTable& t = ctx.table();

    KahanSum d_forward, e_forward;
    for (std::size_t s = 1; s <= n; ++s)
        for (std::size_t u = 1; s + u <= n; ++u)
            for (std::size_t v = 1; s + u + v <= n; ++v) {
                const double a = t.m1(s), b = t.m1(s + u), c = t.m1(s + u + v);
                const double trip = ctx.t111(s, u, v);
                d_forward.add(ctx.t211(s, u, v) - 2.0 * a * trip - b * ctx.v21(s, u + v) -
                              c * ctx.v21(s, u) + a * a * ctx.v11(s + u, v) +
                              2.0 * a * b * ctx.v11(s, u + v) + 2.0 * a * c * ctx.v11(s, u) +
                              b * c * t.m2(s) - 3.0 * a * a * b * c);
                for (std::size_t w = 1; s + u + v + w <= n; ++w)
                    e_forward.add(ctx.q1111(s, u, v, w));
            }
    KahanSum d_reversed, e_reversed;
    for (std::size_t v = n; v >= 1; --v)
        for (std::size_t u = n; u >= 1; --u)
            for (std::size_t s = n; s >= 1; --s) {
                if (s + u + v > n) continue;
                const double a = t.m1(s), b = t.m1(s + u), c = t.m1(s + u + v);
                const double trip = ctx.t111(s, u, v);
                d_reversed.add(ctx.t211(s, u, v) - 2.0 * a * trip - b * ctx.v21(s, u + v) -
                               c * ctx.v21(s, u) + a * a * ctx.v11(s + u, v) +
                               2.0 * a * b * ctx.v11(s, u + v) + 2.0 * a * c * ctx.v11(s, u) +
                               b * c * t.m2(s) - 3.0 * a * a * b * c);
                for (std::size_t w = 1; s + u + v + w <= n; ++w)
                    e_reversed.add(ctx.q1111(s, u, v, w));
            }
    CHECK(d_forward.value() == Approx(d_reversed.value()).epsilon(1e-12));
    CHECK(e_forward.value() == Approx(e_reversed.value()).epsilon(1e-12));
}

TEST_CASE("aggregated moments agree with the simulation oracle") {
    const auto dc = fixture_dc();
    const std::size_t n = 5;
    const CrossMomentTables ctx(dc, n);
    SimulationSpec spec;
    spec.params = kFixture;
    spec.origin = kOrigin;
    spec.horizon = n;
    spec.n_paths = 2000000;
    spec.seed = 404;
    std::vector<double> shifts;
    for (std::size_t s = 1; s <= n; ++s) shifts.push_back(ctx.table().m1(s));
    StreamingMoments sm(spec, shifts);
    sm.run();

    const MomentSet r = aggregated_return_moments(ctx, n);
    const EmpiricalMoments mc_r = sm.aggregated_returns(n);
    CHECK(r.skewness < 0.0);
    CHECK(std::fabs(r.skewness - mc_r.moments.skewness) < 3.0 * mc_r.se_skewness);
    CHECK(std::fabs(r.kurtosis - mc_r.moments.kurtosis) < 3.0 * mc_r.se_kurtosis);

    const MomentSet h = aggregated_variance_moments(ctx, n);
    const EmpiricalMoments mc_h = sm.aggregated_variances(n);
    CHECK(std::fabs(h.skewness - mc_h.moments.skewness) < 3.0 * mc_h.se_skewness);
    CHECK(std::fabs(h.kurtosis - mc_h.moments.kurtosis) < 3.0 * mc_h.se_kurtosis);
    CHECK(std::fabs(h.variance - mc_h.moments.variance) < 3.0 * mc_h.se_variance);

    // eps2_eps2 and v-moment spot checks against the same paths
    const SimulationOutput out = simulate(spec);
    KahanSum e22, vh;
    for (std::size_t path = 0; path < out.n_paths; ++path) {
        const double eps3 = out.forward_returns[2][path];  // mu = 0
        const double eps4 = out.forward_returns[3][path];
        e22.add(eps3 * eps3 * eps4 * eps4);
        vh.add(out.forward_variances[1][path] * out.forward_variances[4][path]);
    }
    const double inv_n = 1.0 / static_cast<double>(out.n_paths);
    CHECK(ctx.eps2_eps2(3, 1) == Approx(e22.value() * inv_n).epsilon(2e-2));
    CHECK(ctx.v11(2, 3) == Approx(vh.value() * inv_n).epsilon(5e-3));
}

TEST_CASE("complexity caps are enforced and overridable") {
    const auto dc = fixture_dc();
    const CrossMomentTables ctx(dc, 210);
    AggregationCaps caps;
    caps.max_n_variance_tail = 8;
    CHECK_THROWS_AS(aggregated_variance_moments(ctx, 9, caps), ComplexityBudgetError);
    caps.max_n_variance_tail = 16;
    CHECK_NOTHROW(aggregated_variance_moments(ctx, 9, caps));
    AggregationCaps rcaps;
    rcaps.max_n_returns = 4;
    CHECK_THROWS_AS(aggregated_return_moments(ctx, 5, rcaps), ComplexityBudgetError);
}
