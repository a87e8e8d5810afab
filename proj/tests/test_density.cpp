#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "garchmom/density.hpp"

using namespace garchmom;
using Catch::Approx;

TEST_CASE("edgeworth with normal targets is the standard normal") {
    const EdgeworthApprox e(0.0, 0.0, 0.0, 1.0);
    CHECK(e.pdf(0.0) == Approx(0.3989422804014327).epsilon(1e-15));
    for (double x = -5.0; x <= 5.0; x += 0.01) {
        CHECK(e.pdf(x) == Approx(detail::std_normal_pdf(x)).margin(1e-16));
        CHECK(e.cdf(x) == Approx(detail::std_normal_cdf(x)).margin(1e-16));
    }
    CHECK(e.cdf_monotone());
}

TEST_CASE("edgeworth density value from the Gaussian-derivative coefficients") {
    // at zero the odd Hermite terms vanish, He4(0) = 3, He6(0) = -15
    const double tau = 0.5;
    const EdgeworthApprox e(tau, 0.0, 0.0, 1.0);
    const double expected = detail::std_normal_pdf(0.0) * (1.0 - 15.0 * tau * tau / 72.0);
    CHECK(e.pdf(0.0) == Approx(expected).epsilon(1e-15));
}

TEST_CASE("edgeworth cdf normalizes and matches the integrated pdf") {
    const EdgeworthApprox e(0.4, 1.2, 0.001, 0.02);
    CHECK(e.cdf(-10.0) == Approx(0.0).margin(1e-8));
    CHECK(e.cdf(10.0) == Approx(1.0).margin(1e-8));
    // trapezoid over the pdf reproduces cdf differences
    double acc = 0.0;
    const double lo = 0.001 - 8.0 * 0.02, hi = 0.001 + 8.0 * 0.02, step = 1e-5;
    double prev = e.pdf(lo);
    for (double x = lo + step; x <= hi; x += step) {
        const double cur = e.pdf(x);
        acc += 0.5 * (prev + cur) * step;
        prev = cur;
    }
    CHECK(acc == Approx(e.cdf(hi) - e.cdf(lo)).margin(1e-8));
}

TEST_CASE("edgeworth monotonicity flag agrees with a density sign scan") {
    const EdgeworthApprox good(0.1, 0.5, 0.0, 1.0);
    const EdgeworthApprox bad(1.4, 0.2, 0.0, 1.0);
    auto scan = [](const EdgeworthApprox& e) {
        for (double z = -8.0; z <= 8.0; z += 1e-3)
            if (e.standardized_pdf(z) < 0.0) return false;
        return true;
    };
    CHECK(good.cdf_monotone() == scan(good));
    CHECK(bad.cdf_monotone() == scan(bad));
    CHECK_FALSE(bad.cdf_monotone());
}

TEST_CASE("johnson su roundtrip on the documented targets") {
    {
        const auto p = johnson_su_fit({0.0, 1.0, 0.0, 4.0});
        CHECK(p.gamma == 0.0);
        CHECK(p.xi == 0.0);
        const MomentSet m = johnson_su_moments(p);
        CHECK(m.mean == Approx(0.0).margin(1e-8));
        CHECK(m.variance == Approx(1.0).epsilon(1e-8));
        CHECK(m.skewness == Approx(0.0).margin(1e-8));
        CHECK(m.kurtosis == Approx(4.0).epsilon(1e-8));
    }
    {
        // just above the normal boundary: a near-normal fit with large delta
        const auto p = johnson_su_fit({0.0, 1.0, 0.0, 3.0001});
        CHECK(p.delta > 50.0);
        CHECK(johnson_su_moments(p).kurtosis == Approx(3.0001).epsilon(1e-8));
    }
    CHECK_THROWS_AS(johnson_su_fit({0.0, 1.0, 2.0, 4.0}), InfeasibleMomentsError);
    try {
        johnson_su_fit({0.0, 1.0, 2.0, 4.0});
    } catch (const InfeasibleMomentsError& e) {
        CHECK(e.boundary() > 4.0);  // minimal feasible kurtosis for skew 2
        CHECK(e.kurtosis() == 4.0);
    }
    CHECK_THROWS_AS(johnson_su_fit({0.0, 1.0, 0.0, 2.5}), InfeasibleMomentsError);
}

TEST_CASE("johnson su fit-moments-refit reproduces parameters") {
    const JohnsonSuParams start{-0.8, 1.9, 0.003, 0.05};
    const MomentSet m = johnson_su_moments(start);
    const JohnsonSuParams fitted = johnson_su_fit(m);
    CHECK(fitted.gamma == Approx(start.gamma).epsilon(1e-6));
    CHECK(fitted.delta == Approx(start.delta).epsilon(1e-6));
    CHECK(fitted.xi == Approx(start.xi).epsilon(1e-6));
    CHECK(fitted.lambda == Approx(start.lambda).epsilon(1e-6));
}

TEST_CASE("johnson su roundtrip over a grid of feasible targets") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> uskew(-2.5, 2.5), ubump(0.05, 6.0);
    std::size_t tested = 0;
    while (tested < 200) {
        const double skew = uskew(gen);
        // boundary kurtosis for this skewness, then go safely above it
        const double b1 = skew * skew;
        const double t = std::cbrt(0.5 * (2.0 + b1 + std::sqrt(b1 * (4.0 + b1))));
        const double w0 = t + 1.0 / t - 1.0;
        const double bound = w0 * w0 * (w0 * (w0 + 2.0) + 3.0) - 3.0;
        const MomentSet target{0.01, 2.5, skew, bound + ubump(gen)};
        const JohnsonSuParams p = johnson_su_fit(target);
        const MomentSet got = johnson_su_moments(p);
        CHECK(got.mean == Approx(target.mean).margin(1e-8));
        CHECK(got.variance == Approx(target.variance).epsilon(1e-8));
        CHECK(got.skewness == Approx(target.skewness).margin(1e-7).epsilon(1e-7));
        CHECK(got.kurtosis == Approx(target.kurtosis).epsilon(1e-8));
        ++tested;
    }
}

TEST_CASE("johnson su cdf/quantile are exact inverses") {
    const JohnsonSuParams p = johnson_su_fit({0.002, 4e-4, -0.35, 4.1});
    CHECK(johnson_su_cdf(p, p.xi) == Approx(detail::std_normal_cdf(p.gamma)).epsilon(1e-14));
    for (double q : {0.001, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999})
        CHECK(johnson_su_cdf(p, johnson_su_quantile(p, q)) == Approx(q).margin(1e-12));
    // symmetric fit: the median is xi
    const JohnsonSuParams sym = johnson_su_fit({0.25, 1.0, 0.0, 4.0});
    CHECK(sym.gamma == 0.0);
    CHECK(johnson_su_quantile(sym, 0.5) == Approx(sym.xi).margin(1e-12));
    // strict monotonicity of the cdf on a sweep
    double prev = -1.0;
    for (double x = -0.2; x <= 0.2; x += 1e-3) {
        const double c = johnson_su_cdf(p, x);
        CHECK(c > prev);
        prev = c;
    }
    CHECK_THROWS_AS(johnson_su_quantile(p, 0.0), InvalidParamsError);
}

TEST_CASE("auto approximation prefers SU and falls back at the boundary") {
    const DistApprox su = approximate_distribution({0.0, 1.0, 0.1, 4.0});
    CHECK(su.is_johnson_su());
    CHECK_FALSE(su.fell_back());
    // exactly zero excess kurtosis: SU infeasible, Edgeworth equals the normal
    const DistApprox fb = approximate_distribution({0.0, 1.0, 0.0, 3.0});
    CHECK_FALSE(fb.is_johnson_su());
    CHECK(fb.fell_back());
    CHECK(fb.cdf(0.0) == Approx(0.5).margin(1e-15));
    CHECK_THROWS_AS(approximate_distribution({0.0, 1.0, 0.0, 2.8},
                                             DistApprox::Method::JohnsonSu),
                    InfeasibleMomentsError);
}
