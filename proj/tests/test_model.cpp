#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "garchmom/model.hpp"

using namespace garchmom;
using Catch::Approx;

namespace {
const GjrParams kFixture{0.0, 1e-6, 0.04, 0.06, 0.90};
const ForecastOrigin kOrigin{5e-5};
}  // namespace

TEST_CASE("fixture constants") {
    const auto dc = derive_constants(kFixture, Innovation::normal(), kOrigin);
    CHECK(dc.phi == Approx(0.97).epsilon(1e-15));
    CHECK(dc.gamma == Approx(0.9534).epsilon(1e-12));
    CHECK(dc.h_bar == Approx(1e-6 / 0.03).epsilon(1e-12));
    // c9 for a normal innovation is lambda times the third lower partial moment
    CHECK(dc.c9 == Approx(-0.06 * std::sqrt(2.0 / M_PI)).epsilon(1e-14));
    CHECK(dc.c3 == Approx(dc.c1 + dc.c2).epsilon(1e-15));
    CHECK(dc.c5 == Approx(6.0 * 1e-12 * dc.gamma).epsilon(1e-14));
    CHECK(dc.c6 == Approx(4.0 * 1e-6 * dc.c4).epsilon(1e-14));
    CHECK_FALSE(dc.near_unit_gamma);
    CHECK_FALSE(dc.near_unit_c4);
    CHECK_FALSE(dc.phi_eq_gamma);
    CHECK_FALSE(dc.c4_eq_gamma);
    CHECK_FALSE(dc.c4_eq_phi);
}

TEST_CASE("symmetric special case collapses to alpha+beta forms") {
    const GjrParams p{0.0, 1e-6, 0.05, 0.0, 0.90};
    const auto dc = derive_constants(p, Innovation::normal(), kOrigin);
    CHECK(dc.phi == Approx(0.95).epsilon(1e-15));
    CHECK(dc.gamma == Approx(0.95 * 0.95 + 2.0 * 0.05 * 0.05).epsilon(1e-14));  // 0.9075
    CHECK(dc.c9 == 0.0);
    CHECK(dc.c10 == 0.0);
}

TEST_CASE("derive_constants is a pure function") {
    const auto a = derive_constants(kFixture, Innovation::normal(), kOrigin);
    const auto b = derive_constants(kFixture, Innovation::normal(), kOrigin);
    CHECK(std::memcmp(&a.phi, &b.phi, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.c18, &b.c18, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.c7, &b.c7, sizeof(double)) == 0);
}

TEST_CASE("c2 is linear in the gap between h1 and the steady state") {
    const auto dc = derive_constants(kFixture, Innovation::normal(), kOrigin);
    const double gap = kOrigin.h_next - dc.h_bar;
    const ForecastOrigin doubled{dc.h_bar + 2.0 * gap};
    const auto dc2 = derive_constants(kFixture, Innovation::normal(), doubled);
    CHECK(dc2.c2 == Approx(2.0 * dc.c2).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(derive_constants({0, -1e-6, 0.04, 0.06, 0.9}, Innovation::normal(), kOrigin),
                    InvalidParamsError);
    CHECK_THROWS_AS(derive_constants({0, 1e-6, -0.01, 0.06, 0.9}, Innovation::normal(), kOrigin),
                    InvalidParamsError);
    // alpha + lambda * F0 < 0
    CHECK_THROWS_AS(derive_constants({0, 1e-6, 0.01, -0.04, 0.9}, Innovation::normal(), kOrigin),
                    InvalidParamsError);
    // phi >= 1
    CHECK_THROWS_AS(derive_constants({0, 1e-6, 0.08, 0.06, 0.92}, Innovation::normal(), kOrigin),
                    NonStationaryError);
    CHECK_THROWS_AS(derive_constants(kFixture, Innovation::normal(), {0.0}), InvalidParamsError);
}

TEST_CASE("degeneracy flags fire at the centralized tolerance") {
    // gamma = 1 exactly for a normal GARCH(1,1): (alpha+beta)^2 + 2 alpha^2 = 1
    const double beta = 0.9;
    const double alpha = (-beta + std::sqrt(3.0 - 2.0 * beta * beta)) / 3.0;
    const GjrParams p{0.0, 1e-6, alpha, 0.0, beta};
    const auto dc = derive_constants(p, Innovation::normal(), kOrigin);
    CHECK(dc.near_unit_gamma);
    CHECK(std::isnan(dc.c1));

    const double alpha_off = alpha * (1.0 + 1e-6);
    const auto dc_off =
        derive_constants({0.0, 1e-6, alpha_off, 0.0, beta}, Innovation::normal(), kOrigin);
    CHECK_FALSE(dc_off.near_unit_gamma);
}

TEST_CASE("moment tiers degrade with t degrees of freedom") {
    const auto dc7 = derive_constants(kFixture, Innovation::student_t(7.0), kOrigin);
    CHECK(dc7.third_order_available);
    CHECK_FALSE(dc7.fourth_order_available);
    CHECK_THROWS_AS(dc7.require_fourth_order(), UndefinedMomentError);

    const auto dc5 = derive_constants(kFixture, Innovation::student_t(5.0), kOrigin);
    CHECK_FALSE(dc5.third_order_available);

    const auto dc9 = derive_constants(kFixture, Innovation::student_t(9.0), kOrigin);
    CHECK(dc9.fourth_order_available);
}
