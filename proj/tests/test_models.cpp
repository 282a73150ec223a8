#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lvexp/models.hpp"

using namespace lvexp;

static MarketParams good_params() { return {100.0, 100.0, 0.03, 0.5, 0.25, 0.15, 0.1}; }

TEST_CASE("validate_params accepts a valid configuration") {
    auto ctx = validate_params(good_params(), ExponentialVol{0.1});
    CHECK(ctx.derived.x0 == doctest::Approx(std::log(100.0)).epsilon(1e-15));
    CHECK(ctx.derived.mu == doctest::Approx(0.03 - 0.5 * 0.25 * 0.25).epsilon(1e-15));
    CHECK(!ctx.jumps.has_value());
}

TEST_CASE("validate_params rejects out-of-domain inputs") {
    auto p = good_params();
    SUBCASE("s0") {
        p.s0 = 0.0;
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}), DomainError);
    }
    SUBCASE("strike") {
        p.strike = -1.0;
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}), DomainError);
    }
    SUBCASE("maturity") {
        p.maturity = 0.0;
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}), DomainError);
    }
    SUBCASE("sigma0") {
        p.sigma0 = 0.0;
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}), DomainError);
    }
    SUBCASE("eps") {
        p.eps = -0.1;
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}), DomainError);
    }
    SUBCASE("alpha") {
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.0}), DomainError);
    }
    SUBCASE("coeffs") {
        CHECK_THROWS_AS(validate_params(p, PolynomialVol{{}}), DomainError);
    }
    SUBCASE("lambda") {
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}, JumpParams{0.0, 0.05, 0.02}),
                        DomainError);
    }
    SUBCASE("delta") {
        CHECK_THROWS_AS(validate_params(p, ExponentialVol{0.1}, JumpParams{2.0, 0.05, 0.0}),
                        DomainError);
    }
}

TEST_CASE("risk-neutral drift is r - sigma0^2/2") {
    MarketParams p = good_params();
    p.rate = 0.05;
    p.sigma0 = 0.3;
    CHECK(risk_neutral_drift(p) == doctest::Approx(0.05 - 0.045).epsilon(1e-15));
}

TEST_CASE("compensator rate matches lambda (e^{gamma + delta^2/2} - 1)") {
    JumpParams jp{2.0, 0.05, 0.02};
    double want = 2.0 * (std::exp(0.05 + 0.5 * 0.02 * 0.02) - 1.0);
    CHECK(jp.compensator_rate() == doctest::Approx(want).epsilon(1e-15));
    // gamma = -delta^2/2 makes the jumps compensated exactly
    JumpParams zero{1.5, -0.5 * 0.1 * 0.1, 0.1};
    CHECK(zero.compensator_rate() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("negative sigma1 and eps = 0 are valid") {
    auto p = good_params();
    p.sigma1 = -0.2;
    p.eps = 0.0;
    CHECK_NOTHROW(validate_params(p, PolynomialVol{{0.3, 0.5}}));
}
