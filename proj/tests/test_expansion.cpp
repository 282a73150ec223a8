#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "lvexp/expansion.hpp"
#include "lvexp/montecarlo.hpp"

using namespace lvexp;

static ValidatedContext exp_ctx(double sigma0 = 0.25, double sigma1 = 0.15, double alpha = 0.1) {
    return validate_params({100.0, 100.0, 0.03, 0.5, sigma0, sigma1, 0.1}, ExponentialVol{alpha});
}

static ValidatedContext lin_ctx(double a0 = 0.3, double a1 = 0.5) {
    return validate_params({100.0, 100.0, 0.03, 0.5, 0.25, 0.1, 0.1}, PolynomialVol{{a0, a1}});
}

TEST_CASE("paper-literal exponential constants reproduce the printed values") {
    // K = sigma1 (sigma0/2 - alpha sigma0/2 - sigma0)
    auto ec15 = exp_constants(0.15, 0.15, 0.1, 0.0, 0.0, Mode::kPaperLiteral);
    CHECK(ec15.k_alpha == doctest::Approx(-0.0123750).epsilon(1e-12));
    // C5 = sigma1^2 / (2 alpha sigma0^2)
    auto ec25 = exp_constants(0.25, 0.15, 0.1, 0.0, 0.0, Mode::kPaperLiteral);
    CHECK(ec25.c[4] == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(ec25.b == 1.0);
    CHECK(ec25.q == doctest::Approx(0.15 / (0.1 * 0.25)).epsilon(1e-12));
}

TEST_CASE("constants scale as sigma1 (first order) and sigma1^2 (second order)") {
    for (Mode m : {Mode::kDefault, Mode::kPaperLiteral}) {
        auto e1 = exp_constants(0.25, 0.15, 0.1, -0.02, 4.6, m);
        auto e2 = exp_constants(0.25, 0.30, 0.1, -0.02, 4.6, m);
        CHECK(e2.k_alpha == doctest::Approx(2.0 * e1.k_alpha).epsilon(1e-12));
        CHECK(e2.q == doctest::Approx(2.0 * e1.q).epsilon(1e-12));
        for (int i = 0; i < 7; ++i)
            CHECK(e2.c[i] == doctest::Approx(4.0 * e1.c[i]).epsilon(1e-12));
    }
}

TEST_CASE("jump constants: printed pair is antisymmetric, derived pair is equal") {
    auto [c8l, c9l] = exp_jump_constants(0.25, 0.15, 0.1, -0.02, Mode::kPaperLiteral);
    CHECK(c9l == doctest::Approx(-c8l).epsilon(1e-15));
    auto [c8d, c9d] = exp_jump_constants(0.25, 0.15, 0.1, -0.02, Mode::kDefault);
    CHECK(c8d == doctest::Approx(c9d).epsilon(1e-15));
}

TEST_CASE("reduced exponential X1/X2 agree with the direct-system oracle") {
    auto ctx = exp_ctx();
    auto ec = exp_constants(ctx);
    auto f = model_f(ctx), df = model_df(ctx);
    for (std::uint64_t i = 0; i < 5; ++i) {
        BrownianPath w = simulate_brownian(0.5, 8192, 11, i);
        auto d = eval_x1_direct(w, nullptr, ctx, f, df, 2);
        CHECK(std::abs(eval_x1_exp(w, ctx, ec) - d.first) < 5e-4);
        CHECK(std::abs(eval_x2_exp(w, ctx, ec) - d.second) < 5e-4);
    }
}

TEST_CASE("reduced linear X1 agrees with the direct-system oracle") {
    auto ctx = lin_ctx();
    auto b = linear_betas(ctx);
    auto f = model_f(ctx), df = model_df(ctx);
    for (std::uint64_t i = 0; i < 5; ++i) {
        BrownianPath w = simulate_brownian(0.5, 8192, 17, i);
        auto d = eval_x1_direct(w, nullptr, ctx, f, df, 1);
        CHECK(std::abs(eval_x1_linear(w, ctx, b) - d.first) < 5e-4);
    }
}

TEST_CASE("degree-1 polynomial evaluator coincides with the linear-beta evaluator") {
    auto ctx = lin_ctx();
    auto b = linear_betas(ctx);
    auto pc = poly_constants(0.25, 0.1, ctx.derived.mu, {0.3, 0.5});
    for (std::uint64_t i = 0; i < 5; ++i) {
        BrownianPath w = simulate_brownian(0.5, 512, 23, i);
        double via_beta = eval_x1_linear(w, ctx, b);
        double via_poly = eval_x1_poly(w, ctx, pc);
        CHECK(via_poly == doctest::Approx(via_beta).epsilon(1e-11));
    }
}

TEST_CASE("quadratic polynomial X1 agrees with the direct-system oracle") {
    auto ctx = validate_params({100.0, 100.0, 0.03, 0.5, 0.25, 0.1, 0.1},
                               PolynomialVol{{0.2, 0.3, 0.1}});
    auto pc = poly_constants(0.25, 0.1, ctx.derived.mu, {0.2, 0.3, 0.1});
    auto f = model_f(ctx), df = model_df(ctx);
    for (std::uint64_t i = 0; i < 5; ++i) {
        BrownianPath w = simulate_brownian(0.5, 8192, 29, i);
        auto d = eval_x1_direct(w, nullptr, ctx, f, df, 1);
        CHECK(std::abs(eval_x1_poly(w, ctx, pc) - d.first) < 2e-3);
    }
}

TEST_CASE("jump decomposition: reduced X1 with jumps equals the direct jump system") {
    JumpParams jp{2.0, 0.05, 0.02};
    SUBCASE("exponential (+compensator)") {
        auto ctx = validate_params({100.0, 100.0, 0.03, 0.5, 0.25, 0.15, 0.1},
                                   ExponentialVol{0.1}, jp);
        auto ec = exp_constants(ctx);
        auto f = model_f(ctx), df = model_df(ctx);
        for (std::uint64_t i = 0; i < 5; ++i) {
            BrownianPath w = simulate_brownian(0.5, 8192, 31, i);
            JumpPath j = simulate_jumps(jp, 0.5, 31, i);
            auto d = eval_x1_direct(w, &j, ctx, f, df, 1, +1.0);
            CHECK(std::abs(eval_x1_exp_jump(w, j, ctx, ec, jp) - d.first) < 1e-3);
        }
    }
    SUBCASE("linear (-compensator)") {
        auto ctx = validate_params({100.0, 100.0, 0.03, 0.5, 0.25, 0.1, 0.1},
                                   PolynomialVol{{0.3, 0.5}}, jp);
        auto b = linear_betas(ctx);
        auto f = model_f(ctx), df = model_df(ctx);
        for (std::uint64_t i = 0; i < 5; ++i) {
            BrownianPath w = simulate_brownian(0.5, 8192, 37, i);
            JumpPath j = simulate_jumps(jp, 0.5, 37, i);
            auto d = eval_x1_direct(w, &j, ctx, f, df, 1, -1.0);
            CHECK(std::abs(eval_x1_linear_jump(w, j, ctx, b, jp) - d.first) < 1e-3);
        }
    }
}

TEST_CASE("beta3 differs between modes; the other betas are shared") {
    auto bd = linear_betas(0.25, 0.1, 0.3, 0.5, 4.6, -0.02, Mode::kDefault);
    auto bl = linear_betas(0.25, 0.1, 0.3, 0.5, 4.6, -0.02, Mode::kPaperLiteral);
    CHECK(bd.beta1 == bl.beta1);
    CHECK(bd.beta2 == bl.beta2);
    CHECK(bd.beta3 != bl.beta3);
    CHECK(bd.beta3 == doctest::Approx(0.1 * 0.3 + 0.1 * 0.5 * 4.6).epsilon(1e-14));
    CHECK(bd.beta4 == bl.beta4);
    CHECK(bd.beta5 == bl.beta5);
    CHECK(bd.beta6 == bl.beta6);
}

// Series coefficients of eps -> F(eps, x(eps)) by a five-point polynomial fit.
static std::array<double, 4> series_oracle(const std::array<double, 4>& a, double x0,
                                           const std::array<double, 3>& x) {
    auto F = [&](double eps) {
        double xe = x0 + eps * x[0] + eps * eps * x[1] + eps * eps * eps * x[2];
        double v = 0.0, ep = 1.0;
        for (int j = 0; j < 4; ++j) {
            v += ep * std::exp(a[j] * xe);
            ep *= eps;
        }
        return v;
    };
    const double h = 1e-2;
    double f0 = F(0.0), fp = F(h), fm = F(-h), fp2 = F(2 * h), fm2 = F(-2 * h);
    std::array<double, 4> out{};
    out[0] = f0;
    out[1] = (8.0 * (fp - fm) - (fp2 - fm2)) / (12.0 * h);
    out[2] = (16.0 * (fp + fm) - (fp2 + fm2) - 30.0 * f0) / (24.0 * h * h);
    out[3] = ((fp2 - fm2) - 2.0 * (fp - fm)) / (12.0 * h * h * h);
    return out;
}

TEST_CASE("composition coefficients match a numerical series oracle") {
    const double x0 = 0.4;
    const std::array<double, 4> a{0.7, -0.3, 0.2, 0.5};
    const std::array<double, 3> x{0.6, -0.2, 0.15};
    std::array<std::array<double, 4>, 4> fd{};
    for (int j = 0; j < 4; ++j)
        for (int m = 0; m < 4; ++m) fd[j][m] = std::pow(a[j], m) * std::exp(a[j] * x0);
    auto got = compose_coeffs(fd, x, Mode::kDefault);
    auto want = series_oracle(a, x0, x);
    for (int k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(2e-3));
    // literal mode drops the f0'' x1 x2 cross term, so it must differ here
    auto lit = compose_coeffs(fd, x, Mode::kPaperLiteral);
    CHECK(lit[3] != got[3]);
    CHECK(lit[0] == got[0]);
    CHECK(lit[1] == got[1]);
    CHECK(lit[2] == got[2]);
}

TEST_CASE("composition of exp(x(eps)) with x = eps gives the e^eps series") {
    std::array<std::array<double, 4>, 4> fd{};
    for (int m = 0; m < 4; ++m) fd[0][m] = 1.0;  // f0 = e^x at x0 = 0, no higher f_j
    auto c = compose_coeffs(fd, {1.0, 0.0, 0.0}, Mode::kDefault);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(1.0));
    CHECK(c[2] == doctest::Approx(0.5));
    CHECK(c[3] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("X0 is exact: eval_x0 reproduces the lognormal path") {
    auto ctx = exp_ctx();
    BrownianPath w = simulate_brownian(0.5, 16, 41, 0);
    for (std::size_t i = 0; i < w.times.size(); ++i) {
        double want = ctx.derived.x0 + ctx.derived.mu * w.times[i] + 0.25 * w.values[i];
        CHECK(eval_x0(w.times[i], w.values[i], ctx) == doctest::Approx(want).epsilon(1e-15));
    }
}
