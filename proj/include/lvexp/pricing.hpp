#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lvexp/expansion.hpp"
#include "lvexp/gaussian.hpp"
#include "lvexp/models.hpp"
#include "lvexp/quadrature.hpp"

namespace lvexp {

struct QuadConfig {
    int n_time = 64;
    int n_space = 128;
};

struct PriceTerm {
    std::string label;
    int order;     // power of eps the term carries
    double value;  // coefficient, excluding the eps^order factor
};

struct PriceBreakdown {
    double base = 0.0;
    std::vector<PriceTerm> terms;
    double total = 0.0;

    void finalize(double eps) {
        total = base;
        for (const auto& t : terms) total += std::pow(eps, t.order) * t.value;
    }
};

// d(a) = (ln(s0/K) + (r - sigma0^2 a / 2) T) / (sigma0 sqrt(T)).
// Note d(1) plays the role the textbook calls d2; d(1) + sigma0 sqrt(T) is the
// textbook d1. We keep the source convention throughout.
inline double d_of(const ValidatedContext& ctx, double a) { return detail::paper_d(ctx, a); }

inline double bs_price(const ValidatedContext& ctx) {
    const auto& p = ctx.params;
    const double sd = p.sigma0 * std::sqrt(p.maturity);
    const double disc = std::exp(-p.rate * p.maturity);
    if (std::abs(sd) < 1e-12) {
        double v = p.s0 - p.strike * disc;
        return v > 0.0 ? v : 0.0;
    }
    const double d1 = d_of(ctx, 1.0);  // exercise-probability argument
    const double d2 = d1 + sd;         // delta argument
    return p.s0 * norm_cdf(d2) - p.strike * disc * norm_cdf(d1);
}

inline PriceBreakdown price_exp_o1(const ValidatedContext& ctx, Mode mode = Mode::kDefault,
                                   const QuadConfig& qc = {}) {
    const auto& p = ctx.params;
    const double alpha = std::get<ExponentialVol>(ctx.model).alpha;
    const double T = p.maturity;
    auto ec = exp_constants(ctx, mode);
    PriceBreakdown out;
    out.base = bs_price(ctx);
    const double sA = std::pow(p.s0, 1.0 + alpha);
    const double k1 = ec.k_alpha * std::exp(-0.5 * p.sigma0 * p.sigma0 * T);
    double i1 = integral_I1(ctx, alpha, qc.n_time, qc.n_space, mode);
    out.terms.push_back({"time_integral", 1, k1 * sA * i1});
    if (mode == Mode::kPaperLiteral) {
        out.terms.push_back({"offset", 1, -ec.q * p.s0 * norm_cdf(d_of(ctx, 1.0))});
        const double k3 = ec.q * std::exp(0.5 * p.sigma0 * p.sigma0 * T * alpha * (alpha + 1.0) +
                                          alpha * p.rate * T);
        out.terms.push_back({"terminal", 1, k3 * sA * norm_cdf(d_of(ctx, 2.0 * alpha + 1.0))});
    } else {
        const double d2 = d_of(ctx, 1.0) + p.sigma0 * std::sqrt(T);
        out.terms.push_back({"offset", 1, -ec.q * sA * norm_cdf(d2)});
        const double k3 = ec.q * std::exp(0.5 * p.sigma0 * p.sigma0 * T * alpha * (alpha + 1.0) +
                                          alpha * p.rate * T);
        out.terms.push_back({"terminal", 1, k3 * sA * norm_cdf(d_of(ctx, -1.0 - 2.0 * alpha))});
    }
    out.finalize(p.eps);
    return out;
}

inline PriceBreakdown price_exp_o2(const ValidatedContext& ctx, Mode mode = Mode::kDefault,
                                   const QuadConfig& qc = {}) {
    const auto& p = ctx.params;
    const double alpha = std::get<ExponentialVol>(ctx.model).alpha;
    const double T = p.maturity, s0q = p.sigma0 * p.sigma0;
    auto ec = exp_constants(ctx, mode);
    PriceBreakdown out = price_exp_o1(ctx, mode, qc);
    const double s1 = std::pow(p.s0, alpha + 1.0), s2 = std::pow(p.s0, 2.0 * alpha + 1.0);
    const double k4 = (ec.c[0] + 2.0 * ec.k_alpha * ec.q) * std::exp(-0.5 * s0q * T);
    const double k5 = ec.c[1] * std::exp(alpha * p.rate * T - 0.5 * s0q * (alpha + 1.0) * T);
    const double k6 = (ec.c[2] + 2.0 * ec.k_alpha * ec.q) * std::exp(-0.5 * s0q * T);
    const double k7 = (ec.c[3] + 2.0 * ec.k_alpha * ec.k_alpha) * std::exp(-0.5 * s0q * T);
    const double k8 =
        ec.c[4] * std::exp(0.5 * s0q * T * alpha * (2.0 * alpha + 1.0) + 2.0 * alpha * p.rate * T);
    const double k9 =
        (ec.c[5] + ec.q) * std::exp(0.5 * s0q * T * alpha * (alpha + 1.0) + alpha * p.rate * T);
    const double k10 = ec.c[6] - ec.q;
    out.terms.push_back(
        {"o2_i1_2a", 2, k4 * s2 * integral_I1(ctx, 2.0 * alpha, qc.n_time, qc.n_space, mode)});
    out.terms.push_back({"o2_i2", 2, k5 * s2 * integral_I2(ctx, qc.n_time, qc.n_space)});
    out.terms.push_back(
        {"o2_i1_a", 2, k6 * s1 * integral_I1(ctx, alpha, qc.n_time, qc.n_space, mode)});
    out.terms.push_back({"o2_i3", 2, k7 * s2 * integral_I3(ctx, qc.n_time, qc.n_space)});
    out.terms.push_back({"o2_n1", 2, k8 * s2 * norm_cdf(d_of(ctx, -3.0 - 4.0 * alpha))});
    out.terms.push_back({"o2_n2", 2, k9 * s1 * norm_cdf(d_of(ctx, -1.0 - 2.0 * alpha))});
    out.terms.push_back({"o2_n3", 2, k10 * p.s0 * norm_cdf(d_of(ctx, 1.0))});
    out.finalize(p.eps);
    return out;
}

namespace detail {

// Jump correction terms shared by both first-order jump prices. The
// compensator carries the model's printed sign (+ exponential, - linear).
inline void append_jump_terms(PriceBreakdown& out, const ValidatedContext& ctx,
                              const JumpParams& jp, double comp_sign, Mode mode) {
    const auto& p = ctx.params;
    const double T = p.maturity;
    if (mode == Mode::kPaperLiteral) {
        // Printed: compensator term without lambda, jump-mean term delta*lambda,
        // both against N(d(1)).
        double nd = norm_cdf(paper_d(ctx, 1.0));
        out.terms.push_back(
            {"jump_compensator", 1, T * p.s0 * nd * (std::exp(jp.gamma + 0.5 * jp.delta * jp.delta) - 1.0)});
        out.terms.push_back({"jump_mean", 1, T * p.s0 * nd * jp.delta * jp.lambda});
        return;
    }
    // Oracle-consistent: lambda restored, E[sum J_i] = lambda T gamma, and the
    // CDF argument from E[1_D e^{X_T}] = s0 e^{rT} N(d(1) + sigma0 sqrt(T)).
    double nd = norm_cdf(paper_d(ctx, 1.0) + p.sigma0 * std::sqrt(T));
    out.terms.push_back({"jump_compensator", 1, comp_sign * T * p.s0 * nd * jp.compensator_rate()});
    out.terms.push_back({"jump_mean", 1, T * p.s0 * nd * jp.lambda * jp.gamma});
}

}  // namespace detail

inline PriceBreakdown price_exp_jump_o1(const ValidatedContext& ctx, const JumpParams& jp,
                                        Mode mode = Mode::kDefault, const QuadConfig& qc = {}) {
    PriceBreakdown out = price_exp_o1(ctx, mode, qc);
    detail::append_jump_terms(out, ctx, jp, +1.0, mode);
    out.finalize(ctx.params.eps);
    return out;
}

inline PriceBreakdown price_linear_o1(const ValidatedContext& ctx, Mode mode = Mode::kDefault,
                                      const QuadConfig& qc = {}) {
    const auto& p = ctx.params;
    const auto& po = std::get<PolynomialVol>(ctx.model);
    if (po.coeffs.size() > 2) throw DomainError("price_linear_o1: polynomial degree must be <= 1");
    const double T = p.maturity, rt = std::sqrt(T), s0q = p.sigma0 * p.sigma0;
    auto b = linear_betas(ctx, mode);
    PriceBreakdown out;
    out.base = bs_price(ctx);
    const double ii = integral_I(ctx, qc.n_time, qc.n_space);
    if (mode == Mode::kPaperLiteral) {
        const double d1 = detail::paper_d(ctx, 1.0);
        double nd = norm_cdf(d1), pd = norm_pdf(d1);
        out.terms.push_back({"n_t", 1, p.s0 * (b.beta1 + p.sigma0 * b.beta3 + b.beta4) * T * nd});
        out.terms.push_back({"n_t2", 1, p.s0 * (b.beta2 + s0q * b.beta4) * T * T * nd});
        out.terms.push_back(
            {"phi", 1, p.s0 * (b.beta3 + 2.0 * p.sigma0 * b.beta4 * T + T * b.beta5) * rt * pd});
        out.terms.push_back({"phi_d", 1, -p.s0 * b.beta4 * T * d1 * pd});
        out.terms.push_back({"n_t2_b5", 1, p.s0 * T * T * b.beta5 * p.sigma0 * nd});
        out.terms.push_back({"running_w", 1, -p.s0 * std::exp(0.5 * s0q * T) * b.beta6 * ii});
    } else {
        const double d2 = detail::paper_d(ctx, 1.0) + p.sigma0 * rt;
        double nd = norm_cdf(d2), pd = norm_pdf(d2);
        out.terms.push_back({"n_t", 1, p.s0 * (b.beta1 + p.sigma0 * b.beta3 + b.beta4) * T * nd});
        out.terms.push_back(
            {"n_t2", 1, p.s0 * (b.beta2 + s0q * b.beta4 + p.sigma0 * b.beta5) * T * T * nd});
        out.terms.push_back(
            {"phi", 1, p.s0 * (b.beta3 + 2.0 * p.sigma0 * b.beta4 * T + T * b.beta5) * rt * pd});
        out.terms.push_back({"phi_d", 1, -p.s0 * b.beta4 * T * d2 * pd});
        out.terms.push_back({"running_w", 1, -p.s0 * std::exp(-0.5 * s0q * T) * b.beta6 * ii});
    }
    out.finalize(p.eps);
    return out;
}

inline PriceBreakdown price_linear_jump_o1(const ValidatedContext& ctx, const JumpParams& jp,
                                           Mode mode = Mode::kDefault, const QuadConfig& qc = {}) {
    PriceBreakdown out = price_linear_o1(ctx, mode, qc);
    detail::append_jump_terms(out, ctx, jp, -1.0, mode);
    out.finalize(ctx.params.eps);
    return out;
}

}  // namespace lvexp
