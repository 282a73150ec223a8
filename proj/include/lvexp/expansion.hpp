#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "lvexp/models.hpp"
#include "lvexp/paths.hpp"

namespace lvexp {

namespace detail {
// Drift-and-variance exponent of e^{c X0}: E[e^{c(mu s + sigma0 W_s)}] = e^{a(c) s}.
inline double exp_rate(double c, double mu, double sigma0) {
    return c * mu + 0.5 * c * c * sigma0 * sigma0;
}
}  // namespace detail

/** Constants of the reduced second-order system for f(x) = e^{alpha x}.
 *  In default mode they are the derivation-consistent values (obtained by
 *  redoing the Ito reduction with general drift mu and log-spot offset x0);
 *  in paper-literal mode they are the printed ones, which correspond to
 *  mu = -sigma0^2/2 and x0 = 0. */
struct ExpConstants {
    double k_alpha = 0.0;
    std::array<double, 7> c{};  // c[0] = C^1 ... c[6] = C^7
    std::optional<double> c8, c9;
    double q = 0.0;  // sigma1 / (alpha sigma0)
    double b = 1.0;  // offset constant in (e^{alpha X0_t} - B)
    Mode mode = Mode::kDefault;
};

inline ExpConstants exp_constants(double sigma0, double sigma1, double alpha, double mu,
                                  double x0, Mode mode = Mode::kDefault) {
    if (sigma0 == 0.0) throw DomainError("exp_constants: sigma0 must be nonzero");
    if (alpha == 0.0) throw DomainError("exp_constants: alpha must be nonzero");
    ExpConstants ec;
    ec.mode = mode;
    ec.q = sigma1 / (alpha * sigma0);
    if (mode == Mode::kPaperLiteral) {
        ec.b = 1.0;
        ec.k_alpha = sigma1 * (sigma0 / 2.0 - alpha * sigma0 / 2.0 - sigma0);
        const double kr = (sigma0 / 2.0 - alpha * sigma0 / 2.0 - sigma0) / sigma0;  // K/(s0 s1)
        ec.c[0] = -sigma1 * sigma1 * (5.0 / 2.0 - 1.0 / 2.0 + alpha + kr);
        ec.c[1] = ec.k_alpha * sigma1 / sigma0;
        ec.c[2] = -sigma1 * sigma1 * (0.5 + 0.5 * alpha + 2.0);
        ec.c[3] = -ec.k_alpha * sigma1 * alpha * (2.0 * sigma0 - sigma0 / 2.0 + alpha * sigma0 / 2.0);
        ec.c[4] = sigma1 * sigma1 / (2.0 * alpha * sigma0 * sigma0);
        ec.c[5] = -sigma1 * sigma1 / (alpha * sigma0 * sigma0);
        ec.c[6] = sigma1 * sigma1 / (2.0 * alpha * sigma0 * sigma0);
        return ec;
    }
    const double b = std::exp(alpha * x0);
    const double aA = detail::exp_rate(alpha, mu, sigma0);     // a(alpha)
    const double a2A = detail::exp_rate(2.0 * alpha, mu, sigma0);
    ec.b = b;
    ec.k_alpha = -sigma0 * sigma1 - sigma1 * mu / sigma0 - sigma1 * alpha * sigma0 / 2.0;
    const double q = ec.q, k = ec.k_alpha;
    ec.c[0] = -0.5 * sigma1 * sigma1 - 2.0 * sigma0 * sigma1 * alpha * q - sigma1 * k / sigma0 -
              sigma1 * q * a2A / (2.0 * sigma0);
    ec.c[1] = sigma1 * k / sigma0;
    ec.c[2] = b * q * sigma1 * (2.0 * sigma0 * alpha + aA / sigma0);
    ec.c[3] = -k * (2.0 * sigma0 * sigma1 * alpha + sigma1 * aA / sigma0);
    ec.c[4] = sigma1 * q / (2.0 * sigma0);
    ec.c[5] = -b * sigma1 * q / sigma0;
    ec.c[6] = b * b * sigma1 * q / (2.0 * sigma0);
    return ec;
}

inline ExpConstants exp_constants(const ValidatedContext& ctx, Mode mode = Mode::kDefault) {
    const auto& e = std::get<ExponentialVol>(ctx.model);
    return exp_constants(ctx.params.sigma0, ctx.params.sigma1, e.alpha, ctx.derived.mu,
                         ctx.derived.x0, mode);
}

/** Coefficients of the compensator- and jump-coupled time integrals in the
 *  second-order jump system. The printed pair satisfies C9 = -C8; the
 *  derivation-consistent pair has both equal to the common drift coefficient
 *  of the jump-coupled reduction. */
inline std::pair<double, double> exp_jump_constants(double sigma0, double sigma1, double alpha,
                                                    double mu, Mode mode = Mode::kDefault) {
    if (sigma0 == 0.0) throw DomainError("exp_jump_constants: sigma0 must be nonzero");
    if (mode == Mode::kPaperLiteral) {
        double c8 = (sigma1 / sigma0) * alpha * mu + 0.5 * sigma0 * sigma1 * alpha * alpha -
                    2.0 * sigma0 * sigma1 * alpha;
        return {c8, -c8};
    }
    double cj = -2.0 * sigma0 * sigma1 * alpha - sigma1 * detail::exp_rate(alpha, mu, sigma0) / sigma0;
    return {cj, cj};
}

struct LinearBetas {
    double beta1 = 0, beta2 = 0, beta3 = 0, beta4 = 0, beta5 = 0, beta6 = 0;
};

inline LinearBetas linear_betas(double sigma0, double sigma1, double a0, double a1, double x0,
                                double mu, Mode mode = Mode::kDefault) {
    if (sigma0 == 0.0) throw DomainError("linear_betas: sigma0 must be nonzero");
    LinearBetas b;
    b.beta1 = -sigma0 * sigma1 * a0 - sigma0 * sigma1 * a1 * x0 - 0.5 * sigma0 * sigma1 * a1;
    b.beta2 = -0.5 * sigma0 * sigma1 * a1 * mu;
    // The printed beta3 conflicts with the direct derivation; default keeps the
    // oracle-consistent value.
    b.beta3 = (mode == Mode::kPaperLiteral) ? (a1 * sigma0 + x0 * sigma1 * a1)
                                            : (sigma1 * a0 + sigma1 * a1 * x0);
    b.beta4 = 0.5 * sigma0 * sigma1 * a1;
    b.beta5 = sigma1 * a1 * mu;
    b.beta6 = sigma1 * a1 * mu + sigma0 * sigma0 * sigma1 * a1;
    return b;
}

inline LinearBetas linear_betas(const ValidatedContext& ctx, Mode mode = Mode::kDefault) {
    const auto& po = std::get<PolynomialVol>(ctx.model);
    double a0 = po.coeffs.empty() ? 0.0 : po.coeffs[0];
    double a1 = po.coeffs.size() > 1 ? po.coeffs[1] : 0.0;
    return linear_betas(ctx.params.sigma0, ctx.params.sigma1, a0, a1, ctx.derived.x0,
                        ctx.derived.mu, mode);
}

/** Constants of the reduced system for polynomial f. Only k and ktilde feed
 *  the first-order evaluator; the second-order arrays c1/c3/c4/c5 are a
 *  best-effort transcription kept for reference (several of their printed
 *  definitions are internally inconsistent, so the second-order polynomial
 *  path goes through the direct-system evaluator instead). */
struct PolyConstants {
    std::vector<double> k;       // K_i, i = 0..N
    std::vector<double> ktilde;  // Ktilde_i, i = 0..N (index 0 unused, = 0)
    std::vector<double> c1;      // C^1_k, k = 0..2N+1
    std::vector<std::vector<double>> c3, c4;  // C^{3,4}_{i,j}, i = 1..N, j = 0..N
    std::vector<double> c5;      // C^5_i, i = 0..N-1 (jump variant)
};

inline PolyConstants poly_constants(double sigma0, double sigma1, double mu,
                                    const std::vector<double>& coeffs) {
    if (sigma0 == 0.0) throw DomainError("poly_constants: sigma0 must be nonzero");
    if (coeffs.empty()) throw DomainError("poly_constants: coeffs must be non-empty");
    const int n = (int)coeffs.size() - 1;
    auto a = [&](int i) { return (i >= 0 && i <= n) ? coeffs[i] : 0.0; };
    PolyConstants pc;
    pc.k.assign(n + 1, 0.0);
    pc.ktilde.assign(n + 1, 0.0);
    pc.k[0] = sigma0 * sigma1 * a(0) + 0.5 * sigma0 * sigma1 * a(1);
    for (int i = 1; i < n; ++i)
        pc.k[i] = sigma0 * sigma1 * a(i) + (sigma1 / sigma0) * mu * a(i) +
                  0.5 * sigma0 * sigma1 * a(i + 1) * (i + 1);
    if (n >= 1) pc.k[n] = sigma0 * sigma1 * a(n) + (sigma1 / sigma0) * mu * a(n);
    for (int i = 1; i <= n; ++i) pc.ktilde[i] = (sigma1 / sigma0) * a(i) / (i + 1.0);
    // Reference-only second-order data, transcribed as printed.
    pc.c1.assign(2 * n + 2, 0.0);
    for (int kk = 0; kk <= 2 * n + 1; ++kk) {
        double g1 = 0.0, g2 = 0.0, g3 = 0.0;
        if (kk == 0) {
            g1 = 0.5 * sigma0;
        } else if (kk == 2 * n && n >= 1) {
            g1 = mu * (sigma1 / sigma0) * n * a(n) *
                 (sigma0 * sigma1 * a(n) + (sigma1 / sigma0) * mu * a(n));
        } else {
            for (int i = 0; i <= n; ++i) {
                int j = kk - 1 - i;
                if (j < 0 || j > n) continue;
                g1 += mu * i * a(i) + sigma1 / sigma0 - 0.5 * sigma0 * (i + j + 1);
            }
        }
        if (kk >= 1 && kk <= n) g2 = 0.5 * ((kk % 2 == 0) ? 1.0 : 0.0) * sigma1 * sigma1 * a(kk) * a(kk);
        for (int i = 0; i <= n; ++i) {
            int j = kk - 1 - i;
            if (j < 1 || j > n) continue;
            g3 += 2.0 * sigma0 * sigma1 * a(i) * i * pc.ktilde[j];
        }
        pc.c1[kk] = g1 + g2 + g3;
    }
    pc.c3.assign(n + 1, std::vector<double>(n + 1, 0.0));
    pc.c4.assign(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            if (i == 1 && j == 0) pc.c3[i][j] = -(sigma1 / sigma0) * a(1) * pc.k[0];
            else pc.c3[i][j] = -((sigma1 / sigma0) * i * a(i) * pc.k[j] +
                                 0.5 * sigma0 * sigma1 * i * a(i) * pc.k[j] * (i - 1));
            pc.c4[i][j] = (sigma1 / sigma0) * a(i) * pc.k[j];
        }
    if (n >= 1) {
        pc.c5.assign(n, 0.0);
        pc.c5[0] = sigma0 * sigma0 * sigma1 * a(2) + 2.0 * sigma0 * sigma1 * a(1);
        for (int i = 1; i < n; ++i)
            pc.c5[i] = sigma1 * mu * a(i + 1) * (i + 1) + 0.5 * sigma0 * sigma0 * (i + 2) * (i + 1) +
                       4.0 * sigma0 * sigma1 * a(i + 1);
    }
    return pc;
}

inline double eval_x0(double t, double w, const ValidatedContext& ctx) {
    return ctx.derived.x0 + ctx.derived.mu * t + ctx.params.sigma0 * w;
}

namespace detail {

inline std::vector<double> exp_samples(const BrownianPath& path, const ValidatedContext& ctx,
                                       double alpha) {
    std::vector<double> e(path.times.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = std::exp(alpha * eval_x0(path.times[i], path.values[i], ctx));
    return e;
}

// Running trapezoid integral of f over the path grid: out[i] = int_0^{t_i} f.
inline std::vector<double> cum_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& f) {
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (f[i - 1] + f[i]) * (times[i] - times[i - 1]);
    return out;
}

}  // namespace detail

inline double eval_x1_exp(const BrownianPath& path, const ValidatedContext& ctx,
                          const ExpConstants& consts) {
    const double alpha = std::get<ExponentialVol>(ctx.model).alpha;
    auto e = detail::exp_samples(path, ctx, alpha);
    double g = trapezoid(path.times, e);
    return consts.k_alpha * g + consts.q * (e.back() - consts.b);
}

inline double eval_x2_exp(const BrownianPath& path, const ValidatedContext& ctx,
                          const ExpConstants& consts) {
    const double alpha = std::get<ExponentialVol>(ctx.model).alpha;
    auto e = detail::exp_samples(path, ctx, alpha);
    std::vector<double> e2(e.size()), eg(e.size());
    auto g = detail::cum_trapezoid(path.times, e);
    for (std::size_t i = 0; i < e.size(); ++i) {
        e2[i] = e[i] * e[i];
        eg[i] = e[i] * g[i];
    }
    double int_e2 = trapezoid(path.times, e2);
    double int_eg = trapezoid(path.times, eg);  // double integral by Fubini
    const auto& c = consts.c;
    return c[0] * int_e2 + c[1] * e.back() * g.back() + c[2] * g.back() + c[3] * int_eg +
           c[4] * e2.back() + c[5] * e.back() + c[6];
}

inline double eval_x1_exp_jump(const BrownianPath& path, const JumpPath& jumps,
                               const ValidatedContext& ctx, const ExpConstants& consts,
                               const JumpParams& jp) {
    return eval_x1_exp(path, ctx, consts) + jp.compensator_rate() * path.horizon() +
           jumps.sum_total();
}

inline double eval_x2_exp_jump(const BrownianPath& path, const JumpPath& jumps,
                               const ValidatedContext& ctx, const ExpConstants& consts,
                               const JumpParams& jp) {
    const auto& p = ctx.params;
    const double alpha = std::get<ExponentialVol>(ctx.model).alpha;
    auto [c8, c9] = exp_jump_constants(p.sigma0, p.sigma1, alpha, ctx.derived.mu, consts.mode);
    const double kap = jp.compensator_rate();
    const double T = path.horizon(), r10 = p.sigma1 / p.sigma0;
    auto e = detail::exp_samples(path, ctx, alpha);
    std::vector<double> se(e.size()), je(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        se[i] = path.times[i] * e[i];
        je[i] = jumps.sum_before(path.times[i]) * e[i];
    }
    double g = trapezoid(path.times, e);
    double int_se = trapezoid(path.times, se);
    double int_je = trapezoid(path.times, je);
    double jt = jumps.sum_total();
    double base = eval_x2_exp(path, ctx, consts) + c8 * kap * int_se + c9 * int_je;
    if (consts.mode == Mode::kPaperLiteral)
        return base - T * e.back() * kap + r10 * kap * g + r10 * e.back() * jt - r10 * jt * g;
    double sum_ej = 0.0;
    for (std::size_t i = 0; i < jumps.count(); ++i) {
        double tau = jumps.jump_times[i];
        double etau = std::exp(alpha * eval_x0(tau, interp_path(path, tau), ctx));
        sum_ej += etau * jumps.jump_sizes[i];
    }
    return base + r10 * kap * (T * e.back() - g) + r10 * (jt * e.back() - sum_ej);
}

inline double eval_x1_poly(const BrownianPath& path, const ValidatedContext& ctx,
                           const PolyConstants& pc, Mode mode = Mode::kDefault) {
    const auto& po = std::get<PolynomialVol>(ctx.model);
    const int n = (int)po.coeffs.size() - 1;
    const double x0 = ctx.derived.x0;
    const double xT = eval_x0(path.horizon(), path.values.back(), ctx);
    double acc = ctx.params.sigma1 * po.coeffs[0] * path.values.back();
    for (int i = 1; i <= n; ++i) {
        acc += pc.ktilde[i] * std::pow(xT, i + 1);
        if (mode == Mode::kDefault) acc -= pc.ktilde[i] * std::pow(x0, i + 1);
    }
    std::vector<double> f(path.times.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
        double x = eval_x0(path.times[m], path.values[m], ctx);
        double v = 0.0;
        for (int i = n; i >= 0; --i) v = v * x + pc.k[i];
        f[m] = v;
    }
    return acc - trapezoid(path.times, f);
}

inline double eval_x1_linear(const BrownianPath& path, const ValidatedContext& ctx,
                             const LinearBetas& b) {
    (void)ctx;
    const double T = path.horizon(), wT = path.values.back();
    double iw = trapezoid(path.times, path.values);
    return b.beta1 * T + b.beta2 * T * T + b.beta3 * wT + b.beta4 * wT * wT + b.beta5 * T * wT -
           b.beta6 * iw;
}

inline double eval_x1_linear_jump(const BrownianPath& path, const JumpPath& jumps,
                                  const ValidatedContext& ctx, const LinearBetas& b,
                                  const JumpParams& jp) {
    return eval_x1_linear(path, ctx, b) - jp.compensator_rate() * path.horizon() +
           jumps.sum_total();
}

/** Left-point (Ito) discretization of the unreduced recursive system; the
 *  ground-truth oracle for every reduced evaluator. Returns the full running
 *  trajectories so callers can take pathwise suprema. */
struct DirectPath {
    std::vector<double> x1;
    std::vector<double> x2;
};

inline DirectPath eval_direct_path(const BrownianPath& path, const JumpPath* jumps,
                                   const ValidatedContext& ctx,
                                   const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, int order,
                                   double jump_sign = 1.0) {
    const auto& p = ctx.params;
    const std::size_t m = path.times.size();
    DirectPath out;
    out.x1.assign(m, 0.0);
    out.x2.assign(m, 0.0);
    double kap = jumps ? (ctx.jumps ? ctx.jumps->compensator_rate() : 0.0) : 0.0;
    std::size_t jidx = 0;
    double x1 = 0.0, x2 = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        double t = path.times[i], dt = path.times[i + 1] - t;
        double dw = path.values[i + 1] - path.values[i];
        double xs = eval_x0(t, path.values[i], ctx);
        double fs = f(xs);
        double x1_left = x1;
        x1 += -p.sigma0 * p.sigma1 * fs * dt + p.sigma1 * fs * dw;
        if (jumps) x1 += jump_sign * kap * dt;
        if (order >= 2) {
            double dfs = df(xs);
            x2 += -(0.5 * p.sigma1 * p.sigma1 * fs * fs + 2.0 * p.sigma0 * p.sigma1 * dfs * x1_left) * dt +
                  p.sigma1 * dfs * x1_left * dw;
        }
        if (jumps) {
            while (jidx < jumps->count() && jumps->jump_times[jidx] <= path.times[i + 1]) {
                x1 += jumps->jump_sizes[jidx];
                ++jidx;
            }
        }
        out.x1[i + 1] = x1;
        out.x2[i + 1] = x2;
    }
    return out;
}

inline std::pair<double, double> eval_x1_direct(const BrownianPath& path, const JumpPath* jumps,
                                                const ValidatedContext& ctx,
                                                const std::function<double(double)>& f,
                                                const std::function<double(double)>& df,
                                                int order, double jump_sign = 1.0) {
    auto dp = eval_direct_path(path, jumps, ctx, f, df, order, jump_sign);
    return {dp.x1.back(), dp.x2.back()};
}

// Correction function and derivative for the configured model.
inline std::function<double(double)> model_f(const ValidatedContext& ctx) {
    if (const auto* e = std::get_if<ExponentialVol>(&ctx.model)) {
        double a = e->alpha;
        return [a](double x) { return std::exp(a * x); };
    }
    auto cs = std::get<PolynomialVol>(ctx.model).coeffs;
    return [cs](double x) {
        double v = 0.0;
        for (std::size_t i = cs.size(); i-- > 0;) v = v * x + cs[i];
        return v;
    };
}

inline std::function<double(double)> model_df(const ValidatedContext& ctx) {
    if (const auto* e = std::get_if<ExponentialVol>(&ctx.model)) {
        double a = e->alpha;
        return [a](double x) { return a * std::exp(a * x); };
    }
    auto cs = std::get<PolynomialVol>(ctx.model).coeffs;
    return [cs](double x) {
        double v = 0.0;
        for (std::size_t i = cs.size(); i-- > 1;) v = v * x + i * cs[i];
        return v;
    };
}

/** Composition coefficients [f_eps(x(eps))]_0..3 from the derivative table
 *  fd[j][m] = f_j^{(m)}(x_0) and the series coefficients x1..x3. The printed
 *  third-order coefficient drops the f0'' x1 x2 cross term and doubles the
 *  f1'' x1^2 one; default restores the true Taylor values. */
inline std::array<double, 4> compose_coeffs(const std::array<std::array<double, 4>, 4>& fd,
                                            const std::array<double, 3>& x,
                                            Mode mode = Mode::kDefault) {
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    std::array<double, 4> out{};
    out[0] = fd[0][0];
    out[1] = fd[0][1] * x1 + fd[1][0];
    out[2] = fd[0][1] * x2 + 0.5 * fd[0][2] * x1 * x1 + fd[1][1] * x1 + fd[2][0];
    if (mode == Mode::kPaperLiteral) {
        out[3] = fd[0][1] * x3 + (1.0 / 6.0) * fd[0][3] * x1 * x1 * x1 + fd[1][1] * x2 +
                 fd[2][1] * x1 + fd[1][2] * x1 * x1 + fd[3][0];
    } else {
        out[3] = fd[0][1] * x3 + fd[0][2] * x1 * x2 + (1.0 / 6.0) * fd[0][3] * x1 * x1 * x1 +
                 fd[1][1] * x2 + 0.5 * fd[1][2] * x1 * x1 + fd[2][1] * x1 + fd[3][0];
    }
    return out;
}

}  // namespace lvexp
