#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

#include "lvexp/expansion.hpp"
#include "lvexp/models.hpp"
#include "lvexp/paths.hpp"
#include "lvexp/rng.hpp"

namespace lvexp {

struct MCConfig {
    std::size_t n_paths = 10000;
    std::size_t n_steps = 256;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

inline BrownianPath simulate_brownian(double T, std::size_t n_steps, std::uint64_t seed,
                                      std::uint64_t path_index) {
    if (!(T > 0.0) || n_steps < 1) throw DomainError("simulate_brownian: bad arguments");
    CounterRng rng(seed, path_index, kStreamBrownian);
    BrownianPath p;
    p.times.resize(n_steps + 1);
    p.values.resize(n_steps + 1);
    const double dt = T / (double)n_steps, sdt = std::sqrt(dt);
    p.times[0] = 0.0;
    p.values[0] = 0.0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        p.times[i] = (i == n_steps) ? T : i * dt;
        p.values[i] = p.values[i - 1] + sdt * rng.next_normal();
    }
    return p;
}

inline JumpPath simulate_jumps(const JumpParams& jp, double T, std::uint64_t seed,
                               std::uint64_t path_index) {
    JumpPath out;
    CounterRng count_rng(seed, path_index, kStreamJumpCount);
    // Poisson(lambda T) by CDF inversion
    const double lt = jp.lambda * T;
    double u = count_rng.next_uniform();
    double p = std::exp(-lt), cdf = p;
    std::size_t n = 0;
    while (u > cdf && n < 10000) {
        ++n;
        p *= lt / (double)n;
        cdf += p;
    }
    if (n == 0) return out;
    CounterRng time_rng(seed, path_index, kStreamJumpTimes);
    CounterRng size_rng(seed, path_index, kStreamJumpSizes);
    out.jump_times.resize(n);
    out.jump_sizes.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.jump_times[i] = T * time_rng.next_uniform();
    std::sort(out.jump_times.begin(), out.jump_times.end());
    for (std::size_t i = 0; i < n; ++i) out.jump_sizes[i] = jp.gamma + jp.delta * size_rng.next_normal();
    return out;
}

namespace detail {

struct Moments {
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
};

// Chan et al. pairwise-stable merge, applied in fixed block order.
inline Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Moments out;
    out.n = a.n + b.n;
    double d = b.mean - a.mean;
    out.mean = a.mean + d * (double)b.n / (double)out.n;
    out.m2 = a.m2 + b.m2 + d * d * (double)a.n * (double)b.n / (double)out.n;
    return out;
}

inline constexpr std::size_t kBlockSize = 4096;

}  // namespace detail

/** Mean and standard error of f(path_index) over n_paths evaluations. The
 *  reduction runs block-wise (sequential within a block, blocks merged in
 *  index order), so the result is bit-identical for any worker count. */
inline MCEstimate mc_estimate(const std::function<double(std::uint64_t)>& f, const MCConfig& cfg) {
    const std::size_t n = cfg.n_paths;
    const std::size_t n_blocks = (n + detail::kBlockSize - 1) / detail::kBlockSize;
    std::vector<detail::Moments> blocks(n_blocks);
    auto run_block = [&](std::size_t b) {
        std::size_t lo = b * detail::kBlockSize, hi = std::min(n, lo + detail::kBlockSize);
        detail::Moments m;
        for (std::size_t i = lo; i < hi; ++i) {
            double v = f((std::uint64_t)i);
            ++m.n;
            double d = v - m.mean;
            m.mean += d / (double)m.n;
            m.m2 += d * (v - m.mean);
        }
        blocks[b] = m;
    };
    unsigned workers = std::max(1u, cfg.workers);
    if (workers == 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::size_t per = (n_blocks + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            std::size_t lo = w * per, hi = std::min(n_blocks, lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t b = lo; b < hi; ++b) run_block(b);
            });
        }
        for (auto& t : pool) t.join();
    }
    detail::Moments total;
    for (const auto& m : blocks) total = detail::merge(total, m);
    MCEstimate out;
    out.n = total.n;
    out.mean = total.mean;
    out.std_error = total.n > 1 ? std::sqrt(total.m2 / (double)(total.n - 1) / (double)total.n) : 0.0;
    return out;
}

/** MC estimate of the first-order correction expectation
 *  E[1{X0_T > ln K} e^{X0_T} X1_T], using the reduced X1 evaluator of the
 *  configured model (direct-system evaluator for polynomials of degree > 1). */
inline MCEstimate mc_correction(const ValidatedContext& ctx, const MCConfig& cfg,
                                Mode mode = Mode::kDefault) {
    const auto& p = ctx.params;
    const double lnk = std::log(p.strike);
    const bool is_exp = std::holds_alternative<ExponentialVol>(ctx.model);
    const bool is_linear = !is_exp && std::get<PolynomialVol>(ctx.model).coeffs.size() <= 2;
    ExpConstants ec;
    LinearBetas lb;
    if (is_exp) ec = exp_constants(ctx, mode);
    else if (is_linear) lb = linear_betas(ctx, mode);
    auto f = model_f(ctx), df = model_df(ctx);
    auto one = [&](std::uint64_t i) {
        BrownianPath w = simulate_brownian(p.maturity, cfg.n_steps, cfg.seed, i);
        double x0t = eval_x0(p.maturity, w.values.back(), ctx);
        if (!(x0t > lnk)) return 0.0;
        double x1;
        if (ctx.jumps) {
            JumpPath j = simulate_jumps(*ctx.jumps, p.maturity, cfg.seed, i);
            if (is_exp) x1 = eval_x1_exp_jump(w, j, ctx, ec, *ctx.jumps);
            else if (is_linear) x1 = eval_x1_linear_jump(w, j, ctx, lb, *ctx.jumps);
            else x1 = eval_x1_direct(w, &j, ctx, f, df, 1, -1.0).first;
        } else {
            if (is_exp) x1 = eval_x1_exp(w, ctx, ec);
            else if (is_linear) x1 = eval_x1_linear(w, ctx, lb);
            else x1 = eval_x1_direct(w, nullptr, ctx, f, df, 1).first;
        }
        return std::exp(x0t) * x1;
    };
    return mc_estimate(one, cfg);
}

/** Euler-Maruyama path of the full (unexpanded) log-return SDE
 *  dX = (r - sigma_eps(X)^2/2) dt + sigma_eps(X) dW [+ eps jump terms],
 *  sigma_eps(x) = sigma0 + eps sigma1 f(x), on the driver's grid. Jump times
 *  must already be grid points when pathwise accuracy matters. */
inline std::vector<double> euler_log_path(const ValidatedContext& ctx, double eps,
                                          const BrownianPath& w, const JumpPath* jumps,
                                          double jump_sign = 1.0) {
    const auto& p = ctx.params;
    auto f = model_f(ctx);
    std::vector<double> x(w.times.size());
    x[0] = ctx.derived.x0;
    double kap = (jumps && ctx.jumps) ? ctx.jumps->compensator_rate() : 0.0;
    std::size_t jidx = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double dt = w.times[i + 1] - w.times[i];
        double dw = w.values[i + 1] - w.values[i];
        double sig = p.sigma0 + eps * p.sigma1 * f(x[i]);
        double xn = x[i] + (p.rate - 0.5 * sig * sig) * dt + sig * dw;
        if (jumps) {
            xn += eps * jump_sign * kap * dt;
            while (jidx < jumps->count() && jumps->jump_times[jidx] <= w.times[i + 1]) {
                xn += eps * jumps->jump_sizes[jidx];
                ++jidx;
            }
        }
        x[i + 1] = xn;
    }
    return x;
}

// Uniform grid over [0, T] augmented with the jump times of j.
inline std::vector<double> augmented_grid(double T, std::size_t n_steps, const JumpPath* j) {
    std::vector<double> g(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) g[i] = T * (double)i / (double)n_steps;
    if (j) {
        g.insert(g.end(), j->jump_times.begin(), j->jump_times.end());
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    }
    return g;
}

/** Terminal samples X^eps_T of the full SDE across cfg.n_paths paths. */
inline std::vector<double> euler_full_sde(const ValidatedContext& ctx, double eps,
                                          const MCConfig& cfg, double jump_sign = 1.0) {
    const auto& p = ctx.params;
    std::vector<double> out(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        JumpPath j;
        const JumpPath* jp = nullptr;
        if (ctx.jumps) {
            j = simulate_jumps(*ctx.jumps, p.maturity, cfg.seed, i);
            jp = &j;
        }
        auto grid = augmented_grid(p.maturity, cfg.n_steps, jp);
        CounterRng rng(cfg.seed, i, kStreamBrownian);
        BrownianPath w;
        w.times = grid;
        w.values.assign(grid.size(), 0.0);
        for (std::size_t k = 1; k < grid.size(); ++k)
            w.values[k] = w.values[k - 1] + std::sqrt(grid[k] - grid[k - 1]) * rng.next_normal();
        out[i] = euler_log_path(ctx, eps, w, jp, jump_sign).back();
    }
    return out;
}

/** Scalar stochastic (Doleans-Dade) exponential on the driver's grid:
 *  Phi_t = exp(int (A - B^2/2) ds + int B dW) * prod_{tau<=t} (1+dX) e^{-dX},
 *  with A, B sampled at the grid points (left-point integration). */
inline std::vector<double> stochastic_exponential(const BrownianPath& w,
                                                  const std::vector<double>& a,
                                                  const std::vector<double>& b,
                                                  const JumpPath* jumps = nullptr) {
    if (a.size() != w.times.size() || b.size() != w.times.size())
        throw DomainError("stochastic_exponential: coefficient grids must match the path grid");
    std::vector<double> phi(w.times.size());
    double expo = 0.0, jump_factor = 1.0;
    std::size_t jidx = 0;
    phi[0] = 1.0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        double dt = w.times[i + 1] - w.times[i];
        double dw = w.values[i + 1] - w.values[i];
        expo += (a[i] - 0.5 * b[i] * b[i]) * dt + b[i] * dw;
        if (jumps) {
            while (jidx < jumps->count() && jumps->jump_times[jidx] <= w.times[i + 1]) {
                double dx = jumps->jump_sizes[jidx];
                jump_factor *= (1.0 + dx) * std::exp(-dx);
                ++jidx;
            }
        }
        phi[i + 1] = std::exp(expo) * jump_factor;
    }
    return phi;
}

}  // namespace lvexp
