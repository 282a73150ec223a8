#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "lvexp/gaussian.hpp"
#include "lvexp/models.hpp"

namespace lvexp {

enum class QuadKind { kLegendre, kHermite };

/** One-dimensional Gaussian quadrature rule. Legendre rules live on [-1,1]
 *  (weights sum to 2); Hermite rules are probabilists', normalized against
 *  the standard normal measure (weights sum to 1). */
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadKind kind;
};

inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    QuadRule r;
    r.kind = QuadKind::kLegendre;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-style initial guess, polished by Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

// Probabilists' Hermite polynomial He_n(x) by the three-term recurrence.
inline double hermite_he(int n, double x) {
    if (n == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < n; ++k) {
        double p2 = x * p1 - k * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

inline QuadRule gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: n must be >= 1");
    QuadRule r;
    r.kind = QuadKind::kHermite;
    if (n == 1) {
        r.nodes = {0.0};
        r.weights = {1.0};
        return r;
    }
    // Bracket the roots of He_n by a sign scan, then bisect + Newton polish.
    const double L = std::sqrt(4.0 * n + 3.0) + 1.0;
    const int grid = 60 * n;
    // Half-step offset keeps grid points away from the exact root at zero
    // that every odd-order polynomial has.
    double prev_x = -L, prev_v = hermite_he(n, prev_x);
    for (int g = 1; g <= grid && (int)r.nodes.size() < n; ++g) {
        double x = -L + 2.0 * L * (g - 0.5) / grid;
        double v = hermite_he(n, x);
        if (v == 0.0 || (v > 0) != (prev_v > 0)) {
            double a = prev_x, b = x;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (a + b);
                double vm = hermite_he(n, mid);
                if (vm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((vm > 0) == (prev_v > 0)) a = mid;
                else b = mid;
            }
            double root = 0.5 * (a + b);
            for (int it = 0; it < 8; ++it) {
                double f = hermite_he(n, root);
                double fp = n * hermite_he(n - 1, root);
                if (fp == 0.0) break;
                double dx = f / fp;
                root -= dx;
                if (std::abs(dx) < 1e-16 * (1.0 + std::abs(root))) break;
            }
            r.nodes.push_back(root);
        }
        prev_x = x;
        prev_v = v;
    }
    if ((int)r.nodes.size() != n) throw std::runtime_error("gauss_hermite: root search failed");
    // Christoffel weights for the orthonormal family He_k/sqrt(k!)
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = r.nodes[i];
        double s = 0.0, fact = 1.0;
        double p0 = 1.0, p1 = x;
        s += 1.0;  // k = 0
        for (int k = 1; k < n; ++k) {
            fact *= k;
            s += p1 * p1 / fact;
            double p2 = x * p1 - k * p0;
            p0 = p1;
            p1 = p2;
        }
        r.weights[i] = 1.0 / s;
    }
    return r;
}

// Rescale a [-1,1] Legendre rule onto [a,b].
inline void map_legendre(const QuadRule& gl, double a, double b, std::vector<double>& nodes,
                         std::vector<double>& weights) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    nodes.resize(gl.nodes.size());
    weights.resize(gl.nodes.size());
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        nodes[i] = c + h * gl.nodes[i];
        weights[i] = h * gl.weights[i];
    }
}

enum class Indicator { kEnabled, kDisabled };

namespace detail {

// Paper's d(a) helper (note the paper's d1/d2 naming inverts the textbook one).
inline double paper_d(const ValidatedContext& ctx, double a) {
    const auto& p = ctx.params;
    return (std::log(p.s0 / p.strike) + (p.rate - 0.5 * p.sigma0 * p.sigma0 * a) * p.maturity) /
           (p.sigma0 * std::sqrt(p.maturity));
}

/** E[e^L 1{u > theta}] for jointly Gaussian (L, u), both centered, computed as
 *  a 1-D integral over u = the indicator direction with the conditional
 *  expectation E[e^L | u] integrated analytically. The integrand concentrates
 *  around the tilted mean cov(L,u); the window is truncated at 12 standard
 *  deviations (tail mass < 1e-30). */
inline double halfspace_mgf(double var_L, double cov, double var_u, double theta,
                            const QuadRule& gl) {
    const double su = std::sqrt(var_u);
    const double rho = cov / var_u;
    const double resid = var_L - cov * cov / var_u;
    double lo = std::max(theta, cov - 12.0 * su);
    double hi = cov + 12.0 * su;
    if (!(lo < hi)) return 0.0;
    double acc = 0.0;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double u = c + h * gl.nodes[i];
        acc += h * gl.weights[i] * std::exp(rho * u + 0.5 * resid) * norm_pdf(u / su) / su;
    }
    return acc;
}

// Same as halfspace_mgf with closed-form inner integral; used for cross-checks.
inline double halfspace_mgf_closed(double var_L, double cov, double var_u, double theta) {
    if (theta == -std::numeric_limits<double>::infinity()) return std::exp(0.5 * var_L);
    return std::exp(0.5 * var_L) * norm_cdf((cov - theta) / std::sqrt(var_u));
}

inline double exp_alpha(const ValidatedContext& ctx) {
    const auto* e = std::get_if<ExponentialVol>(&ctx.model);
    if (!e) throw DomainError("exponential model required");
    return e->alpha;
}

inline double minus_inf() { return -std::numeric_limits<double>::infinity(); }

}  // namespace detail

/** I1(s,T,a): time integral of the half-space Gaussian double integral with
 *  integrand e^{a mu s} e^{sigma0 x} e^{(1+a) sigma0 y}, x ~ N(0,T-s),
 *  y ~ N(0,s). Default mode places the payoff indicator at x+y > -sqrt(T) d(1)
 *  (proof-consistent); paper-literal reproduces the printed +sqrt(T) d2. */
inline double integral_I1(const ValidatedContext& ctx, double a, int n_time, int n_space,
                          Mode mode = Mode::kDefault, Indicator ind = Indicator::kEnabled) {
    if (n_time < 1 || n_space < 1) throw DomainError("integral_I1: node counts must be >= 1");
    const auto& p = ctx.params;
    const double T = p.maturity, s0q = p.sigma0 * p.sigma0;
    double theta;
    if (ind == Indicator::kDisabled) theta = detail::minus_inf();
    else if (mode == Mode::kDefault) theta = -std::sqrt(T) * detail::paper_d(ctx, 1.0);
    else theta = std::sqrt(T) * (detail::paper_d(ctx, 1.0) + p.sigma0 * std::sqrt(T));
    const QuadRule gt = gauss_legendre(n_time), gu = gauss_legendre(n_space);
    std::vector<double> sn, sw;
    map_legendre(gt, 0.0, T, sn, sw);
    double acc = 0.0;
    for (std::size_t i = 0; i < sn.size(); ++i) {
        double s = sn[i];
        double var_L = s0q * (T - s) + (1.0 + a) * (1.0 + a) * s0q * s;
        double cov = p.sigma0 * (T - s) + (1.0 + a) * p.sigma0 * s;
        acc += sw[i] * std::exp(a * ctx.derived.mu * s) * detail::halfspace_mgf(var_L, cov, T, theta, gu);
    }
    return acc;
}

/** I2(s,T): as printed, with chain densities phi(x;y,T-s) phi(y;0,s) and
 *  integrand e^{alpha mu s + (2 alpha + 1) sigma0 y + (alpha + 1) sigma0 x},
 *  indicator on x+y > -sqrt(T) d(1). */
inline double integral_I2(const ValidatedContext& ctx, int n_time, int n_space,
                          Indicator ind = Indicator::kEnabled) {
    if (n_time < 1 || n_space < 1) throw DomainError("integral_I2: node counts must be >= 1");
    const double al = detail::exp_alpha(ctx);
    const auto& p = ctx.params;
    const double T = p.maturity, s0q = p.sigma0 * p.sigma0;
    const double theta = (ind == Indicator::kDisabled)
                             ? detail::minus_inf()
                             : -std::sqrt(T) * detail::paper_d(ctx, 1.0);
    const QuadRule gt = gauss_legendre(n_time), gu = gauss_legendre(n_space);
    std::vector<double> sn, sw;
    map_legendre(gt, 0.0, T, sn, sw);
    // With x | y ~ N(y, T-s): write x = y + xi. Then u = x + y = 2y + xi and
    // L = sigma0 ((3 alpha + 2) y + (alpha + 1) xi).
    double acc = 0.0;
    const double c1 = 3.0 * al + 2.0, c2 = al + 1.0;
    for (std::size_t i = 0; i < sn.size(); ++i) {
        double s = sn[i];
        double var_u = 4.0 * s + (T - s);
        double var_L = s0q * (c1 * c1 * s + c2 * c2 * (T - s));
        double cov = p.sigma0 * (2.0 * s * c1 + (T - s) * c2);
        acc += sw[i] * std::exp(al * ctx.derived.mu * s) *
               detail::halfspace_mgf(var_L, cov, var_u, theta, gu);
    }
    return acc;
}

/** I3(r,s,T): the doubly-nested (r < s < T) variant with three chained
 *  Gaussian layers and indicator on x+y+z > -sqrt(T) d(1). */
inline double integral_I3(const ValidatedContext& ctx, int n_time, int n_space,
                          Indicator ind = Indicator::kEnabled) {
    if (n_time < 1 || n_space < 1) throw DomainError("integral_I3: node counts must be >= 1");
    const double al = detail::exp_alpha(ctx);
    const auto& p = ctx.params;
    const double T = p.maturity, s0q = p.sigma0 * p.sigma0;
    const double theta = (ind == Indicator::kDisabled)
                             ? detail::minus_inf()
                             : -std::sqrt(T) * detail::paper_d(ctx, 1.0);
    const QuadRule gt = gauss_legendre(n_time), gu = gauss_legendre(n_space);
    std::vector<double> sn, sw, rn, rw;
    map_legendre(gt, 0.0, T, sn, sw);
    // z ~ N(0,r), y = z + eta, x = y + xi. Then u = x+y+z = 3z + 2 eta + xi and
    // L = sigma0 ((3 + 3 alpha) z + (2 + alpha) eta + xi).
    const double cz = 3.0 + 3.0 * al, ce = 2.0 + al;
    double acc = 0.0;
    for (std::size_t i = 0; i < sn.size(); ++i) {
        double s = sn[i];
        map_legendre(gt, 0.0, s, rn, rw);
        double inner = 0.0;
        for (std::size_t j = 0; j < rn.size(); ++j) {
            double r = rn[j];
            double var_u = 9.0 * r + 4.0 * (s - r) + (T - s);
            double var_L = s0q * (cz * cz * r + ce * ce * (s - r) + (T - s));
            double cov = p.sigma0 * (3.0 * cz * r + 2.0 * ce * (s - r) + (T - s));
            inner += rw[j] * std::exp(al * ctx.derived.mu * (s + r)) *
                     detail::halfspace_mgf(var_L, cov, var_u, theta, gu);
        }
        acc += sw[i] * inner;
    }
    return acc;
}

/** I(s,T): time integral of E[e^{sigma0 (x+y)} y 1{x+y > -sqrt(T) d(1)}] with
 *  x ~ N(0,T-s), y ~ N(0,s) independent (the linear-model correction kernel). */
inline double integral_I(const ValidatedContext& ctx, int n_time, int n_space,
                         Indicator ind = Indicator::kEnabled) {
    if (n_time < 1 || n_space < 1) throw DomainError("integral_I: node counts must be >= 1");
    const auto& p = ctx.params;
    const double T = p.maturity;
    const double theta = (ind == Indicator::kDisabled)
                             ? detail::minus_inf()
                             : -std::sqrt(T) * detail::paper_d(ctx, 1.0);
    const QuadRule gt = gauss_legendre(n_time), gu = gauss_legendre(n_space);
    std::vector<double> sn, sw;
    map_legendre(gt, 0.0, T, sn, sw);
    // E[y | u] = (s/T) u, so the y factor reduces to a linear weight in u.
    const double su = std::sqrt(T), tilt = p.sigma0 * T;
    double lo = std::max(theta, tilt - 12.0 * su), hi = tilt + 12.0 * su;
    if (!(lo < hi)) return 0.0;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double base = 0.0, moment = 0.0;  // integrals of e^{s0 u} phi and u e^{s0 u} phi
    for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
        double u = c + h * gu.nodes[i];
        double w = h * gu.weights[i] * std::exp(p.sigma0 * u) * norm_pdf(u / su) / su;
        base += w;
        moment += w * u;
    }
    (void)base;
    double acc = 0.0;
    for (std::size_t i = 0; i < sn.size(); ++i) acc += sw[i] * (sn[i] / T) * moment;
    return acc;
}

}  // namespace lvexp
