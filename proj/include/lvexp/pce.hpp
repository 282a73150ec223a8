#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lvexp/expansion.hpp"
#include "lvexp/gaussian.hpp"
#include "lvexp/models.hpp"
#include "lvexp/quadrature.hpp"

namespace lvexp {

// Probabilists' Hermite polynomial He_k(x).
inline double hermite_eval(int k, double x) { return hermite_he(k, x); }

/** Multi-element PCE over m independent standard Gaussians. Elements are
 *  slabs split along the first germ dimension (the only discontinuity we
 *  handle is a half-space indicator, rotated to be axis-aligned). */
struct PCEElement {
    double lo, hi;               // bounds on dimension 0
    double weight;               // P(lo < xi_0 < hi)
    std::vector<double> coeffs;  // (degree+1)^dim tensor, dim-0 index fastest
};

struct PCEApprox {
    int degree = 0;
    int dim = 1;
    std::vector<PCEElement> elements;
};

namespace detail {

// Quadrature for the standard normal measure restricted to (lo, hi):
// Gauss-Hermite when unbounded on both sides, otherwise phi-weighted
// Legendre on the +-8 sigma truncation of the interval.
inline void element_rule(double lo, double hi, int n, std::vector<double>& nodes,
                         std::vector<double>& weights) {
    const double inf = std::numeric_limits<double>::infinity();
    if (lo == -inf && hi == inf) {
        QuadRule gh = gauss_hermite(n);
        nodes = gh.nodes;
        weights = gh.weights;
        return;
    }
    double a = std::max(lo, -8.0), b = std::min(hi, 8.0);
    nodes.clear();
    weights.clear();
    if (!(a < b)) return;
    // Composite rule: unit-width panels keep the Gaussian weight resolved to
    // machine precision even on wide truncated elements.
    QuadRule gl = gauss_legendre(n);
    const int panels = std::max(1, (int)std::ceil(b - a));
    std::vector<double> pn, pw;
    for (int p = 0; p < panels; ++p) {
        double pa = a + (b - a) * p / panels, pb = a + (b - a) * (p + 1) / panels;
        map_legendre(gl, pa, pb, pn, pw);
        for (std::size_t i = 0; i < pn.size(); ++i) {
            nodes.push_back(pn[i]);
            weights.push_back(pw[i] * norm_pdf(pn[i]));
        }
    }
}

}  // namespace detail

/** Project g onto the per-element Hermite chaos basis: within each element,
 *  c_k = E[g * prod He_{k_d}(xi_d) | element] / prod k_d!. splits lists the
 *  cut points along dimension 0 (empty for a single global element). */
inline PCEApprox pce_project(const std::function<double(const std::vector<double>&)>& g, int dim,
                             int degree, const std::vector<double>& splits, int n_quad = 0) {
    if (dim < 1 || dim > 3) throw DomainError("pce_project: dim must be in 1..3");
    if (degree < 0 || degree > 30) throw DomainError("pce_project: degree must be in 0..30");
    for (std::size_t i = 1; i < splits.size(); ++i)
        if (!(splits[i] > splits[i - 1])) throw DomainError("pce_project: splits must increase");
    if (n_quad <= 0) n_quad = degree + 10;
    const double inf = std::numeric_limits<double>::infinity();
    PCEApprox out;
    out.degree = degree;
    out.dim = dim;
    std::vector<double> bounds{-inf};
    bounds.insert(bounds.end(), splits.begin(), splits.end());
    bounds.push_back(inf);

    const int p1 = degree + 1;
    QuadRule gh = gauss_hermite(n_quad);  // shared rule for dims >= 1
    std::vector<double> fact(p1, 1.0);
    for (int k = 1; k < p1; ++k) fact[k] = fact[k - 1] * k;

    for (std::size_t e = 0; e + 1 < bounds.size(); ++e) {
        PCEElement el;
        el.lo = bounds[e];
        el.hi = bounds[e + 1];
        el.weight = norm_cdf(el.hi == inf ? 40.0 : el.hi) - norm_cdf(el.lo == -inf ? -40.0 : el.lo);
        std::size_t n_coeff = 1;
        for (int d = 0; d < dim; ++d) n_coeff *= p1;
        el.coeffs.assign(n_coeff, 0.0);
        std::vector<double> n0, w0;
        detail::element_rule(el.lo, el.hi, n_quad, n0, w0);
        if (!n0.empty() && el.weight > 0.0) {
            // Hermite values at every node, per dimension
            auto he_table = [&](const std::vector<double>& nodes) {
                std::vector<double> t(nodes.size() * p1);
                for (std::size_t i = 0; i < nodes.size(); ++i)
                    for (int k = 0; k < p1; ++k) t[i * p1 + k] = hermite_eval(k, nodes[i]);
                return t;
            };
            std::vector<double> he0 = he_table(n0), heh = he_table(gh.nodes);
            std::vector<double> xi(dim);
            std::vector<std::size_t> idx(dim, 0);
            // iterate the tensor grid of quadrature nodes
            std::vector<std::size_t> sizes(dim, gh.nodes.size());
            sizes[0] = n0.size();
            bool done = false;
            while (!done) {
                double wq = w0[idx[0]];
                xi[0] = n0[idx[0]];
                for (int d = 1; d < dim; ++d) {
                    xi[d] = gh.nodes[idx[d]];
                    wq *= gh.weights[idx[d]];
                }
                double gv = g(xi) * wq;
                if (gv != 0.0) {
                    // accumulate gv * prod He_k(xi_d) into every coefficient
                    std::vector<int> k(dim, 0);
                    for (std::size_t c = 0; c < n_coeff; ++c) {
                        std::size_t rest = c;
                        double basis = 1.0;
                        for (int d = 0; d < dim; ++d) {
                            int kd = (int)(rest % p1);
                            rest /= p1;
                            basis *= (d == 0 ? he0[idx[0] * p1 + kd] : heh[idx[d] * p1 + kd]);
                        }
                        el.coeffs[c] += gv * basis;
                    }
                    (void)k;
                }
                for (int d = 0;; ++d) {
                    if (d == dim) {
                        done = true;
                        break;
                    }
                    if (++idx[d] < sizes[d]) break;
                    idx[d] = 0;
                }
            }
            for (std::size_t c = 0; c < n_coeff; ++c) {
                std::size_t rest = c;
                double norm = el.weight;
                for (int d = 0; d < dim; ++d) {
                    norm *= fact[rest % p1];
                    rest /= p1;
                }
                el.coeffs[c] /= norm;
            }
        }
        out.elements.push_back(std::move(el));
    }
    return out;
}

inline double pce_mean(const PCEApprox& a) {
    double m = 0.0;
    for (const auto& e : a.elements) m += e.weight * (e.coeffs.empty() ? 0.0 : e.coeffs[0]);
    return m;
}

/** PCE estimate of the correction expectation E[1{X0_T > ln K} e^{X0_T} X1_T]
 *  for the exponential or linear model. Terminal terms use a 1-D germ
 *  xi = W_T/sqrt(T) split at the payoff boundary; time-integral terms use an
 *  outer Legendre rule in s with a 2-D germ per node, rotated so the indicator
 *  depends on the first coordinate only; jump terms fold in analytically. */
inline double pce_correction(const ValidatedContext& ctx, int degree, int n_time_nodes,
                             Mode mode = Mode::kDefault) {
    const auto& p = ctx.params;
    const double T = p.maturity, rT = std::sqrt(T);
    const double x0 = ctx.derived.x0, mu = ctx.derived.mu, s0v = p.sigma0;
    const double theta = (std::log(p.strike) - x0 - mu * T) / (s0v * rT);
    auto xT = [&](double eta1) { return x0 + mu * T + s0v * rT * eta1; };

    // E[1_D e^{c X0_T}] by 1-D two-element PCE
    auto terminal_moment = [&](double c) {
        auto g = [&](const std::vector<double>& xi) {
            return xi[0] > theta ? std::exp(c * xT(xi[0])) : 0.0;
        };
        return pce_mean(pce_project(g, 1, degree, {theta}));
    };

    const bool is_exp = std::holds_alternative<ExponentialVol>(ctx.model);
    double result = 0.0;
    QuadRule gt = gauss_legendre(n_time_nodes);
    std::vector<double> sn, sw;
    map_legendre(gt, 0.0, T, sn, sw);

    if (is_exp) {
        const double alpha = std::get<ExponentialVol>(ctx.model).alpha;
        auto ec = exp_constants(ctx, mode);
        // time-integral term: K * int_0^T E[1_D e^{X0_T + alpha X0_s}] ds
        double ti = 0.0;
        for (std::size_t i = 0; i < sn.size(); ++i) {
            double s = sn[i];
            auto g = [&](const std::vector<double>& xi) {
                if (!(xi[0] > theta)) return 0.0;
                double ws = (s * rT * xi[0] + std::sqrt(s * (T - s)) * rT * xi[1]) / T;
                double x0s = x0 + mu * s + s0v * ws;
                return std::exp(xT(xi[0]) + alpha * x0s);
            };
            ti += sw[i] * pce_mean(pce_project(g, 2, degree, {theta}));
        }
        result = ec.k_alpha * ti + ec.q * terminal_moment(1.0 + alpha) -
                 ec.q * ec.b * terminal_moment(1.0);
        if (ctx.jumps)
            result += (ctx.jumps->compensator_rate() * T + ctx.jumps->lambda * T * ctx.jumps->gamma) *
                      terminal_moment(1.0);
        return result;
    }

    if (std::get<PolynomialVol>(ctx.model).coeffs.size() > 2)
        throw DomainError("pce_correction: polynomial degree must be <= 1");
    auto b = linear_betas(ctx, mode);
    // terminal part: 1-D functional of W_T
    auto g1 = [&](const std::vector<double>& xi) {
        if (!(xi[0] > theta)) return 0.0;
        double wT = rT * xi[0];
        double x1t = b.beta1 * T + b.beta2 * T * T + b.beta3 * wT + b.beta4 * wT * wT +
                     b.beta5 * T * wT;
        return std::exp(xT(xi[0])) * x1t;
    };
    result = pce_mean(pce_project(g1, 1, degree, {theta}));
    // running-Brownian part: -beta6 int_0^T E[1_D e^{X0_T} W_s] ds
    double ti = 0.0;
    for (std::size_t i = 0; i < sn.size(); ++i) {
        double s = sn[i];
        auto g = [&](const std::vector<double>& xi) {
            if (!(xi[0] > theta)) return 0.0;
            double ws = (s * rT * xi[0] + std::sqrt(s * (T - s)) * rT * xi[1]) / T;
            return std::exp(xT(xi[0])) * ws;
        };
        ti += sw[i] * pce_mean(pce_project(g, 2, degree, {theta}));
    }
    result -= b.beta6 * ti;
    if (ctx.jumps)
        result += (-ctx.jumps->compensator_rate() * T + ctx.jumps->lambda * T * ctx.jumps->gamma) *
                  terminal_moment(1.0);
    return result;
}

}  // namespace lvexp
