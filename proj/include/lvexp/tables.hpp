#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lvexp/models.hpp"
#include "lvexp/pricing.hpp"

namespace lvexp {

/** Reference result grids: each table fixes a spot and model and scans
 *  sigma0 in {0.15, 0.25, 0.35} x eps in {0.1, 0.01}. analytical holds the
 *  published "Analytical" column in that scan order. Result ids 13-15 print
 *  the same values as 9-11 despite their captions adding jumps; the
 *  duplication is flagged in the emitted report. */
struct TableSpec {
    int id = 0;
    bool exponential = true;  // else linear (a0 = 0.3, a1 = 0.5)
    double s0 = 0.0;
    bool with_jumps = false;
    bool duplicate_of_nojump = false;  // ids 13-15
    std::vector<double> analytical;    // 6 entries: (sigma0 asc) x (eps 0.1, 0.01)
};

inline const std::vector<double>& table_sigma0_grid() {
    static const std::vector<double> g{0.15, 0.25, 0.35};
    return g;
}

inline const std::vector<double>& table_eps_grid() {
    static const std::vector<double> g{0.1, 0.01};
    return g;
}

// Shared scan parameters: K = 100, r = 0.03, T = 0.5; exponential model has
// alpha = 0.1, sigma1 = 0.15; linear model has a0 = 0.3, a1 = 0.5,
// sigma1 = 0.1; jump variants use lambda = 2, gamma = 0.05, delta = 0.02.
inline MarketParams table_market(const TableSpec& t, double sigma0, double eps) {
    MarketParams p;
    p.s0 = t.s0;
    p.strike = 100.0;
    p.rate = 0.03;
    p.maturity = 0.5;
    p.sigma0 = sigma0;
    p.sigma1 = t.exponential ? 0.15 : 0.1;
    p.eps = eps;
    return p;
}

inline VolModel table_model(const TableSpec& t) {
    if (t.exponential) return ExponentialVol{0.1};
    return PolynomialVol{{0.3, 0.5}};
}

inline std::optional<JumpParams> table_jumps(const TableSpec& t) {
    if (!t.with_jumps) return std::nullopt;
    return JumpParams{2.0, 0.05, 0.02};
}

inline std::optional<TableSpec> table_spec(int id) {
    static const std::vector<TableSpec> specs = {
        {2, true, 90.0, false, false,
         {12.38180, 2.22240, 14.09613, 4.31567, 15.08779, 6.58042}},
        {3, true, 100.0, false, false,
         {39.39600, 8.42541, 28.38116, 9.82235, 25.56320, 12.03973}},
        {4, true, 110.0, false, false,
         {69.70042, 18.07600, 45.21665, 17.54193, 37.87932, 19.09570}},
        {5, true, 90.0, true, false,
         {12.51812, 2.23603, 14.31171, 4.33723, 15.34622, 6.60626}},
        {6, true, 100.0, true, false,
         {39.80797, 8.46660, 28.78634, 9.86287, 25.96991, 12.08041}},
        {7, true, 110.0, true, false,
         {70.37793, 18.14375, 45.81367, 17.60163, 38.43779, 19.15155}},
        {9, false, 90.0, false, false,
         {1.45057, 1.12927, 3.82504, 3.28856, 6.44932, 5.71657}},
        {10, false, 100.0, false, false,
         {5.53650, 5.03945, 8.50577, 7.83481, 11.50225, 10.63364}},
        {11, false, 110.0, false, false,
         {12.70933, 12.37689, 15.16320, 14.53658, 17.99767, 17.10754}},
        {13, false, 90.0, true, true,
         {1.45057, 1.12927, 3.82504, 3.28856, 6.44932, 5.71657}},
        {14, false, 100.0, true, true,
         {5.53650, 5.03945, 8.50577, 7.83481, 11.50225, 10.63364}},
        {15, false, 110.0, true, true,
         {12.70933, 12.37689, 15.16320, 14.53658, 17.99767, 17.10754}},
    };
    for (const auto& s : specs)
        if (s.id == id) return s;
    // ids 8 (parameter listing) and 12 (absent from the source) are not
    // result grids.
    return std::nullopt;
}

/** Reconstruction of the evaluation that generated the published linear-model
 *  grids (ids 9-11 and their 13-15 duplicates). Two conventions separate it
 *  from price_linear_o1 in either mode, both recovered by fitting the grids:
 *
 *  - Units: the grids were produced with spot and strike quoted in tens
 *    (s0/10 against a strike of 10, price scaled back by 10). Black-Scholes
 *    is homogeneous of degree one in (s0, K) so its column is unaffected, but
 *    the log-linear volatility sigma0 + eps sigma1 (a0 + a1 ln S) is not
 *    scale invariant: the rescaling shifts x0 = ln s0 by -ln 10 inside
 *    beta1 and beta3, which is exactly the spot/vol dependence the implied
 *    correction coefficients show.
 *  - The published values use the printed beta3 together with the
 *    derivation-correct expectation argument d(1) + sigma0 sqrt(T) (the
 *    printed formula's d(1) there does not match the lognormal identity
 *    E[1_D e^{X_T}] = s0 e^{rT} N(d(1) + sigma0 sqrt(T)) that the grids
 *    themselves satisfy).
 *
 *  Under this convention all 18 published cells are reproduced within 0.32%
 *  relative; neither pricing mode alone comes within 2%. Returns nullopt for
 *  the exponential grids (ids 2-7), whose published corrections match no
 *  closed-form reading we have found under any units convention. */
inline std::optional<double> published_convention_price(const TableSpec& t, double sigma0,
                                                        double eps) {
    if (t.exponential) return std::nullopt;
    MarketParams p = table_market(t, sigma0, eps);
    p.s0 /= 10.0;
    p.strike /= 10.0;
    ValidatedContext ctx = validate_params(p, table_model(t));
    const double T = p.maturity, rt = std::sqrt(T), s0q = p.sigma0 * p.sigma0;
    auto b = linear_betas(ctx, Mode::kPaperLiteral);
    const double d2 = d_of(ctx, 1.0) + p.sigma0 * rt;
    const double nd = norm_cdf(d2), pd = norm_pdf(d2);
    const double ii = integral_I(ctx, QuadConfig{}.n_time, QuadConfig{}.n_space);
    double c = p.s0 * (b.beta1 + p.sigma0 * b.beta3 + b.beta4) * T * nd;
    c += p.s0 * (b.beta2 + s0q * b.beta4 + p.sigma0 * b.beta5) * T * T * nd;
    c += p.s0 * (b.beta3 + 2.0 * p.sigma0 * b.beta4 * T + T * b.beta5) * rt * pd;
    c += -p.s0 * b.beta4 * T * d2 * pd;
    c += -p.s0 * std::exp(-0.5 * s0q * T) * b.beta6 * ii;
    return 10.0 * (bs_price(ctx) + eps * c);
}

}  // namespace lvexp
