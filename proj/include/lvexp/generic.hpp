#pragma once

#include <cmath>
#include <optional>

#include "lvexp/montecarlo.hpp"
#include "lvexp/pce.hpp"
#include "lvexp/pricing.hpp"

namespace lvexp {

enum class EstimatorMethod { kMonteCarlo, kPce };

struct GenericConfig {
    MCConfig mc;
    int pce_degree = 15;
    int pce_time_nodes = 64;
};

/** First-order price from an estimator of the correction expectation:
 *  base + eps e^{-rT} E[1{X0_T > ln K} e^{X0_T} X1_T]. */
inline PriceBreakdown price_generic_o1(const ValidatedContext& ctx, EstimatorMethod method,
                                       const GenericConfig& cfg = {}, Mode mode = Mode::kDefault,
                                       MCEstimate* estimate_out = nullptr) {
    const auto& p = ctx.params;
    PriceBreakdown out;
    out.base = bs_price(ctx);
    const double disc = std::exp(-p.rate * p.maturity);
    if (method == EstimatorMethod::kMonteCarlo) {
        MCEstimate est = mc_correction(ctx, cfg.mc, mode);
        if (estimate_out) *estimate_out = est;
        out.terms.push_back({"correction_mc", 1, disc * est.mean});
    } else {
        double corr = pce_correction(ctx, cfg.pce_degree, cfg.pce_time_nodes, mode);
        out.terms.push_back({"correction_pce", 1, disc * corr});
    }
    out.finalize(p.eps);
    return out;
}

}  // namespace lvexp
