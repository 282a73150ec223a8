#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lvexp {

// Thrown on invalid user inputs (bad parameters, bad configuration).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation mode for constants, evaluators and closed-form prices:
// kDefault uses the derivation-consistent formulas validated by the
// direct-system and Monte Carlo oracles; kPaperLiteral evaluates the
// printed formulas verbatim (useful for reproducing the reference tables).
enum class Mode { kDefault, kPaperLiteral };

struct MarketParams {
    double s0;        // spot price, > 0
    double strike;    // strike K, > 0
    double rate;      // risk-free rate r (1/year)
    double maturity;  // T in years, > 0
    double sigma0;    // base volatility, != 0
    double sigma1;    // correction volatility scale
    double eps;       // expansion parameter, >= 0
};

struct ExponentialVol {
    double alpha;  // f(x) = exp(alpha x), alpha != 0
};

struct PolynomialVol {
    std::vector<double> coeffs;  // f(x) = sum_i coeffs[i] x^i, non-empty
};

using VolModel = std::variant<ExponentialVol, PolynomialVol>;

struct JumpParams {
    double lambda;  // Poisson intensity, > 0
    double gamma;   // jump mean
    double delta;   // jump std, > 0

    // kappa = lambda (e^{gamma + delta^2/2} - 1), the compensator rate
    double compensator_rate() const { return lambda * (std::exp(gamma + 0.5 * delta * delta) - 1.0); }
};

struct DerivedParams {
    double x0;  // log-spot
    double mu;  // risk-neutral log drift = rate - sigma0^2/2
};

inline double risk_neutral_drift(const MarketParams& p) {
    return p.rate - 0.5 * p.sigma0 * p.sigma0;
}

struct ValidatedContext {
    MarketParams params;
    VolModel model;
    std::optional<JumpParams> jumps;
    DerivedParams derived;
};

inline ValidatedContext validate_params(const MarketParams& params, const VolModel& model,
                                        const std::optional<JumpParams>& jumps = std::nullopt) {
    if (!(params.s0 > 0.0)) throw DomainError("s0 must be > 0");
    if (!(params.strike > 0.0)) throw DomainError("strike must be > 0");
    if (!(params.maturity > 0.0)) throw DomainError("maturity must be > 0");
    if (params.sigma0 == 0.0 || !std::isfinite(params.sigma0)) throw DomainError("sigma0 must be nonzero");
    if (!(params.eps >= 0.0)) throw DomainError("eps must be >= 0");
    if (const auto* e = std::get_if<ExponentialVol>(&model)) {
        if (e->alpha == 0.0 || !std::isfinite(e->alpha)) throw DomainError("alpha must be nonzero");
    } else {
        const auto& po = std::get<PolynomialVol>(model);
        if (po.coeffs.empty()) throw DomainError("polynomial coefficient vector must be non-empty");
    }
    if (jumps) {
        if (!(jumps->lambda > 0.0)) throw DomainError("lambda must be > 0");
        if (!(jumps->delta > 0.0)) throw DomainError("delta must be > 0");
        if (!std::isfinite(jumps->compensator_rate())) throw DomainError("compensator must be finite");
    }
    double x0 = std::log(params.s0);
    if (!std::isfinite(x0)) throw DomainError("log(s0) must be finite");
    return ValidatedContext{params, model, jumps, DerivedParams{x0, risk_neutral_drift(params)}};
}

}  // namespace lvexp
