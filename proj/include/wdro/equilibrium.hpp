#pragma once

#include "wdro/discounting.hpp"

namespace wdro {

/// GBM shock dX = sigma X dW with constant-elasticity inverse demand
/// P = X q^(-1/gamma) and unit capacity cost K.
struct MarketParams {
    double sigma;
    double gamma;
    double K;

    /// Validates sigma > 0, gamma > 1, K > 0.
    static MarketParams make(double sigma, double gamma, double K);
    static MarketParams from_config(const ConfigBlock& block);
};

/// Positive root of sigma^2 theta^2 / 2 - sigma^2 theta / 2 - r = 0.
double theta(double r, double sigma);

/// The four F-moments entering the smooth-pasting solution.
struct RateMoments {
    double theta;   // ∫ theta(r) dF
    double rate;    // ∫ r dF
    double tmor;    // ∫ (theta(r) - 1) / r dF
    double recip;   // ∫ 1/r dF

    /// ∫theta dF - ∫r dF * ∫(theta-1)/r dF; the candidate is an equilibrium
    /// iff this is >= 0.
    double sp_margin() const noexcept { return theta - rate * tmor; }
};

RateMoments rate_moments(const WeightingDistribution& F, double sigma);

/// Whether callers accept the raw smooth-pasting candidate when the
/// validity margin is negative.
enum class Candidate { RequireValid, AllowInvalid };

/// Which closed-form branch to evaluate. Auto picks continuation for
/// x <= x*(q) and expansion otherwise; forcing a branch evaluates its
/// analytic extension (used by finite-difference stencils).
enum class Branch { Auto, Continuation, Expansion };

/// Immutable equilibrium data for a (F, market) pair.
class EquilibriumModel {
public:
    const WeightingDistribution& distribution() const noexcept { return F_; }
    const MarketParams& market() const noexcept { return market_; }
    const RateMoments& moments() const noexcept { return moments_; }

    double m_theta() const noexcept { return moments_.theta; }
    double m_rate() const noexcept { return moments_.rate; }
    double m_tmor() const noexcept { return moments_.tmor; }
    double m_recip() const noexcept { return moments_.recip; }
    double iota() const noexcept { return iota_; }
    double sp_margin() const noexcept { return sp_margin_; }
    /// A zero margin counts as holding.
    bool sp_holds() const noexcept { return sp_margin_ >= 0.0; }

private:
    friend EquilibriumModel build_model(WeightingDistribution F, MarketParams market);

    EquilibriumModel(WeightingDistribution F, MarketParams market, RateMoments moments);

    WeightingDistribution F_;
    MarketParams market_;
    RateMoments moments_;
    double iota_;
    double sp_margin_;
};

/// Throws ValidationError if gamma >= theta(min support rate): the value
/// function would be infinite.
EquilibriumModel build_model(WeightingDistribution F, MarketParams market);

/// Throws SpValidityError unless the model is valid or `mode` allows the
/// raw candidate.
void require_valid(const EquilibriumModel& model, Candidate mode);

/// Trigger x*(q) = iota gamma/(gamma-1) q^(1/gamma) K.
double x_star(const EquilibriumModel& model, double q, Candidate mode = Candidate::RequireValid);

/// Output level whose trigger is x (inverse of x_star).
double q_tilde(const EquilibriumModel& model, double x);

// Per-rate components w(x, q; r) of the candidate. These describe the
// candidate barrier policy regardless of validity.
double w_q_marginal(const EquilibriumModel& model, double x, double q, double r,
                    Branch branch = Branch::Auto);
double w_value(const EquilibriumModel& model, double x, double q, double r,
               Branch branch = Branch::Auto);

/// dV/dq = ∫ dw/dq dF; equals K in the expansion region.
double v_q_marginal(const EquilibriumModel& model, double x, double q,
                    Candidate mode = Candidate::RequireValid, Branch branch = Branch::Auto);

/// V = ∫ w dF.
double v_value(const EquilibriumModel& model, double x, double q,
               Candidate mode = Candidate::RequireValid, Branch branch = Branch::Auto);

/// Time-consistent trigger under exponential discounting at rate r0.
double benchmark_x_o(double r0, const MarketParams& market, double q);

/// Profit flow x q^(1 - 1/gamma).
double profit_flow(const MarketParams& market, double x, double q);

}  // namespace wdro
