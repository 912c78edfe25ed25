#include "wdro/equilibrium.hpp"

#include "wdro/errors.hpp"

#include <cmath>
#include <sstream>

namespace wdro {
namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(what) + " must be finite and > 0");
}

template <class Real>
Real theta_impl(Real r, Real sigma) {
    const Real s2 = sigma * sigma;
    return (s2 / 2 + std::sqrt(s2 * s2 / 4 + 2 * s2 * r)) / s2;
}

// C(q) x^theta, rewritten as K q (1 - iota/r) gamma/(gamma - theta) (x/x*)^theta.
// gamma/(gamma - theta) amplifies roundoff when theta is close to gamma, so
// that case is evaluated in extended precision.
double continuation_power_term(const EquilibriumModel& model, double ratio, double q, double r) {
    const MarketParams& m = model.market();
    const double th = theta(r, m.sigma);
    if (th - m.gamma < 1e-6) {
        using LD = long double;
        const LD th_l = theta_impl<LD>(r, m.sigma);
        const LD g = m.gamma;
        const LD value = LD(m.K) * q * (1 - LD(model.iota()) / r) * g / (g - th_l) *
                         std::pow(LD(ratio), th_l);
        return static_cast<double>(value);
    }
    return m.K * q * (1.0 - model.iota() / r) * m.gamma / (m.gamma - th) * std::pow(ratio, th);
}

bool use_continuation(const EquilibriumModel& model, double x, double q, Branch branch) {
    switch (branch) {
        case Branch::Continuation: return true;
        case Branch::Expansion: return false;
        case Branch::Auto: break;
    }
    return x <= x_star(model, q, Candidate::AllowInvalid);
}

void require_state(double x, double q) {
    require_positive(x, "shock value x");
    require_positive(q, "output q");
}

}  // namespace

MarketParams MarketParams::make(double sigma, double gamma, double K) {
    require_positive(sigma, "sigma");
    require_positive(K, "K");
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and > 1");
    return {sigma, gamma, K};
}

MarketParams MarketParams::from_config(const ConfigBlock& block) {
    try {
        return make(block.get_double("sigma"), block.get_double("gamma"), block.get_double("K"));
    } catch (const DomainError& e) {
        throw ConfigError(block.name(), e.what());
    }
}

double theta(double r, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("theta: sigma must be > 0");
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("theta: rate must be >= 0");
    return theta_impl(r, sigma);
}

RateMoments rate_moments(const WeightingDistribution& F, double sigma) {
    RateMoments m{};
    m.theta = rate_moment(F, [&](double r) { return theta(r, sigma); });
    m.rate = rate_moment(F, [](double r) { return r; });
    m.tmor = rate_moment(F, [&](double r) { return (theta(r, sigma) - 1.0) / r; });
    m.recip = rate_moment(F, [](double r) { return 1.0 / r; });
    return m;
}

EquilibriumModel::EquilibriumModel(WeightingDistribution F, MarketParams market,
                                   RateMoments moments)
    : F_(std::move(F)),
      market_(market),
      moments_(moments),
      iota_(moments.theta / moments.tmor),
      sp_margin_(moments.sp_margin()) {}

EquilibriumModel build_model(WeightingDistribution F, MarketParams market) {
    market = MarketParams::make(market.sigma, market.gamma, market.K);
    const double theta_min = theta(F.min_rate(), market.sigma);
    if (!(market.gamma < theta_min)) {
        std::ostringstream os;
        os.precision(10);
        os << "value function infinite: gamma = " << market.gamma
           << " must be below theta(min rate) = " << theta_min << " for " << F.describe();
        throw ValidationError(os.str());
    }
    const RateMoments moments = rate_moments(F, market.sigma);
    return EquilibriumModel(std::move(F), market, moments);
}

void require_valid(const EquilibriumModel& model, Candidate mode) {
    if (mode == Candidate::AllowInvalid || model.sp_holds()) return;
    std::ostringstream os;
    os.precision(10);
    os << "SP principle fails: smooth-pasting validity inequality violated (margin = "
       << model.sp_margin() << "); the candidate is not an equilibrium";
    throw SpValidityError(os.str(), model.sp_margin());
}

double x_star(const EquilibriumModel& model, double q, Candidate mode) {
    require_positive(q, "output q");
    require_valid(model, mode);
    const MarketParams& m = model.market();
    return model.iota() * m.gamma / (m.gamma - 1.0) * std::pow(q, 1.0 / m.gamma) * m.K;
}

double q_tilde(const EquilibriumModel& model, double x) {
    require_positive(x, "shock value x");
    const MarketParams& m = model.market();
    return std::pow(x * (m.gamma - 1.0) / (m.gamma * model.iota() * m.K), m.gamma);
}

double w_q_marginal(const EquilibriumModel& model, double x, double q, double r, Branch branch) {
    require_state(x, q);
    require_positive(r, "rate r");
    if (!use_continuation(model, x, q, branch)) return model.market().K;
    const MarketParams& m = model.market();
    const double boundary = x_star(model, q, Candidate::AllowInvalid);
    const double ratio = x / boundary;
    // x*(q) (1 - 1/gamma) q^(-1/gamma) / r = iota K / r.
    const double linear = model.iota() * m.K / r;
    return (m.K - linear) * std::pow(ratio, theta(r, m.sigma)) + linear * ratio;
}

double w_value(const EquilibriumModel& model, double x, double q, double r, Branch branch) {
    require_state(x, q);
    require_positive(r, "rate r");
    const MarketParams& m = model.market();
    if (!(m.gamma < theta(r, m.sigma)))
        throw ValidationError("component value infinite: gamma >= theta(r)");
    auto continuation = [&](double output) {
        const double ratio = x / x_star(model, output, Candidate::AllowInvalid);
        return continuation_power_term(model, ratio, output, r) +
               x / r * std::pow(output, 1.0 - 1.0 / m.gamma);
    };
    if (use_continuation(model, x, q, branch)) return continuation(q);
    const double q_hat = q_tilde(model, x);
    return continuation(q_hat) - m.K * (q_hat - q);
}

double v_q_marginal(const EquilibriumModel& model, double x, double q, Candidate mode,
                    Branch branch) {
    require_valid(model, mode);
    require_state(x, q);
    const bool cont = use_continuation(model, x, q, branch);
    if (!cont) return model.market().K;
    return rate_moment(model.distribution(), [&](double r) {
        return w_q_marginal(model, x, q, r, Branch::Continuation);
    });
}

double v_value(const EquilibriumModel& model, double x, double q, Candidate mode, Branch branch) {
    require_valid(model, mode);
    require_state(x, q);
    const Branch resolved = use_continuation(model, x, q, branch) ? Branch::Continuation
                                                                   : Branch::Expansion;
    return rate_moment(model.distribution(),
                       [&](double r) { return w_value(model, x, q, r, resolved); });
}

double benchmark_x_o(double r0, const MarketParams& market, double q) {
    require_positive(r0, "benchmark rate r0");
    require_positive(q, "output q");
    const double th = theta(r0, market.sigma);
    if (!(market.gamma < th) || !(market.gamma > 1.0))
        throw DomainError("benchmark_x_o: need 1 < gamma < theta(r0)");
    return th / (th - 1.0) * r0 * market.gamma / (market.gamma - 1.0) *
           std::pow(q, 1.0 / market.gamma) * market.K;
}

double profit_flow(const MarketParams& market, double x, double q) {
    return x * std::pow(q, 1.0 - 1.0 / market.gamma);
}

}  // namespace wdro
