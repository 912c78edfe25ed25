#include "wdro/simulation.hpp"

#include "path_kernel.hpp"
#include "wdro/errors.hpp"
#include "wdro/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

namespace wdro {
namespace {

constexpr std::size_t kPilotPaths = 1000;
constexpr double kPilotMinDt = 1e-2;
constexpr double kHorizonStep = 10.0;
constexpr double kHorizonCap = 5000.0;
constexpr double kTailFraction = 1e-3;
constexpr std::uint64_t kPilotSeedSalt = 0x7069C07D5EEDULL;

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double e : v) s += e;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_and_se(const std::vector<double>& samples) {
    const double n = static_cast<double>(samples.size());
    const double mean = pairwise_sum(samples) / n;
    std::vector<double> sq(samples.size());
    std::transform(samples.begin(), samples.end(), sq.begin(),
                   [mean](double s) { return (s - mean) * (s - mean); });
    const double var = pairwise_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

double trigger_coef(const EquilibriumModel& model) {
    const MarketParams& m = model.market();
    return model.iota() * m.gamma / (m.gamma - 1.0) * m.K;
}

std::size_t step_count(double horizon, double dt) {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

// Scalar path state reproducing the kernel's random stream and stepping.
class ScalarPath {
public:
    ScalarPath(std::uint64_t seed, std::uint64_t stream, double x0, double drift, double vol)
        : rng_(detail::Xoshiro256::for_stream(seed, stream)),
          log_x0_(std::log(x0)),
          logx_(log_x0_),
          drift_(drift),
          vol_(vol) {}

    double x() const { return std::exp(logx_); }
    double mirrored_x(double mirror) const { return mirror / x(); }

    void advance(std::size_t n) {
        double z;
        if ((n & 1U) == 0) {
            const double u1 = detail::open_unit(rng_.next());
            const double u2 = detail::closed_unit(rng_.next());
            const double radius = std::sqrt(-2.0 * std::log(u1));
            z = radius * std::cos(2.0 * std::numbers::pi * u2);
            spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
        } else {
            z = spare_;
        }
        logx_ += drift_ + vol_ * z;
    }

private:
    detail::Xoshiro256 rng_;
    double log_x0_;
    double logx_;
    double drift_;
    double vol_;
    double spare_ = 0.0;
};

// Barrier policy state for one path.
struct PolicyState {
    double q;
    double qc;
    double trigger;
    double profit = 0.0;
    double cost = 0.0;

    PolicyState(double q0, double coef, const MarketParams& m)
        : q(q0), qc(std::pow(q0, 1.0 - 1.0 / m.gamma)), trigger(coef * std::pow(q0, 1.0 / m.gamma)) {}

    void update(double x, double hn, double coef, const MarketParams& m) {
        if (!(x > trigger)) return;
        const double q_new = std::pow(x / coef, m.gamma);
        cost += m.K * hn * (q_new - q);
        q = q_new;
        qc = std::pow(q_new, 1.0 - 1.0 / m.gamma);
        trigger = x;
    }
};

}  // namespace

SimulationConfig SimulationConfig::from_config(const ConfigBlock& block) {
    SimulationConfig c;
    c.x0 = block.get_double("x0");
    c.q0 = block.get_double("q0", c.q0);
    c.dt = block.get_double("dt", c.dt);
    c.horizon = block.get_double("horizon", c.horizon);
    const long n = block.get_int("n_paths", static_cast<long>(c.n_paths));
    const long seed = block.get_int("seed", static_cast<long>(c.seed));
    if (n < 2) throw ConfigError(block.name() + ".n_paths", "must be >= 2");
    if (seed < 0) throw ConfigError(block.name() + ".seed", "must be >= 0");
    c.n_paths = static_cast<std::size_t>(n);
    c.seed = static_cast<std::uint64_t>(seed);
    c.antithetic = block.get_bool("antithetic", c.antithetic);
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ConfigError(block.name(), e.what());
    }
    return c;
}

void SimulationConfig::validate() const {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("simulation: x0 must be > 0");
    if (!(q0 > 0.0) || !std::isfinite(q0)) throw DomainError("simulation: q0 must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("simulation: dt must be > 0");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw DomainError("simulation: horizon must be >= 0");
    if (horizon > 0.0 && horizon < dt) throw DomainError("simulation: horizon must be >= dt");
    if (n_paths < 2) throw DomainError("simulation: n_paths must be >= 2");
    if (antithetic && n_paths % 2 != 0)
        throw DomainError("simulation: antithetic sampling needs an even n_paths");
}

HorizonEstimate estimate_horizon(const EquilibriumModel& model, const SimulationConfig& config,
                                 Candidate mode) {
    config.validate();
    const MarketParams& m = model.market();
    const WeightingDistribution& F = model.distribution();
    const double coef = trigger_coef(model);
    const double dt = std::max(config.dt, kPilotMinDt);
    const double drift = -0.5 * m.sigma * m.sigma * dt;
    const double vol = m.sigma * std::sqrt(dt);

    HorizonEstimate est;
    est.value_scale = std::abs(v_value(model, config.x0, config.q0, mode));

    std::vector<ScalarPath> paths;
    std::vector<PolicyState> states;
    std::vector<double> sup(kPilotPaths, 0.0);
    paths.reserve(kPilotPaths);
    states.reserve(kPilotPaths);
    for (std::size_t i = 0; i < kPilotPaths; ++i) {
        paths.emplace_back(config.seed ^ kPilotSeedSalt, i, config.x0, drift, vol);
        states.emplace_back(config.q0, coef, m);
    }

    const bool fixed = config.horizon > 0.0;
    std::size_t n = 0;
    double t_end = fixed ? std::min(config.horizon, kHorizonStep) : kHorizonStep;
    while (true) {
        const std::size_t n_end = step_count(t_end, dt);
        for (std::size_t i = 0; i < kPilotPaths; ++i) {
            for (std::size_t k = n; k <= n_end; ++k) {
                const double x = paths[i].x();
                states[i].update(x, 1.0, coef, m);
                sup[i] = std::max(sup[i], x * states[i].qc);
                if (k < n_end) paths[i].advance(k);
            }
        }
        n = n_end;

        est.horizon = t_end;
        est.sup_profit = pairwise_sum(sup) / static_cast<double>(kPilotPaths);
        est.tail_bound = h_eval(F, t_end) * est.sup_profit;
        est.tail_integral =
            est.sup_profit * rate_moment(F, [&](double r) { return std::exp(-r * t_end) / r; });
        const double limit = kTailFraction * est.value_scale;
        est.acceptable = est.tail_bound < limit && est.tail_integral < limit;

        if (fixed) {
            if (t_end >= config.horizon) return est;
            t_end = std::min(config.horizon, t_end + kHorizonStep);
        } else {
            if (est.acceptable) return est;
            if (t_end >= kHorizonCap)
                throw NumericError("no horizon up to " + std::to_string(kHorizonCap) +
                                       " meets the tail bound",
                                   est.tail_integral / std::max(est.value_scale, 1e-300));
            t_end += kHorizonStep;
        }
    }
}

PathBatch simulate_paths(const EquilibriumModel& model, const SimulationConfig& config,
                         const std::vector<PolicySpec>& policies) {
    config.validate();
    if (!(config.horizon > 0.0)) throw DomainError("simulate_paths: horizon must be set");
    if (policies.empty() || policies.size() > detail::kMaxPolicies)
        throw DomainError("simulate_paths: between 1 and 8 policies are supported");
    const MarketParams& m = model.market();
    const std::size_t steps = step_count(config.horizon, config.dt);

    std::vector<double> h(steps);
    std::vector<double> mirror(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * config.dt;
        if (n < steps) h[n] = h_eval(model.distribution(), t);
        mirror[n] = config.x0 * config.x0 * std::exp(-m.sigma * m.sigma * t);
    }

    detail::KernelSetup setup;
    setup.log_x0 = std::log(config.x0);
    setup.drift = -0.5 * m.sigma * m.sigma * config.dt;
    setup.vol = m.sigma * std::sqrt(config.dt);
    setup.dt = config.dt;
    setup.steps = steps;
    setup.h = h.data();
    setup.mirror = mirror.data();
    setup.c = 1.0 - 1.0 / m.gamma;
    setup.inv_gamma = 1.0 / m.gamma;
    setup.gamma = m.gamma;
    setup.trigger_coef = trigger_coef(model);
    setup.K = m.K;
    setup.policies = policies.data();
    setup.n_policies = policies.size();
    setup.antithetic = config.antithetic;
    setup.seed = config.seed;

    PathBatch batch;
    batch.n_paths = config.n_paths;
    batch.n_policies = policies.size();
    batch.profit.resize(config.n_paths * policies.size());
    batch.cost.resize(config.n_paths * policies.size());
    batch.terminal_q.resize(config.n_paths * policies.size());
    batch.terminal_x.resize(config.n_paths);

    const std::size_t streams = config.antithetic ? config.n_paths / 2 : config.n_paths;
    const std::size_t blocks = (streams + detail::kLanes - 1) / detail::kLanes;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t first = b * detail::kLanes;
        detail::simulate_block(setup, first, std::min(detail::kLanes, streams - first), batch);
    });
    return batch;
}

SimulationResult simulate_equilibrium_payoff(const EquilibriumModel& model,
                                             const SimulationConfig& config, Candidate mode) {
    require_valid(model, mode);
    config.validate();
    SimulationResult result;
    result.horizon = estimate_horizon(model, config, mode);
    if (!result.horizon.acceptable) {
        std::ostringstream os;
        os.precision(6);
        os << "horizon " << config.horizon << " violates the tail bound: h(T) E[sup profit] = "
           << result.horizon.tail_bound << ", tail integral = " << result.horizon.tail_integral
           << ", limit = " << kTailFraction * result.horizon.value_scale;
        throw ValidationError(os.str());
    }
    SimulationConfig run = config;
    run.horizon = result.horizon.horizon;
    const PathBatch batch = simulate_paths(model, run, {PolicySpec{config.q0, 0}});

    const std::size_t per_sample = config.antithetic ? 2 : 1;
    std::vector<double> samples(config.n_paths / per_sample);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < per_sample; ++k) acc += batch.payoff(s * per_sample + k, 0);
        samples[s] = acc / static_cast<double>(per_sample);
    }
    const MeanSe stats = mean_and_se(samples);
    result.mean = stats.mean;
    result.standard_error = stats.se;
    result.samples = samples.size();
    result.steps = step_count(run.horizon, run.dt);
    return result;
}

std::vector<PathTrace> trace_paths(const EquilibriumModel& model, const SimulationConfig& config,
                                   const PolicySpec& policy, std::size_t n_paths) {
    config.validate();
    if (!(config.horizon > 0.0)) throw DomainError("trace_paths: horizon must be set");
    const MarketParams& m = model.market();
    const double coef = trigger_coef(model);
    const std::size_t steps = step_count(config.horizon, config.dt);
    const double drift = -0.5 * m.sigma * m.sigma * config.dt;
    const double vol = m.sigma * std::sqrt(config.dt);
    const std::size_t M = config.antithetic ? 2 : 1;

    std::vector<PathTrace> traces;
    traces.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        ScalarPath path(config.seed, i / M, config.x0, drift, vol);
        const bool mirrored = i % M == 1;
        PolicyState state(policy.q_start, coef, m);
        PathTrace trace;
        trace.x.reserve(steps + 1);
        trace.q.reserve(steps + 1);
        for (std::size_t n = 0; n <= steps; ++n) {
            const double t = static_cast<double>(n) * config.dt;
            const double mirror = config.x0 * config.x0 * std::exp(-m.sigma * m.sigma * t);
            const double x = mirrored ? path.mirrored_x(mirror) : path.x();
            trace.x.push_back(x);
            if (n == steps) {
                trace.q.push_back(state.q);
                break;
            }
            const double hn = h_eval(model.distribution(), t);
            if (n >= policy.hold_steps) state.update(x, hn, coef, m);
            trace.q.push_back(state.q);
            state.profit += hn * x * state.qc;
            path.advance(n);
        }
        trace.profit = state.profit * config.dt;
        trace.cost = state.cost;
        traces.push_back(std::move(trace));
    }
    return traces;
}

bool DeviationReport::passes(double sigmas, double slack) const {
    return std::all_of(estimates.begin(), estimates.end(), [&](const DeviationEstimate& e) {
        return e.gain >= -(sigmas * e.standard_error + slack);
    });
}

bool DeviationReport::significant_deviation(double sigmas) const {
    return std::any_of(estimates.begin(), estimates.end(), [&](const DeviationEstimate& e) {
        return e.gain < -sigmas * e.standard_error;
    });
}

DeviationReport deviation_test(const EquilibriumModel& model, double x, double q, double a,
                               const std::vector<double>& epsilon_grid,
                               const SimulationConfig& base, Candidate mode) {
    require_valid(model, mode);
    if (!(a >= q)) throw DomainError("deviation_test: deviated output a must be >= q");
    if (epsilon_grid.empty() || epsilon_grid.size() + 1 > detail::kMaxPolicies)
        throw DomainError("deviation_test: between 1 and 7 epsilon values are supported");

    SimulationConfig config = base;
    config.x0 = x;
    config.q0 = q;
    config.validate();
    const HorizonEstimate horizon = estimate_horizon(model, config, mode);
    if (!horizon.acceptable) throw ValidationError("deviation_test: horizon violates the tail bound");
    config.horizon = horizon.horizon;

    std::vector<PolicySpec> policies{{q, 0}};
    for (double eps : epsilon_grid) {
        if (!(eps > 0.0)) throw DomainError("deviation_test: epsilon must be > 0");
        const auto hold = static_cast<std::size_t>(std::llround(eps / config.dt));
        if (hold == 0 || eps >= config.horizon)
            throw DomainError("deviation_test: epsilon must lie in [dt, horizon)");
        policies.push_back({a, hold});
    }
    const PathBatch batch = simulate_paths(model, config, policies);

    DeviationReport report{x, q, a, {}};
    const double jump_cost = model.market().K * (a - q);
    const std::size_t per_sample = config.antithetic ? 2 : 1;
    const std::size_t n_samples = config.n_paths / per_sample;
    for (std::size_t e = 0; e < epsilon_grid.size(); ++e) {
        std::vector<double> samples(n_samples);
        for (std::size_t s = 0; s < n_samples; ++s) {
            double acc = 0.0;
            for (std::size_t k = 0; k < per_sample; ++k) {
                const std::size_t path = s * per_sample + k;
                acc += batch.payoff(path, 0) - batch.payoff(path, e + 1) + jump_cost;
            }
            samples[s] = acc / static_cast<double>(per_sample);
        }
        const MeanSe stats = mean_and_se(samples);
        const double eps = epsilon_grid[e];
        report.estimates.push_back({eps, stats.mean / eps, stats.se / eps});
    }
    return report;
}

}  // namespace wdro
