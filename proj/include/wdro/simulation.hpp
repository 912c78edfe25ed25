#pragma once

#include "wdro/config.hpp"
#include "wdro/equilibrium.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wdro {

struct SimulationConfig {
    double x0 = 0.0;
    double q0 = 1.0;
    double dt = 1e-3;
    /// Truncation time. Zero selects the smallest horizon passing the tail
    /// bound; a positive value is checked against the bound.
    double horizon = 0.0;
    /// Total number of paths; with antithetic sampling this is twice the
    /// number of independent pairs.
    std::size_t n_paths = 100000;
    std::uint64_t seed = 20240607;
    bool antithetic = true;

    /// Keys: x0, q0, dt, horizon, n_paths, seed, antithetic.
    static SimulationConfig from_config(const ConfigBlock& block);
    void validate() const;
};

/// Output policy on a simulated path: start at `q_start`, hold output fixed
/// for the first `hold_steps` steps, then follow the equilibrium barrier
/// Q_n = max(Q_{n-1}, q_tilde(X_n)).
struct PolicySpec {
    double q_start = 1.0;
    std::size_t hold_steps = 0;
};

/// Per-path accumulators for a set of policies evaluated on common paths.
/// Path 2k+1 is the antithetic partner of path 2k when sampling is
/// antithetic.
struct PathBatch {
    std::size_t n_paths = 0;
    std::size_t n_policies = 0;
    std::vector<double> profit;      // [path * n_policies + policy]: Σ h(t_n) Π(X_n, Q_n) dt
    std::vector<double> cost;        // [path * n_policies + policy]: Σ K h(t_n) ΔQ_n
    std::vector<double> terminal_x;  // [path]
    std::vector<double> terminal_q;  // [path * n_policies + policy]

    double payoff(std::size_t path, std::size_t policy) const {
        return profit[path * n_policies + policy] - cost[path * n_policies + policy];
    }
};

/// Tail-bound diagnostics of the horizon choice, estimated on a pilot run.
struct HorizonEstimate {
    double horizon = 0.0;
    double sup_profit = 0.0;     // E[sup_{t<=T} Π(X_t, Q_t)]
    double tail_bound = 0.0;     // h(T) * sup_profit
    double tail_integral = 0.0;  // sup_profit * ∫_T^inf h(t) dt
    double value_scale = 0.0;    // |V(x0, q0)|
    bool acceptable = false;     // both bounds below 0.1% of value_scale
};

/// Pilot estimate (1000 paths) for the given horizon, or the smallest
/// multiple of 10 that is acceptable when horizon == 0.
HorizonEstimate estimate_horizon(const EquilibriumModel& model, const SimulationConfig& config,
                                 Candidate mode = Candidate::RequireValid);

/// Simulates the policies on the configured paths. config.horizon must be
/// positive here.
PathBatch simulate_paths(const EquilibriumModel& model, const SimulationConfig& config,
                         const std::vector<PolicySpec>& policies);

struct SimulationResult {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;  // independent samples (pairs when antithetic)
    std::size_t steps = 0;
    HorizonEstimate horizon;
};

/// Monte Carlo estimate of the time-0 objective under the equilibrium
/// barrier policy. Throws ValidationError if a fixed horizon violates the
/// tail bound.
SimulationResult simulate_equilibrium_payoff(const EquilibriumModel& model,
                                             const SimulationConfig& config,
                                             Candidate mode = Candidate::RequireValid);

/// Scalar replay of the paths of simulate_paths for the first `n_paths`
/// paths, recording every grid time. Used to check path invariants.
struct PathTrace {
    std::vector<double> x;  // X_n, n = 0..steps
    std::vector<double> q;  // Q_n after the policy update at step n
    double profit = 0.0;
    double cost = 0.0;
};
std::vector<PathTrace> trace_paths(const EquilibriumModel& model, const SimulationConfig& config,
                                   const PolicySpec& policy, std::size_t n_paths);

struct DeviationEstimate {
    double epsilon = 0.0;
    /// [J(x; U) - (J(x; U^{eps,a}) - K (a - q))] / eps; negative values mean
    /// the deviation pays.
    double gain = 0.0;
    double standard_error = 0.0;
};

struct DeviationReport {
    double x = 0.0;
    double q = 0.0;
    double a = 0.0;
    std::vector<DeviationEstimate> estimates;

    /// Every estimate >= -(sigmas * SE + slack).
    bool passes(double sigmas = 3.0, double slack = 0.0) const;
    /// Some estimate < -(sigmas * SE): the deviator gains significantly.
    bool significant_deviation(double sigmas = 5.0) const;
};

/// Local-deviation test with common random numbers: the baseline follows the
/// equilibrium policy from (x, q); each deviation jumps to output a, holds it
/// for eps, and then follows the equilibrium policy.
DeviationReport deviation_test(const EquilibriumModel& model, double x, double q, double a,
                               const std::vector<double>& epsilon_grid,
                               const SimulationConfig& base,
                               Candidate mode = Candidate::RequireValid);

}  // namespace wdro
