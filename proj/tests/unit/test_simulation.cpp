#include "support/test_util.hpp"
#include "wdro/config.hpp"
#include "wdro/equilibrium.hpp"
#include "wdro/errors.hpp"
#include "wdro/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

using namespace wdro;
using wdro::test::rel_err;

namespace {

const MarketParams kMarket = MarketParams::make(0.2, 1.5, 1.0);

EquilibriumModel degenerate_model() {
    return build_model(WeightingDistribution::degenerate(0.05), kMarket);
}

SimulationConfig short_config(double x0, std::size_t n_paths) {
    SimulationConfig c;
    c.x0 = x0;
    c.n_paths = n_paths;
    c.horizon = 4.0;
    c.dt = 1e-3;
    return c;
}

}  // namespace

TEST_CASE("frozen paths reproduce the deterministic objective") {
    const MarketParams quiet = MarketParams::make(1e-8, 1.5, 1.0);
    const double r0 = 0.05;
    const auto model = build_model(WeightingDistribution::degenerate(r0), quiet);
    SimulationConfig c;
    c.x0 = 0.1;
    c.n_paths = 16;
    const auto res = simulate_equilibrium_payoff(model, c);
    REQUIRE(res.horizon.acceptable);
    const double T = res.horizon.horizon;
    // Left Riemann sum of x0 * h(t) over [0, T).
    const double riemann = c.x0 * c.dt * -std::expm1(-r0 * T) / -std::expm1(-r0 * c.dt);
    CHECK(rel_err(res.mean, riemann) < 1e-9);
    CHECK(res.standard_error < 1e-9 * res.mean);
    // Infinite-horizon objective x0 * q0^(1-1/gamma) * E[1/r].
    CHECK(rel_err(res.mean, c.x0 / r0) < 2e-3);
}

TEST_CASE("vector kernel matches the scalar replay") {
    const auto model = degenerate_model();
    const double xs = x_star(model, 1.0);
    for (bool antithetic : {true, false}) {
        auto c = short_config(0.95 * xs, 32);
        c.antithetic = antithetic;
        c.seed = 99;
        const std::vector<PolicySpec> policies{{1.0, 0}, {1.4, 700}};
        const auto batch = simulate_paths(model, c, policies);
        for (std::size_t p = 0; p < policies.size(); ++p) {
            const auto traces = trace_paths(model, c, policies[p], c.n_paths);
            for (std::size_t i = 0; i < c.n_paths; ++i) {
                const std::size_t k = i * policies.size() + p;
                CHECK(rel_err(batch.profit[k], traces[i].profit) < 1e-11);
                CHECK(std::abs(batch.cost[k] - traces[i].cost) < 1e-11);
                CHECK(rel_err(batch.terminal_q[k], traces[i].q.back()) < 1e-11);
                CHECK(rel_err(batch.terminal_x[i], traces[i].x.back()) < 1e-11);
            }
        }
    }
}

TEST_CASE("antithetic partner mirrors the log-shock") {
    const auto model = degenerate_model();
    auto c = short_config(0.1, 4);
    const auto traces = trace_paths(model, c, {1.0, 0}, 2);
    const double sigma2 = kMarket.sigma * kMarket.sigma;
    for (std::size_t n = 0; n < traces[0].x.size(); n += 500) {
        const double t = static_cast<double>(n) * c.dt;
        CHECK(rel_err(traces[0].x[n] * traces[1].x[n], c.x0 * c.x0 * std::exp(-sigma2 * t)) < 1e-13);
    }
}

TEST_CASE("output follows the running-maximum barrier") {
    const auto model = degenerate_model();
    const double xs = x_star(model, 1.0);
    auto c = short_config(0.9 * xs, 8);
    c.horizon = 20.0;
    const auto traces = trace_paths(model, c, {1.0, 0}, c.n_paths);
    std::size_t expansions = 0;
    for (const auto& tr : traces) {
        double running_max = 0.0;
        for (std::size_t n = 0; n < tr.q.size(); ++n) {
            running_max = std::max(running_max, tr.x[n]);
            const double expected = std::max(c.q0, q_tilde(model, running_max));
            CHECK(rel_err(tr.q[n], expected) < 1e-12);
            if (n > 0) {
                CHECK(tr.q[n] >= tr.q[n - 1]);
                expansions += tr.q[n] > tr.q[n - 1];
            }
        }
    }
    CHECK(expansions > 0);
}

TEST_CASE("initial lump when starting in the expansion region") {
    const auto model = degenerate_model();
    const double xs = x_star(model, 1.0);
    auto c = short_config(1.5 * xs, 2);
    c.horizon = 0.01;
    const auto traces = trace_paths(model, c, {1.0, 0}, 1);
    CHECK(rel_err(traces[0].q[0], q_tilde(model, c.x0)) < 1e-14);
    CHECK(traces[0].cost >= kMarket.K * (q_tilde(model, c.x0) - 1.0) * (1 - 1e-14));
}

TEST_CASE("results do not depend on the worker count") {
    const auto model = build_model(WeightingDistribution::gamma_shifted(0.05, 1.0, 0.05), kMarket);
    auto c = short_config(0.3, 200);
    ::setenv("WDRO_THREADS", "1", 1);
    const auto one = simulate_paths(model, c, {{1.0, 0}});
    ::setenv("WDRO_THREADS", "3", 1);
    const auto three = simulate_paths(model, c, {{1.0, 0}});
    ::unsetenv("WDRO_THREADS");
    CHECK(one.profit == three.profit);
    CHECK(one.cost == three.cost);
    CHECK(one.terminal_x == three.terminal_x);
}

TEST_CASE("seed changes the sample, same seed reproduces it") {
    const auto model = degenerate_model();
    auto c = short_config(0.2, 16);
    const auto a = simulate_paths(model, c, {{1.0, 0}});
    const auto b = simulate_paths(model, c, {{1.0, 0}});
    c.seed += 1;
    const auto d = simulate_paths(model, c, {{1.0, 0}});
    CHECK(a.profit == b.profit);
    CHECK(a.profit != d.profit);
}

TEST_CASE("fixed horizon is checked against the tail bound") {
    const auto model = degenerate_model();
    SimulationConfig c;
    c.x0 = 0.1;
    c.n_paths = 16;
    c.horizon = 20.0;
    CHECK_THROWS_AS(simulate_equilibrium_payoff(model, c), ValidationError);
    const auto est = estimate_horizon(model, c);
    CHECK_FALSE(est.acceptable);
    CHECK(est.horizon == 20.0);
    c.horizon = 0.0;
    const auto chosen = estimate_horizon(model, c);
    CHECK(chosen.acceptable);
    CHECK(chosen.tail_bound < 1e-3 * chosen.value_scale);
    CHECK(chosen.tail_integral < 1e-3 * chosen.value_scale);
    c.horizon = chosen.horizon - 10.0;
    CHECK_FALSE(estimate_horizon(model, c).acceptable);
}

TEST_CASE("configuration validation") {
    const auto model = degenerate_model();
    SimulationConfig c;
    c.x0 = 0.1;
    c.n_paths = 15;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.antithetic = false;
    CHECK_NOTHROW(c.validate());
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = SimulationConfig{};
    CHECK_THROWS_AS(c.validate(), DomainError);  // x0 unset

    const auto invalid = build_model(WeightingDistribution::two_point(0.05, 1.0, 0.5), kMarket);
    c.x0 = 0.1;
    CHECK_THROWS_AS(simulate_equilibrium_payoff(invalid, c), SpValidityError);

    const auto cfg = RunConfig::parse("[simulate]\nx0 = 0.2\nn_paths = 1\n");
    CHECK_THROWS_AS(SimulationConfig::from_config(cfg.block("simulate")), ConfigError);
}

TEST_CASE("no deviation means zero gain") {
    const auto model = degenerate_model();
    const double x = 0.5 * x_star(model, 1.0);
    SimulationConfig c;
    c.n_paths = 64;
    c.dt = 1e-2;
    const auto report = deviation_test(model, x, 1.0, 1.0, {0.5, 0.25, 0.1}, c);
    REQUIRE(report.estimates.size() == 3);
    for (const auto& e : report.estimates) {
        CHECK(e.gain == 0.0);
        CHECK(e.standard_error == 0.0);
    }
    CHECK(report.passes());
    CHECK_FALSE(report.significant_deviation());
    CHECK_THROWS_AS(deviation_test(model, x, 1.0, 0.9, {0.1}, c), DomainError);
}
