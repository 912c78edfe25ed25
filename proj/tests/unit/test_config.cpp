#include "wdro/config.hpp"
#include "wdro/discounting.hpp"
#include "wdro/equilibrium.hpp"
#include "wdro/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace wdro;

namespace {

const char* const kSample = R"(
# comment line
[discount]
kind = "gamma_shifted"
phi = 0.05    ; trailing comment
alpha = 1
beta = 0.05

[market]
sigma = 0.2
gamma = 1.5
K = 1

[grids]
list = 1, 2.5, 4
lin = linspace(0, 1, 5)
log = logspace(1e-3, 10, 5)
pairs = 0.05:0.5, 1.05:0.5
flag = true
)";

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("sections and typed accessors") {
    const RunConfig cfg = RunConfig::parse(kSample);
    REQUIRE(cfg.has_block("discount"));
    const ConfigBlock& d = cfg.block("discount");
    CHECK(d.get_string("kind") == "gamma_shifted");
    CHECK(d.get_double("phi") == 0.05);
    CHECK(d.get_double("missing", 7.0) == 7.0);
    CHECK(cfg.block("grids").get_bool("flag", false));
    CHECK_FALSE(cfg.has_block("simulate"));
    CHECK(cfg.block_or_empty("simulate").get_int("n_paths", 42) == 42);
}

TEST_CASE("grid forms") {
    const ConfigBlock g = RunConfig::parse(kSample).block("grids");
    CHECK(g.get_grid("list") == std::vector<double>{1.0, 2.5, 4.0});
    const auto lin = g.get_grid("lin");
    REQUIRE(lin.size() == 5);
    CHECK(lin[2] == doctest::Approx(0.5));
    const auto lg = g.get_grid("log");
    REQUIRE(lg.size() == 5);
    CHECK(lg.front() == 1e-3);
    CHECK(lg.back() == 10.0);
    CHECK(lg[2] == doctest::Approx(0.1).epsilon(1e-14));
    const auto pairs = g.get_pairs("pairs");
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1].first == 1.05);
}

TEST_CASE("errors name the offending key") {
    const RunConfig cfg = RunConfig::parse("[market]\nsigma = abc\ngamma = inf\n");
    CHECK(message_of([&] { cfg.block("market").get_double("sigma"); }).find("market.sigma") == 0);
    CHECK(message_of([&] { cfg.block("market").get_double("gamma"); }).find("market.gamma") == 0);
    CHECK(message_of([&] { cfg.block("market").get_double("K"); }).find("market.K") == 0);
    CHECK_THROWS_AS(cfg.block("discount"), ConfigError);
}

TEST_CASE("weighting distribution and market from config") {
    const RunConfig cfg = RunConfig::parse(kSample);
    const WeightingDistribution F = WeightingDistribution::from_config(cfg.block("discount"));
    CHECK(F.kind() == "gamma_shifted");
    CHECK(F.min_rate() == 0.05);
    const MarketParams m = MarketParams::from_config(cfg.block("market"));
    CHECK(m.sigma == 0.2);
    CHECK(m.gamma == 1.5);

    const RunConfig mix = RunConfig::parse("[d]\nkind = mixture\natoms = 0.05:0.25, 0.2:0.75\n");
    const WeightingDistribution M = WeightingDistribution::from_config(mix.block("d"));
    CHECK(h_eval(M, 1.0) == doctest::Approx(0.25 * std::exp(-0.05) + 0.75 * std::exp(-0.2)));

    const RunConfig bad = RunConfig::parse("[d]\nkind = two_point\nr = 0.05\nlambda = 1\ndelta = 1.5\n");
    CHECK(message_of([&] { WeightingDistribution::from_config(bad.block("d")); }).find("d") == 0);
    const RunConfig unknown = RunConfig::parse("[d]\nkind = cadi\n");
    CHECK(message_of([&] { WeightingDistribution::from_config(unknown.block("d")); })
              .find("d.kind") == 0);
}
