#include "support/frozen.hpp"
#include "support/ode_oracle.hpp"
#include "support/test_util.hpp"
#include "wdro/equilibrium.hpp"
#include "wdro/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace wdro;
using wdro::test::rel_err;

namespace {

const MarketParams kMarket = MarketParams::make(0.2, 1.5, 1.0);

EquilibriumModel degenerate_model(double r0 = 0.05) {
    return build_model(WeightingDistribution::degenerate(r0), kMarket);
}

EquilibriumModel two_point_model(double lambda) {
    return build_model(WeightingDistribution::two_point(0.05, lambda, 0.5), kMarket);
}

EquilibriumModel gamma_model() {
    return build_model(WeightingDistribution::gamma_shifted(0.05, 1.0, 0.05), kMarket);
}

// Admissible random model: rates drawn so that gamma < theta(r_min).
struct RandomCase {
    double r0, sigma, gamma, K, q;
};

RandomCase random_case(test::Sampler& rng) {
    RandomCase c{};
    c.sigma = rng.uniform(0.05, 0.6);
    c.r0 = rng.log_uniform(0.005, 0.5);
    const double th = theta(c.r0, c.sigma);
    c.gamma = 1.0 + rng.uniform(0.05, 0.95) * (th - 1.0);
    c.K = rng.log_uniform(0.1, 10.0);
    c.q = rng.log_uniform(0.1, 10.0);
    return c;
}

}  // namespace

TEST_CASE("theta solves its quadratic") {
    CHECK(theta(0.0, 0.2) == 1.0);
    CHECK(rel_err(theta(0.05, 0.2), frozen::kTheta005) < 1e-15);
    CHECK(rel_err(theta(1.05, 0.2), frozen::kTheta105) < 1e-15);
    test::Sampler rng(3);
    for (int i = 0; i < 200; ++i) {
        const double r = rng.log_uniform(1e-6, 10.0);
        const double s = rng.uniform(0.01, 2.0);
        const double th = theta(r, s);
        const double residual = 0.5 * s * s * th * th - 0.5 * s * s * th - r;
        CHECK(std::abs(residual) < 1e-12 * (0.5 * s * s * th * th));
    }
    CHECK_THROWS_AS(theta(0.05, 0.0), DomainError);
    CHECK_THROWS_AS(theta(-0.01, 0.2), DomainError);
}

TEST_CASE("theta increases and (theta - 1)/r decreases in r") {
    double prev_theta = theta(1e-4, 0.2);
    double prev_ratio = (prev_theta - 1.0) / 1e-4;
    for (double r = 2e-4; r < 20.0; r *= 1.3) {
        const double th = theta(r, 0.2);
        CHECK(th > prev_theta);
        CHECK((th - 1.0) / r < prev_ratio);
        prev_theta = th;
        prev_ratio = (th - 1.0) / r;
    }
}

TEST_CASE("degenerate model") {
    const EquilibriumModel m = degenerate_model();
    CHECK(rel_err(m.iota(), frozen::kDegIota) < 1e-14);
    CHECK(rel_err(m.m_tmor(), frozen::kDegTmor) < 1e-14);
    CHECK(std::abs(m.sp_margin() - 1.0) < 1e-12);
    CHECK(m.sp_holds());
    CHECK(rel_err(x_star(m, 1.0), frozen::kDegXStar) < 1e-14);
    CHECK(rel_err(v_value(m, 0.1, 1.0), frozen::kDegValueX01) < 1e-13);
    CHECK(rel_err(v_q_marginal(m, 0.1, 1.0), frozen::kDegMarginalX01) < 1e-13);
}

TEST_CASE("degenerate reduction to the exponential benchmark") {
    test::Sampler rng(11);
    for (int i = 0; i < 20; ++i) {
        const RandomCase c = random_case(rng);
        const MarketParams market = MarketParams::make(c.sigma, c.gamma, c.K);
        const EquilibriumModel m = build_model(WeightingDistribution::degenerate(c.r0), market);
        CHECK(rel_err(x_star(m, c.q), benchmark_x_o(c.r0, market, c.q)) < 1e-12);
        CHECK(std::abs(m.sp_margin() - 1.0) < 1e-12);
    }
}

TEST_CASE("two-point models: validity signs and triggers") {
    const EquilibriumModel valid = two_point_model(0.1);
    CHECK(rel_err(valid.m_theta(), frozen::kTwoLam01Theta) < 1e-14);
    CHECK(rel_err(valid.m_tmor(), frozen::kTwoLam01Tmor) < 1e-14);
    CHECK(rel_err(valid.sp_margin(), frozen::kTwoLam01Margin) < 1e-13);
    CHECK(rel_err(x_star(valid, 1.0), frozen::kTwoLam01XStar) < 1e-14);

    const EquilibriumModel invalid = two_point_model(1.0);
    CHECK(rel_err(invalid.m_theta(), frozen::kTwoLam1Theta) < 1e-14);
    CHECK(rel_err(invalid.sp_margin(), frozen::kTwoLam1Margin) < 1e-13);
    CHECK_FALSE(invalid.sp_holds());
    try {
        x_star(invalid, 1.0);
        FAIL("expected refusal");
    } catch (const SpValidityError& e) {
        CHECK(std::string(e.what()).find("SP principle fails") != std::string::npos);
        CHECK(e.margin() < 0.0);
    }
    CHECK(rel_err(x_star(invalid, 1.0, Candidate::AllowInvalid), frozen::kTwoLam1XStar) < 1e-14);
    CHECK_THROWS_AS(v_value(invalid, 0.5, 1.0), SpValidityError);
}

TEST_CASE("gamma model moments") {
    struct Case {
        double sigma, theta, tmor;
    };
    for (const Case& c : {Case{0.1, frozen::kGammaThetaS01, frozen::kGammaTmorS01},
                          Case{0.2, frozen::kGammaThetaS02, frozen::kGammaTmorS02},
                          Case{0.5, frozen::kGammaThetaS05, frozen::kGammaTmorS05}}) {
        CAPTURE(c.sigma);
        const RateMoments m = rate_moments(WeightingDistribution::gamma_shifted(0.05, 1.0, 0.05), c.sigma);
        CHECK(rel_err(m.theta, c.theta) < 1e-9);
        CHECK(rel_err(m.tmor, c.tmor) < 1e-9);
        CHECK(rel_err(m.rate, 0.1) < 1e-10);
        CHECK(rel_err(m.recip, frozen::kGammaRecip) < 1e-9);
    }
    CHECK(rel_err(x_star(gamma_model(), 1.0), frozen::kGammaXStarAlpha1) < 1e-9);
}

TEST_CASE("q_tilde inverts x_star and x_star is q-homogeneous") {
    const EquilibriumModel m = gamma_model();
    for (double q : {0.1, 1.0, 7.5}) {
        CHECK(rel_err(q_tilde(m, x_star(m, q)), q) < 1e-10);
        CHECK(rel_err(x_star(m, q_tilde(m, 0.3 * q)), 0.3 * q) < 1e-10);
        for (double c : {0.5, 2.0, 3.7})
            CHECK(rel_err(x_star(m, std::pow(c, 1.5) * q), c * x_star(m, q)) < 1e-13);
    }
    const EquilibriumModel d = degenerate_model();
    CHECK(rel_err(q_tilde(d, frozen::kDegXStar), 1.0) < 1e-14);
    CHECK(rel_err(q_tilde(d, 2.0 * frozen::kDegXStar), std::pow(2.0, 1.5)) < 1e-14);
}

TEST_CASE("marginal component: boundary values and ODE oracle") {
    const EquilibriumModel m = two_point_model(0.1);
    const double xs = x_star(m, 1.0);
    for (double r : {0.05, 0.15}) {
        CHECK(w_q_marginal(m, xs, 1.0, r) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(w_q_marginal(m, xs * (1 + 1e-12), 1.0, r) == 1.0);
        CHECK(std::abs(w_q_marginal(m, 1e-9, 1.0, r)) < 1e-6);
    }

    const EquilibriumModel d = degenerate_model();
    const double c = (1.0 - 1.0 / 1.5);
    const double oracle = test::solve_marginal_bvp(0.2, 0.05, c, x_star(d, 1.0), 1.0, 0.1);
    CHECK(std::abs(w_q_marginal(d, 0.1, 1.0, 0.05) - oracle) < 1e-6);
    // Same oracle per support rate of the valid two-point model; the
    // component boundary value at x* is K for every rate.
    for (double r : {0.05, 0.15}) {
        const double o = test::solve_marginal_bvp(0.2, r, c, xs, 1.0, 0.2);
        CHECK(std::abs(w_q_marginal(m, 0.2, 1.0, r) - o) < 1e-6);
    }
}

TEST_CASE("value matching, smooth pasting and V_q <= K for valid models") {
    for (const EquilibriumModel& m : {degenerate_model(), two_point_model(0.1), gamma_model()}) {
        CAPTURE(m.distribution().describe());
        for (double q : {0.5, 1.0, 3.0}) {
            const double xs = x_star(m, q);
            CHECK(std::abs(v_q_marginal(m, xs, q) - 1.0) < 1e-9);
            const double h = 1e-5 * xs;
            const double slope = (v_q_marginal(m, xs + h, q, Candidate::RequireValid, Branch::Continuation) -
                                  v_q_marginal(m, xs - h, q, Candidate::RequireValid, Branch::Continuation)) /
                                 (2 * h);
            CHECK(std::abs(slope) < 1e-6 / xs);
            for (double ratio = 0.02; ratio < 2.5; ratio += 0.07) {
                const double gap = v_q_marginal(m, ratio * xs, q) - 1.0;
                CHECK(gap <= 1e-10);
                if (ratio < 0.99) CHECK(gap < 0.0);
            }
        }
    }
}

TEST_CASE("V_q vanishes linearly at x -> 0") {
    const EquilibriumModel m = two_point_model(0.1);
    const double x = 1e-7;
    const double expected = x * (1.0 - 1.0 / 1.5) * m.m_recip();
    CHECK(rel_err(v_q_marginal(m, x, 1.0), expected) < 1e-6);
}

TEST_CASE("component and total value branches") {
    const EquilibriumModel m = gamma_model();
    for (double q : {0.4, 1.0, 2.0}) {
        const double xs = x_star(m, q);
        for (double r : {0.05, 0.2, 3.0}) {
            const double left = w_value(m, xs, q, r, Branch::Continuation);
            const double right = w_value(m, xs, q, r, Branch::Expansion);
            CHECK(std::abs(left - right) < 1e-10 * std::abs(left));
        }
        const double v_left = v_value(m, xs, q, Candidate::RequireValid, Branch::Continuation);
        const double v_right = v_value(m, xs, q, Candidate::RequireValid, Branch::Expansion);
        CHECK(std::abs(v_left - v_right) < 1e-10 * std::abs(v_left));
    }
    // Expansion-region linearity: V(x, q') - V(x, q) = K (q' - q).
    const double x = 2.0 * x_star(m, 1.5);
    CHECK(std::abs((v_value(m, x, 1.5) - v_value(m, x, 1.0)) - 0.5) < 1e-10);
    CHECK(v_q_marginal(m, x, 1.0) == 1.0);
}

TEST_CASE("two-point with zero gap reproduces degenerate outputs") {
    const EquilibriumModel d = degenerate_model(0.06);
    const EquilibriumModel t =
        build_model(WeightingDistribution::two_point(0.06, 0.0, 0.4), kMarket);
    CHECK(rel_err(t.iota(), d.iota()) < 1e-15);
    CHECK(std::abs(t.sp_margin() - 1.0) < 1e-12);
    for (double x : {0.05, 0.2, 0.6}) {
        CHECK(rel_err(v_value(t, x, 1.3), v_value(d, x, 1.3)) < 1e-14);
        CHECK(rel_err(v_q_marginal(t, x, 1.3), v_q_marginal(d, x, 1.3)) < 1e-14);
    }
}

TEST_CASE("admissibility and the near-pole guard") {
    try {
        build_model(WeightingDistribution::degenerate(0.01), kMarket);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("value function infinite") != std::string::npos);
    }
    CHECK_THROWS_AS(build_model(WeightingDistribution::gamma_shifted(0.01, 1.0, 0.5), kMarket),
                    ValidationError);
    CHECK_THROWS_AS(MarketParams::make(0.2, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(MarketParams::make(0.2, 1.5, 0.0), DomainError);

    const EquilibriumModel d = degenerate_model();
    try {
        w_value(d, 0.1, 1.0, 0.001);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("component value infinite") != std::string::npos);
    }

    // theta(r0) - gamma = 1e-9: the value stays finite and continuous.
    const double r0 = 0.05;
    const MarketParams tight = MarketParams::make(0.2, theta(r0, 0.2) - 1e-9, 1.0);
    const EquilibriumModel m = build_model(WeightingDistribution::degenerate(r0), tight);
    const double xs = x_star(m, 1.0);
    const double left = v_value(m, xs, 1.0, Candidate::RequireValid, Branch::Continuation);
    const double right = v_value(m, xs, 1.0, Candidate::RequireValid, Branch::Expansion);
    CHECK(std::isfinite(left));
    CHECK(std::abs(left - right) < 1e-9 * std::abs(left));
}
