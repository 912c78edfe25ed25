#include "path_kernel.hpp"

#include <cmath>
#include <numbers>

namespace wdro::detail {

namespace {

// Lane-blocked path simulation. Every loop over `l` runs across kLanes
// independent streams and is written so the compiler can vectorise it,
// including the exp/log/sin/cos calls. Expansions are rare, so they are
// detected with a vector compare and applied in a scalar fix-up.
//
// M is the number of paths per stream (2 when antithetic). FixedP > 0 fixes
// the policy count at compile time; 0 reads it from the setup.
template <std::size_t M, std::size_t FixedP>
void run_block(const KernelSetup& S, std::size_t first, std::size_t count, PathBatch& out) {
    constexpr std::size_t W = kLanes;
    const std::size_t P = FixedP > 0 ? FixedP : S.n_policies;

    alignas(64) std::uint64_t s0[W], s1[W], s2[W], s3[W];
    for (std::size_t l = 0; l < W; ++l) {
        const Xoshiro256 g = Xoshiro256::for_stream(S.seed, first + l);
        s0[l] = g.s[0];
        s1[l] = g.s[1];
        s2[l] = g.s[2];
        s3[l] = g.s[3];
    }

    alignas(64) double logx[W], z[W], spare[W] = {};
    alignas(64) double x[2][W];
    alignas(64) double Q[2][kMaxPolicies][W], qc[2][kMaxPolicies][W], xs[2][kMaxPolicies][W];
    alignas(64) double prof[2][kMaxPolicies][W], cost[2][kMaxPolicies][W];

    for (std::size_t l = 0; l < W; ++l) logx[l] = S.log_x0;
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t p = 0; p < P; ++p) {
            const double q = S.policies[p].q_start;
            for (std::size_t l = 0; l < W; ++l) {
                Q[m][p][l] = q;
                qc[m][p][l] = std::pow(q, S.c);
                xs[m][p][l] = S.trigger_coef * std::pow(q, S.inv_gamma);
                prof[m][p][l] = 0.0;
                cost[m][p][l] = 0.0;
            }
        }
    }

    auto next_bits = [&](std::uint64_t* res) {
        for (std::size_t l = 0; l < W; ++l) {
            const std::uint64_t sum = s0[l] + s3[l];
            res[l] = ((sum << 23) | (sum >> 41)) + s0[l];
            const std::uint64_t t = s1[l] << 17;
            s2[l] ^= s0[l];
            s3[l] ^= s1[l];
            s1[l] ^= s2[l];
            s0[l] ^= s3[l];
            s2[l] ^= t;
            s3[l] = (s3[l] << 45) | (s3[l] >> 19);
        }
    };

    alignas(64) std::uint64_t b1[W], b2[W];
    constexpr double two_pi = 2.0 * std::numbers::pi;

    for (std::size_t n = 0; n < S.steps; ++n) {
        if ((n & 1U) == 0) {
            next_bits(b1);
            next_bits(b2);
            alignas(64) double radius[W], angle[W];
#pragma omp simd
            for (std::size_t l = 0; l < W; ++l) {
                const double u1 = static_cast<double>(static_cast<std::int64_t>(b1[l] >> 11) + 1) * 0x1.0p-53;
                radius[l] = std::sqrt(-2.0 * std::log(u1));
            }
            for (std::size_t l = 0; l < W; ++l)
                angle[l] = two_pi * static_cast<double>(static_cast<std::int64_t>(b2[l] >> 11)) * 0x1.0p-53;
            // Separate loops keep sin and cos from being fused into a
            // scalar sincos call.
#pragma omp simd
            for (std::size_t l = 0; l < W; ++l) z[l] = radius[l] * std::cos(angle[l]);
#pragma omp simd
            for (std::size_t l = 0; l < W; ++l) spare[l] = radius[l] * std::sin(angle[l]);
        } else {
            for (std::size_t l = 0; l < W; ++l) z[l] = spare[l];
        }

        for (std::size_t l = 0; l < W; ++l) x[0][l] = std::exp(logx[l]);
        if constexpr (M == 2) {
            const double mirror = S.mirror[n];
            for (std::size_t l = 0; l < W; ++l) x[1][l] = mirror / x[0][l];
        }

        const double hn = S.h[n];
        for (std::size_t p = 0; p < P; ++p) {
            if (n < S.policies[p].hold_steps) continue;
            for (std::size_t m = 0; m < M; ++m) {
                int any = 0;
                for (std::size_t l = 0; l < W; ++l) any |= x[m][l] > xs[m][p][l];
                if (!any) continue;
                for (std::size_t l = 0; l < W; ++l) {
                    if (!(x[m][l] > xs[m][p][l])) continue;
                    const double q_new = std::pow(x[m][l] / S.trigger_coef, S.gamma);
                    cost[m][p][l] += S.K * hn * (q_new - Q[m][p][l]);
                    Q[m][p][l] = q_new;
                    qc[m][p][l] = std::pow(q_new, S.c);
                    xs[m][p][l] = x[m][l];
                }
            }
        }

        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t p = 0; p < P; ++p)
                for (std::size_t l = 0; l < W; ++l) prof[m][p][l] += hn * x[m][l] * qc[m][p][l];

        for (std::size_t l = 0; l < W; ++l) logx[l] += S.drift + S.vol * z[l];
    }

    for (std::size_t l = 0; l < count; ++l) {
        const double x_end = std::exp(logx[l]);
        for (std::size_t m = 0; m < M; ++m) {
            const std::size_t path = (first + l) * M + m;
            out.terminal_x[path] = m == 0 ? x_end : S.mirror[S.steps] / x_end;
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t k = path * P + p;
                out.profit[k] = prof[m][p][l] * S.dt;
                out.cost[k] = cost[m][p][l];
                out.terminal_q[k] = Q[m][p][l];
            }
        }
    }
}

}  // namespace

void simulate_block(const KernelSetup& S, std::size_t first, std::size_t count, PathBatch& out) {
    const bool single = S.n_policies == 1;
    if (S.antithetic)
        single ? run_block<2, 1>(S, first, count, out) : run_block<2, 0>(S, first, count, out);
    else
        single ? run_block<1, 1>(S, first, count, out) : run_block<1, 0>(S, first, count, out);
}

}  // namespace wdro::detail
