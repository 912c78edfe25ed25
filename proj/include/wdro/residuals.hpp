#pragma once

#include "wdro/equilibrium.hpp"

#include <limits>
#include <string>
#include <vector>

namespace wdro {

enum class Region { Continuation, Expansion };

const char* to_string(Region region);

struct ResidualNode {
    double x = 0.0;
    double q = 0.0;
    Region region = Region::Continuation;
    /// kappa = sigma^2 x^2 V_xx / 2 + x q^(1-1/gamma) - ∫ r w dF.
    double kappa = 0.0;
    /// kappa relative to |x q^(1-1/gamma)| + |∫ r w dF|.
    double kappa_scaled = 0.0;
    /// V_q - K.
    double vq_gap = 0.0;
};

struct ResidualSummary {
    std::size_t continuation_nodes = 0;
    std::size_t expansion_nodes = 0;
    double max_abs_kappa_scaled_continuation = 0.0;
    double max_vq_gap_continuation = -std::numeric_limits<double>::infinity();
    std::size_t continuation_vq_above_k = 0;
    double max_abs_vq_gap_expansion = 0.0;
    double max_kappa_expansion = -std::numeric_limits<double>::infinity();
};

struct ResidualReport {
    std::vector<double> x_grid;
    std::vector<double> q_grid;
    std::vector<ResidualNode> nodes;  // q-major: nodes[iq * x_grid.size() + ix]
    std::vector<std::string> warnings;

    ResidualSummary summary() const;
};

/// Bellman-system residuals on the tensor grid. V_xx uses a central
/// difference whose step is the local x-grid spacing; all stencil points
/// are evaluated on the node's own branch of the closed form. Non-positive
/// x values are dropped with a warning.
ResidualReport bellman_residuals(const EquilibriumModel& model, std::vector<double> x_grid,
                                 const std::vector<double>& q_grid,
                                 Candidate mode = Candidate::RequireValid);

/// Central difference of dV/dq in x at (x, q) with the given step, taken
/// inside the rate integral on a fixed branch. At x = x*(q) the smooth
/// pasting condition makes this zero.
double marginal_slope_fd(const EquilibriumModel& model, double x, double q, double step,
                         Branch branch, Candidate mode = Candidate::RequireValid);

}  // namespace wdro
