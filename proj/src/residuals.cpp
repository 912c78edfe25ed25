#include "wdro/residuals.hpp"

#include "wdro/errors.hpp"
#include "wdro/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wdro {
namespace {

double fd_step(const std::vector<double>& grid, std::size_t i) {
    double step = std::numeric_limits<double>::infinity();
    if (i > 0) step = std::min(step, grid[i] - grid[i - 1]);
    if (i + 1 < grid.size()) step = std::min(step, grid[i + 1] - grid[i]);
    if (!std::isfinite(step)) step = 1e-3 * grid[i];
    // Keep the stencil inside x > 0.
    return std::min(step, 0.5 * grid[i]);
}

ResidualNode evaluate_node(const EquilibriumModel& model, double x, double q, double step) {
    const MarketParams& m = model.market();
    ResidualNode node;
    node.x = x;
    node.q = q;
    node.region = x <= x_star(model, q, Candidate::AllowInvalid) ? Region::Continuation
                                                                   : Region::Expansion;
    const Branch branch =
        node.region == Region::Continuation ? Branch::Continuation : Branch::Expansion;

    // The second difference is taken inside the rate integral so that all
    // stencil points share one quadrature rule: ∫ D2 w dF is exactly the
    // central difference of V evaluated with that rule. The diffusion and
    // discount terms are integrated together because the integrand is
    // bounded away from zero (it equals kappa - profit), while the diffusion
    // term alone can cross zero in the expansion region.
    const double half_s2x2 = 0.5 * m.sigma * m.sigma * x * x;
    const double generator = rate_moment(model.distribution(), [&](double r) {
        const double w0 = w_value(model, x, q, r, branch);
        const double wp = w_value(model, x + step, q, r, branch);
        const double wm = w_value(model, x - step, q, r, branch);
        return half_s2x2 * ((wp - w0) + (wm - w0)) / (step * step) - r * w0;
    });
    const double discount_term =
        rate_moment(model.distribution(), [&](double r) { return r * w_value(model, x, q, r, branch); });
    const double profit = profit_flow(m, x, q);
    node.kappa = generator + profit;
    node.kappa_scaled = node.kappa / (std::abs(profit) + std::abs(discount_term));
    node.vq_gap = v_q_marginal(model, x, q, Candidate::AllowInvalid) - m.K;
    return node;
}

}  // namespace

const char* to_string(Region region) {
    return region == Region::Continuation ? "continuation" : "expansion";
}

ResidualSummary ResidualReport::summary() const {
    ResidualSummary s;
    for (const ResidualNode& n : nodes) {
        if (n.region == Region::Continuation) {
            ++s.continuation_nodes;
            s.max_abs_kappa_scaled_continuation =
                std::max(s.max_abs_kappa_scaled_continuation, std::abs(n.kappa_scaled));
            s.max_vq_gap_continuation = std::max(s.max_vq_gap_continuation, n.vq_gap);
            if (n.vq_gap > 0.0) ++s.continuation_vq_above_k;
        } else {
            ++s.expansion_nodes;
            s.max_abs_vq_gap_expansion = std::max(s.max_abs_vq_gap_expansion, std::abs(n.vq_gap));
            s.max_kappa_expansion = std::max(s.max_kappa_expansion, n.kappa);
        }
    }
    return s;
}

double marginal_slope_fd(const EquilibriumModel& model, double x, double q, double step,
                         Branch branch, Candidate mode) {
    require_valid(model, mode);
    if (!(step > 0.0) || !(step < x)) throw DomainError("marginal_slope_fd: need 0 < step < x");
    return rate_moment(model.distribution(), [&](double r) {
        return (w_q_marginal(model, x + step, q, r, branch) -
                w_q_marginal(model, x - step, q, r, branch)) /
               (2.0 * step);
    });
}

ResidualReport bellman_residuals(const EquilibriumModel& model, std::vector<double> x_grid,
                                 const std::vector<double>& q_grid, Candidate mode) {
    require_valid(model, mode);
    ResidualReport report;
    const auto first_positive = std::partition_point(x_grid.begin(), x_grid.end(),
                                                     [](double x) { return !(x > 0.0); });
    if (!std::is_sorted(x_grid.begin(), x_grid.end()))
        throw DomainError("bellman_residuals: x grid must be sorted");
    if (first_positive != x_grid.begin()) {
        std::ostringstream os;
        os << "dropped " << (first_positive - x_grid.begin()) << " x-grid point(s) at x <= 0";
        report.warnings.push_back(os.str());
        x_grid.erase(x_grid.begin(), first_positive);
    }
    if (x_grid.empty()) throw ValidationError("bellman_residuals: no positive x-grid points");
    for (double q : q_grid)
        if (!(q > 0.0)) throw DomainError("bellman_residuals: q grid must be positive");

    report.x_grid = x_grid;
    report.q_grid = q_grid;
    const std::size_t nx = x_grid.size();
    report.nodes.resize(nx * q_grid.size());
    parallel_for(report.nodes.size(), [&](std::size_t k) {
        const std::size_t iq = k / nx;
        const std::size_t ix = k % nx;
        report.nodes[k] = evaluate_node(model, x_grid[ix], q_grid[iq], fd_step(x_grid, ix));
    });
    return report;
}

}  // namespace wdro
