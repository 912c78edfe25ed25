#pragma once

#include "wdro/equilibrium.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wdro {

/// One-parameter family of weighting distributions.
struct Family {
    std::string parameter;
    std::function<WeightingDistribution(double)> make;

    /// TwoPoint(r, lambda, delta) indexed by lambda.
    static Family two_point_gap(double r, double delta);
    /// GammaShifted(phi, alpha, beta) indexed by alpha.
    static Family gamma_alpha(double phi, double beta);
    /// Degenerate(r0) indexed by r0.
    static Family degenerate_rate();
};

struct StaticsRecord {
    double param = 0.0;
    bool admissible = false;
    std::string error;  // set when the model could not be built
    double x_star = 0.0;  // raw candidate trigger at the requested q
    double sp_margin = 0.0;
    bool sp_holds = false;
    double prelec_at_0 = 0.0;
};

struct StaticsCurve {
    std::string parameter;
    std::vector<StaticsRecord> records;
};

/// One record per grid point (grid must be strictly increasing). Points
/// whose model cannot be built are flagged rather than aborting the sweep.
StaticsCurve sp_margin_curve(const Family& family, const std::vector<double>& grid,
                             const MarketParams& market, double q = 1.0);

struct ThresholdResult {
    std::string parameter;
    double lo = 0.0;
    double hi = 0.0;
    double root = 0.0;
    double residual = 0.0;  // sp_margin at root
    int iterations = 0;
    bool converged = false;
};

/// Bisection on sp_margin until |margin| < margin_tol or max_iterations.
/// Throws BracketError when the bracket ends share a sign.
ThresholdResult find_sp_threshold(const Family& family, double lo, double hi,
                                  const MarketParams& market, double margin_tol = 1e-9,
                                  int max_iterations = 200);

/// x*(alpha) for GammaShifted(phi, alpha, beta); beta + phi, and hence the
/// current impatience rho(0), is the same for every grid point.
StaticsCurve di_monotonicity_scan(const std::vector<double>& alpha_grid, double phi, double beta,
                                  const MarketParams& market, double q);

struct BenchmarkOrdering {
    double x_r = 0.0;                // exponential trigger at the lower rate r
    std::optional<double> x_e;       // mixture trigger; empty if SP fails
    double x_rho0 = 0.0;             // exponential trigger at rho(0)
    double sp_margin = 0.0;

    /// x_r <= x_e <= x_rho0 within slack; false if x_e is unavailable.
    bool ordered(double slack = 1e-12) const;
};

BenchmarkOrdering benchmark_ordering(double r, double lambda, double delta,
                                     const MarketParams& market, double q);

}  // namespace wdro
