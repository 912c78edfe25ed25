#include "wdro/analysis.hpp"

#include "wdro/errors.hpp"
#include "wdro/parallel.hpp"

#include <cmath>
#include <sstream>

namespace wdro {
namespace {

double margin_at(const Family& family, double p, const MarketParams& market) {
    return build_model(family.make(p), market).sp_margin();
}

void require_increasing(const std::vector<double>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("parameter grid must be strictly increasing");
}

StaticsRecord evaluate_point(const Family& family, double p, const MarketParams& market,
                             double q) {
    StaticsRecord rec;
    rec.param = p;
    try {
        const WeightingDistribution F = family.make(p);
        const EquilibriumModel model = build_model(F, market);
        rec.admissible = true;
        rec.sp_margin = model.sp_margin();
        rec.sp_holds = model.sp_holds();
        rec.x_star = x_star(model, q, Candidate::AllowInvalid);
        rec.prelec_at_0 = prelec(F, 0.0);
    } catch (const Error& e) {
        rec.admissible = false;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

Family Family::two_point_gap(double r, double delta) {
    return {"lambda", [=](double lambda) { return WeightingDistribution::two_point(r, lambda, delta); }};
}

Family Family::gamma_alpha(double phi, double beta) {
    return {"alpha",
            [=](double alpha) { return WeightingDistribution::gamma_shifted(phi, alpha, beta); }};
}

Family Family::degenerate_rate() {
    return {"r0", [](double r0) { return WeightingDistribution::degenerate(r0); }};
}

StaticsCurve sp_margin_curve(const Family& family, const std::vector<double>& grid,
                             const MarketParams& market, double q) {
    require_increasing(grid);
    StaticsCurve curve{family.parameter, std::vector<StaticsRecord>(grid.size())};
    parallel_for(grid.size(),
                 [&](std::size_t i) { curve.records[i] = evaluate_point(family, grid[i], market, q); });
    return curve;
}

ThresholdResult find_sp_threshold(const Family& family, double lo, double hi,
                                  const MarketParams& market, double margin_tol,
                                  int max_iterations) {
    if (!(lo < hi)) throw DomainError("threshold bracket needs lo < hi");
    double m_lo = margin_at(family, lo, market);
    const double m_hi = margin_at(family, hi, market);
    if (std::signbit(m_lo) == std::signbit(m_hi) || m_lo == 0.0 || m_hi == 0.0) {
        if (m_lo == 0.0) return {family.parameter, lo, hi, lo, 0.0, 0, true};
        if (m_hi == 0.0) return {family.parameter, lo, hi, hi, 0.0, 0, true};
        std::ostringstream os;
        os.precision(10);
        os << "sp_margin has the same sign at " << family.parameter << " = " << lo << " ("
           << m_lo << ") and " << hi << " (" << m_hi << ")";
        throw BracketError(os.str());
    }

    ThresholdResult result{family.parameter, lo, hi, lo, m_lo, 0, false};
    double a = lo, b = hi;
    for (int it = 1; it <= max_iterations; ++it) {
        const double mid = 0.5 * (a + b);
        const double m_mid = margin_at(family, mid, market);
        result.root = mid;
        result.residual = m_mid;
        result.iterations = it;
        if (std::abs(m_mid) < margin_tol) {
            result.converged = true;
            break;
        }
        if (mid <= a || mid >= b) break;  // bracket exhausted at double resolution
        if (std::signbit(m_mid) == std::signbit(m_lo)) {
            a = mid;
            m_lo = m_mid;
        } else {
            b = mid;
        }
    }
    return result;
}

StaticsCurve di_monotonicity_scan(const std::vector<double>& alpha_grid, double phi, double beta,
                                  const MarketParams& market, double q) {
    return sp_margin_curve(Family::gamma_alpha(phi, beta), alpha_grid, market, q);
}

bool BenchmarkOrdering::ordered(double slack) const {
    if (!x_e) return false;
    return x_r <= *x_e * (1.0 + slack) && *x_e <= x_rho0 * (1.0 + slack);
}

BenchmarkOrdering benchmark_ordering(double r, double lambda, double delta,
                                     const MarketParams& market, double q) {
    const WeightingDistribution F = WeightingDistribution::two_point(r, lambda, delta);
    const EquilibriumModel model = build_model(F, market);
    BenchmarkOrdering out;
    out.sp_margin = model.sp_margin();
    out.x_r = benchmark_x_o(r, market, q);
    out.x_rho0 = benchmark_x_o(rho(F, 0.0), market, q);
    if (model.sp_holds()) out.x_e = x_star(model, q);
    return out;
}

}  // namespace wdro
