#pragma once

#include "wdro/config.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace wdro {

// Weighting distributions F over discount rates r. The induced discount
// function is the mixture of exponentials h(t) = ∫ exp(-r t) dF(r).

/// Point mass at r0: exponential discounting.
struct Degenerate {
    double r0;
};

/// Mass delta at r and 1 - delta at r + lambda (pseudo-exponential
/// discounting; lambda = 0 collapses to a point mass).
struct TwoPoint {
    double r;
    double lambda;
    double delta;
};

/// Gamma law with shape beta/alpha and scale alpha, shifted to [phi, inf).
/// Induces h(t) = (1 + alpha t)^(-beta/alpha) exp(-phi t).
struct GammaShifted {
    double phi;
    double alpha;
    double beta;

    double shape() const noexcept { return beta / alpha; }
};

struct RateAtom {
    double rate;
    double weight;
};

struct DiscreteMixture {
    std::vector<RateAtom> atoms;
};

/// Validated weighting distribution. Construct through the named factories;
/// all support points are strictly positive so that ∫(1/r)dF is finite.
class WeightingDistribution {
public:
    using Variant = std::variant<Degenerate, TwoPoint, GammaShifted, DiscreteMixture>;

    static WeightingDistribution degenerate(double r0);
    static WeightingDistribution two_point(double r, double lambda, double delta);
    static WeightingDistribution gamma_shifted(double phi, double alpha, double beta);
    static WeightingDistribution mixture(std::vector<RateAtom> atoms);

    /// Builds from a config block with `kind = degenerate | two_point |
    /// gamma_shifted | mixture` and keys named after the variant fields
    /// (`atoms = rate:weight, ...` for mixtures).
    static WeightingDistribution from_config(const ConfigBlock& block);

    const Variant& variant() const noexcept { return variant_; }
    std::string kind() const;
    std::string describe() const;

    /// Infimum of the support.
    double min_rate() const;

private:
    explicit WeightingDistribution(Variant v) : variant_(std::move(v)) {}

    Variant variant_;
};

/// h(t) = ∫ exp(-r t) dF(r), closed form per variant. t must be >= 0.
double h_eval(const WeightingDistribution& F, double t);

/// 1 - h(t) without cancellation for small t.
double one_minus_h(const WeightingDistribution& F, double t);

/// Analytic derivatives of h: order 0, 1 or 2.
double h_derivative(const WeightingDistribution& F, double t, int order);

/// ∫ g(r) dF(r). Exact sums for atomic variants; adaptive Gauss-Kronrod with
/// relative tolerance 1e-9 for GammaShifted. Throws NumericError on
/// quadrature failure.
double rate_moment(const WeightingDistribution& F, const std::function<double(double)>& g);

/// Instantaneous discount rate rho(t) = -h'(t)/h(t).
double rho(const WeightingDistribution& F, double t);

/// Prelec's decreasing-impatience measure -(ln h)''/(ln h)'.
double prelec(const WeightingDistribution& F, double t);

}  // namespace wdro
