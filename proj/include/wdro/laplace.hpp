#pragma once

#include "wdro/discounting.hpp"

#include <functional>

namespace wdro {

// Time-domain representations of the rate moments. They integrate the
// discount function h over s in [0, inf) with a double-exponential rule,
// independently of the rate-domain quadrature in rate_moment, and serve as
// oracles for it.

/// f(s; C) = (exp(-C s) + sqrt(pi C s) erf(sqrt(C s))) / sqrt(pi s), s > 0, C >= 0.
double laplace_kernel_f(double s, double C);

/// ∫_0^inf exp(-s r) f(s; C) ds by quadrature; analytically sqrt(C + r) / r.
double kernel_laplace_transform(double C, double r);

/// ∫ (theta(r) - 1)/r dF = ∫_0^inf h(s) ((sqrt 2/sigma) f(s; sigma^2/8) - 1/2) ds.
double moment_tmor_via_laplace(const WeightingDistribution& F, double sigma);
double moment_tmor_via_laplace(const std::function<double(double)>& h, double sigma);

/// ∫ theta dF = 1 + (1/(sqrt(2 pi) sigma)) ∫_0^inf t^(-3/2) exp(-sigma^2 t/8) (1 - h(t)) dt.
double moment_theta_via_laplace(const WeightingDistribution& F, double sigma);
double moment_theta_via_laplace(const std::function<double(double)>& one_minus_h, double sigma);

}  // namespace wdro
