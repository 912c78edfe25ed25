#include "wdro/laplace.hpp"

#include "wdro/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace wdro {
namespace {

constexpr double kTol = 1e-12;

// All integrals below are taken over u = sqrt(s), which removes the s^(-1/2)
// endpoint behaviour of the kernel and of the t^(-3/2)(1 - h) integrand.
template <class F>
double integrate_half_line(F&& f, const char* what) {
    boost::math::quadrature::exp_sinh<double> rule;
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        value = rule.integrate(f, 0.0, std::numeric_limits<double>::infinity(), kTol, &error, &l1);
    } catch (const std::exception& e) {
        throw NumericError(std::string(what) + ": " + e.what(), error);
    }
    if (!std::isfinite(value)) throw NumericError(std::string(what) + ": non-finite result", error);
    // exp_sinh reports error relative to the L1 norm; reject clearly
    // unconverged results.
    if (error > 1e-8 * std::max(l1, std::abs(value)))
        throw NumericError(std::string(what) + ": time-domain quadrature did not converge",
                           error / std::max(std::abs(value), 1e-300));
    return value;
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
}

}  // namespace

double laplace_kernel_f(double s, double C) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("laplace_kernel_f: s must be > 0");
    if (!(C >= 0.0)) throw DomainError("laplace_kernel_f: C must be >= 0");
    const double root = std::sqrt(C * s);
    return (std::exp(-C * s) + std::sqrt(std::numbers::pi) * root * std::erf(root)) /
           std::sqrt(std::numbers::pi * s);
}

double kernel_laplace_transform(double C, double r) {
    if (!(C >= 0.0) || !(r > 0.0)) throw DomainError("kernel_laplace_transform: need C >= 0 and r > 0");
    const double sqrt_c = std::sqrt(C);
    // 2u f(u^2; C) = (2/sqrt(pi)) (exp(-C u^2) + sqrt(pi C) u erf(sqrt(C) u)).
    auto integrand = [&](double u) {
        const double s = u * u;
        if (std::exp(-r * s) == 0.0) return 0.0;
        return 2.0 * std::exp(-r * s) *
               (std::exp(-C * s) * std::numbers::inv_sqrtpi + sqrt_c * u * std::erf(sqrt_c * u));
    };
    return integrate_half_line(integrand, "kernel transform integral");
}

double moment_tmor_via_laplace(const std::function<double(double)>& h, double sigma) {
    require_sigma(sigma);
    const double C = sigma * sigma / 8.0;
    const double sqrt_c = std::sqrt(C);
    const double scale = std::numbers::sqrt2 / sigma;
    // (sqrt2/sigma) f - 1/2 = (sqrt2/sigma)(exp(-Cs)/sqrt(pi s) - sqrt(C) erfc(sqrt(Cs)));
    // the erfc form avoids cancelling against 1/2 for large s.
    auto integrand = [&](double u) {
        const double s = u * u;
        const double decay = std::exp(-C * s);
        if (decay == 0.0) return 0.0;
        const double bracket = 2.0 * decay * std::numbers::inv_sqrtpi -
                               2.0 * u * sqrt_c * std::erfc(sqrt_c * u);
        return h(s) * scale * bracket;
    };
    return integrate_half_line(integrand, "tmor time-domain moment");
}

double moment_tmor_via_laplace(const WeightingDistribution& F, double sigma) {
    return moment_tmor_via_laplace([&](double s) { return h_eval(F, s); }, sigma);
}

double moment_theta_via_laplace(const std::function<double(double)>& one_minus_h, double sigma) {
    require_sigma(sigma);
    const double C = sigma * sigma / 8.0;
    // t = u^2: t^(-3/2) dt = 2 u^(-2) du; (1 - h(u^2))/u^2 stays bounded at 0.
    auto integrand = [&](double u) {
        const double t = u * u;
        const double decay = std::exp(-C * t);
        if (t == 0.0 || decay == 0.0) return 0.0;
        return 2.0 * decay * one_minus_h(t) / t;
    };
    const double integral = integrate_half_line(integrand, "theta time-domain moment");
    return 1.0 + integral / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

double moment_theta_via_laplace(const WeightingDistribution& F, double sigma) {
    return moment_theta_via_laplace([&](double t) { return one_minus_h(F, t); }, sigma);
}

}  // namespace wdro
