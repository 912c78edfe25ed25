#include "wdro/discounting.hpp"

#include "wdro/errors.hpp"
#include "wdro/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wdro {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_time(double t, const char* op) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError(std::string(op) + ": time must be finite and >= 0");
}

std::vector<RateAtom> atoms_of(const TwoPoint& d) {
    return {{d.r, d.delta}, {d.r + d.lambda, 1.0 - d.delta}};
}

// Exponentially tilted atom weights p_i exp(-r_i t) / h(t), computed relative
// to the smallest rate so that large t does not underflow.
std::vector<double> tilted_weights(const std::vector<RateAtom>& atoms, double t) {
    double r_lo = atoms.front().rate;
    for (const auto& a : atoms) r_lo = std::min(r_lo, a.rate);
    std::vector<double> w(atoms.size());
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        w[i] = atoms[i].weight * std::exp(-(atoms[i].rate - r_lo) * t);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

double atomic_rho(const std::vector<RateAtom>& atoms, double t) {
    const auto w = tilted_weights(atoms, t);
    double mean = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) mean += w[i] * atoms[i].rate;
    return mean;
}

double atomic_prelec(const std::vector<RateAtom>& atoms, double t) {
    const auto w = tilted_weights(atoms, t);
    double mean = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) mean += w[i] * atoms[i].rate;
    double var = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double d = atoms[i].rate - mean;
        var += w[i] * d * d;
    }
    return var / mean;
}

double gamma_rho(const GammaShifted& g, double t) { return g.beta / (1.0 + g.alpha * t) + g.phi; }

double gamma_log_h(const GammaShifted& g, double t) {
    return -g.shape() * std::log1p(g.alpha * t) - g.phi * t;
}

// ∫ g(phi + alpha y) y^(k-1) e^(-y) / Gamma(k) dy over y in [0, Y], where Y
// leaves an upper-tail probability of 1e-16. [0, 1] is integrated in
// s = y^k, which removes the y^(k-1) singularity for small shapes.
double gamma_moment(const GammaShifted& d, const std::function<double(double)>& g) {
    const double k = d.shape();
    const double scale = d.alpha;
    const double y_max = boost::math::gamma_q_inv(k, 1e-16);
    const QuadratureOptions opts{1e-9, 0.0, 4000};

    double head = 0.0;
    const double y_split = std::min(1.0, y_max);
    const double head_weight = std::exp(-std::lgamma(k + 1.0));
    if (head_weight > 0.0) {
        std::vector<double> breaks;
        for (double y : {0.0, 1e-9, 1e-6, 1e-3, 1e-2, 0.1, 0.3, 0.6, 1.0}) {
            if (y <= y_split) breaks.push_back(std::pow(y, k));
        }
        if (breaks.back() < std::pow(y_split, k)) breaks.push_back(std::pow(y_split, k));
        auto integrand = [&](double s) {
            const double y = s > 0.0 ? std::exp(std::log(s) / k) : 0.0;
            return g(d.phi + scale * y) * std::exp(-y);
        };
        head = head_weight * integrate_adaptive(integrand, breaks, opts).value;
    }

    double tail = 0.0;
    if (y_max > 1.0) {
        std::vector<double> breaks{1.0, y_max};
        for (double y = 2.0; y < y_max; y *= 2.0) breaks.push_back(y);
        const double sd = std::sqrt(k);
        for (int j = -8; j <= 8; ++j) {
            const double y = k + j * sd;
            if (y > 1.0 && y < y_max) breaks.push_back(y);
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        const double log_norm = std::lgamma(k);
        auto integrand = [&](double y) {
            return g(d.phi + scale * y) * std::exp((k - 1.0) * std::log(y) - y - log_norm);
        };
        tail = integrate_adaptive(integrand, breaks, opts).value;
    }
    return head + tail;
}

}  // namespace

WeightingDistribution WeightingDistribution::degenerate(double r0) {
    if (!(r0 > 0.0) || !std::isfinite(r0))
        throw DomainError("degenerate weighting: r0 must be finite and > 0");
    return WeightingDistribution(Degenerate{r0});
}

WeightingDistribution WeightingDistribution::two_point(double r, double lambda, double delta) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("two_point weighting: r must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DomainError("two_point weighting: lambda must be >= 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("two_point weighting: delta must lie in (0, 1)");
    return WeightingDistribution(TwoPoint{r, lambda, delta});
}

WeightingDistribution WeightingDistribution::gamma_shifted(double phi, double alpha, double beta) {
    if (!(phi > 0.0) || !std::isfinite(phi))
        throw DomainError("gamma_shifted weighting: phi must be > 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("gamma_shifted weighting: alpha must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw DomainError("gamma_shifted weighting: beta must be > 0");
    return WeightingDistribution(GammaShifted{phi, alpha, beta});
}

WeightingDistribution WeightingDistribution::mixture(std::vector<RateAtom> atoms) {
    if (atoms.empty()) throw DomainError("mixture weighting: no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.rate > 0.0) || !std::isfinite(a.rate))
            throw DomainError("mixture weighting: rates must be finite and > 0");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw DomainError("mixture weighting: weights must be > 0");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("mixture weighting: weights must sum to 1 (got " + std::to_string(total) +
                          ")");
    return WeightingDistribution(DiscreteMixture{std::move(atoms)});
}

WeightingDistribution WeightingDistribution::from_config(const ConfigBlock& block) {
    const std::string kind = block.get_string("kind");
    try {
        if (kind == "degenerate") return degenerate(block.get_double("r0"));
        if (kind == "two_point")
            return two_point(block.get_double("r"), block.get_double("lambda"),
                             block.get_double("delta"));
        if (kind == "gamma_shifted")
            return gamma_shifted(block.get_double("phi"), block.get_double("alpha"),
                                 block.get_double("beta"));
        if (kind == "mixture") {
            std::vector<RateAtom> atoms;
            for (auto [rate, weight] : block.get_pairs("atoms")) atoms.push_back({rate, weight});
            return mixture(std::move(atoms));
        }
    } catch (const DomainError& e) {
        throw ConfigError(block.name(), e.what());
    }
    throw ConfigError(block.name() + ".kind", "unknown weighting kind '" + kind + "'");
}

std::string WeightingDistribution::kind() const {
    return std::visit(Overloaded{[](const Degenerate&) { return std::string("degenerate"); },
                                 [](const TwoPoint&) { return std::string("two_point"); },
                                 [](const GammaShifted&) { return std::string("gamma_shifted"); },
                                 [](const DiscreteMixture&) { return std::string("mixture"); }},
                      variant_);
}

std::string WeightingDistribution::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{[&](const Degenerate& d) { os << "degenerate(r0=" << d.r0 << ")"; },
                          [&](const TwoPoint& d) {
                              os << "two_point(r=" << d.r << ", lambda=" << d.lambda
                                 << ", delta=" << d.delta << ")";
                          },
                          [&](const GammaShifted& d) {
                              os << "gamma_shifted(phi=" << d.phi << ", alpha=" << d.alpha
                                 << ", beta=" << d.beta << ")";
                          },
                          [&](const DiscreteMixture& d) {
                              os << "mixture(";
                              for (std::size_t i = 0; i < d.atoms.size(); ++i)
                                  os << (i ? ", " : "") << d.atoms[i].rate << ":" << d.atoms[i].weight;
                              os << ")";
                          }},
               variant_);
    return os.str();
}

double WeightingDistribution::min_rate() const {
    return std::visit(Overloaded{[](const Degenerate& d) { return d.r0; },
                                 [](const TwoPoint& d) { return d.r; },
                                 [](const GammaShifted& d) { return d.phi; },
                                 [](const DiscreteMixture& d) {
                                     double m = d.atoms.front().rate;
                                     for (const auto& a : d.atoms) m = std::min(m, a.rate);
                                     return m;
                                 }},
                      variant_);
}

double h_eval(const WeightingDistribution& F, double t) {
    require_time(t, "h_eval");
    return std::visit(
        Overloaded{[&](const Degenerate& d) { return std::exp(-d.r0 * t); },
                   [&](const TwoPoint& d) {
                       return d.delta * std::exp(-d.r * t) +
                              (1.0 - d.delta) * std::exp(-(d.r + d.lambda) * t);
                   },
                   [&](const GammaShifted& d) { return std::exp(gamma_log_h(d, t)); },
                   [&](const DiscreteMixture& d) {
                       double s = 0.0;
                       for (const auto& a : d.atoms) s += a.weight * std::exp(-a.rate * t);
                       return s;
                   }},
        F.variant());
}

double one_minus_h(const WeightingDistribution& F, double t) {
    require_time(t, "one_minus_h");
    return std::visit(
        Overloaded{[&](const Degenerate& d) { return -std::expm1(-d.r0 * t); },
                   [&](const TwoPoint& d) {
                       return -d.delta * std::expm1(-d.r * t) -
                              (1.0 - d.delta) * std::expm1(-(d.r + d.lambda) * t);
                   },
                   [&](const GammaShifted& d) { return -std::expm1(gamma_log_h(d, t)); },
                   [&](const DiscreteMixture& d) {
                       double s = 0.0;
                       for (const auto& a : d.atoms) s -= a.weight * std::expm1(-a.rate * t);
                       return s;
                   }},
        F.variant());
}

double h_derivative(const WeightingDistribution& F, double t, int order) {
    require_time(t, "h_derivative");
    if (order < 0 || order > 2) throw DomainError("h_derivative: order must be 0, 1 or 2");
    if (order == 0) return h_eval(F, t);
    auto atomic = [&](const std::vector<RateAtom>& atoms) {
        double s = 0.0;
        for (const auto& a : atoms)
            s += a.weight * std::pow(-a.rate, order) * std::exp(-a.rate * t);
        return s;
    };
    return std::visit(Overloaded{[&](const Degenerate& d) { return atomic({{d.r0, 1.0}}); },
                                 [&](const TwoPoint& d) { return atomic(atoms_of(d)); },
                                 [&](const GammaShifted& d) {
                                     const double h = std::exp(gamma_log_h(d, t));
                                     const double rate = gamma_rho(d, t);
                                     if (order == 1) return -rate * h;
                                     const double u = 1.0 + d.alpha * t;
                                     return h * (rate * rate + d.alpha * d.beta / (u * u));
                                 },
                                 [&](const DiscreteMixture& d) { return atomic(d.atoms); }},
                      F.variant());
}

double rate_moment(const WeightingDistribution& F, const std::function<double(double)>& g) {
    return std::visit(Overloaded{[&](const Degenerate& d) { return g(d.r0); },
                                 [&](const TwoPoint& d) {
                                     return d.delta * g(d.r) + (1.0 - d.delta) * g(d.r + d.lambda);
                                 },
                                 [&](const GammaShifted& d) { return gamma_moment(d, g); },
                                 [&](const DiscreteMixture& d) {
                                     double s = 0.0;
                                     for (const auto& a : d.atoms) s += a.weight * g(a.rate);
                                     return s;
                                 }},
                      F.variant());
}

double rho(const WeightingDistribution& F, double t) {
    require_time(t, "rho");
    return std::visit(Overloaded{[](const Degenerate& d) { return d.r0; },
                                 [&](const TwoPoint& d) { return atomic_rho(atoms_of(d), t); },
                                 [&](const GammaShifted& d) { return gamma_rho(d, t); },
                                 [&](const DiscreteMixture& d) { return atomic_rho(d.atoms, t); }},
                      F.variant());
}

double prelec(const WeightingDistribution& F, double t) {
    require_time(t, "prelec");
    return std::visit(Overloaded{[](const Degenerate&) { return 0.0; },
                                 [&](const TwoPoint& d) { return atomic_prelec(atoms_of(d), t); },
                                 [&](const GammaShifted& d) {
                                     // (ln h)'' = alpha beta / u^2 with u = 1 + alpha t.
                                     const double u = 1.0 + d.alpha * t;
                                     return d.alpha * d.beta / (u * u) / gamma_rho(d, t);
                                 },
                                 [&](const DiscreteMixture& d) { return atomic_prelec(d.atoms, t); }},
                      F.variant());
}

}  // namespace wdro
