#include "wdro/quadrature.hpp"

#include "wdro/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace wdro {
namespace {

std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", e);
    return buf;
}

// Kronrod abscissae (descending, last is the centre) and weights; the
// Gauss 7-point rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const std::function<double(double)>& f, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        kronrod += kWgk[j] * (f1[j] + f2[j]);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * kronrod;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    resasc *= std::abs(half);

    double error = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && error != 0.0)
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    // Floor at roundoff of the panel sum.
    error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() *
                                std::abs(kronrod * half));
    return {lo, hi, kronrod * half, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options) {
    if (breakpoints.size() < 2)
        throw DomainError("integrate_adaptive: need at least two breakpoints");

    std::priority_queue<Panel> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1])) continue;
        Panel p = gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        total_error += p.error;
        heap.push(p);
    }
    if (heap.empty()) return {};

    auto converged = [&] {
        return total_error <= std::max(options.abs_tol, options.rel_tol * std::abs(total));
    };
    while (!converged()) {
        if (static_cast<int>(heap.size()) >= options.max_intervals) {
            const double achieved = total == 0.0 ? total_error : total_error / std::abs(total);
            throw NumericError("adaptive quadrature did not converge; achieved relative error " +
                                   format_error(achieved),
                               achieved);
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(worst.lo < mid && mid < worst.hi)) {
            const double achieved = total == 0.0 ? total_error : total_error / std::abs(total);
            throw NumericError("adaptive quadrature hit the resolution limit; achieved relative error " +
                                   format_error(achieved),
                               achieved);
        }
        Panel left = gauss_kronrod_15(f, worst.lo, mid);
        Panel right = gauss_kronrod_15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the panels so the reported value does not carry the
    // running-update roundoff.
    QuadratureResult result;
    result.intervals = static_cast<int>(heap.size());
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    for (const Panel& p : panels) {
        result.value += p.value;
        result.abs_error += p.error;
    }
    return result;
}

}  // namespace wdro
