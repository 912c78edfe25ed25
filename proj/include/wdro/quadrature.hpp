#pragma once

#include <functional>
#include <span>

namespace wdro {

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over the finite range
/// spanned by `breakpoints` (sorted, at least two entries). Each initial
/// panel is one breakpoint interval; the panel with the largest error
/// estimate is bisected until the total estimate meets
/// max(abs_tol, rel_tol * |value|).
///
/// Throws NumericError (carrying the achieved relative error) if the
/// interval budget is exhausted first.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options = {});

}  // namespace wdro
