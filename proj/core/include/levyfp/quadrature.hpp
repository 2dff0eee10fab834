#pragma once

#include <functional>

namespace levyfp {

// Adaptive quadrature defaults used throughout the library.  Checks that
// need tighter results (density-at-zero agreement, closed-form identities)
// pass their own options.
struct QuadOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_intervals = 2000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // conservative estimate
    bool converged = false;
    int evaluations = 0;
};

// Globally adaptive Gauss–Kronrod (7,15) on [a, b]: repeatedly bisects the
// interval with the largest error estimate until the summed estimate meets
// max(abs_tol, rel_tol * |integral|) or the interval budget runs out.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Integral over [a, +inf) via the substitution x = a + t/(1-t).  The
// integrand must decay fast enough to be integrable; endpoint t = 1 is never
// evaluated (Kronrod nodes are interior).
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            const QuadOptions& opt = {});

} // namespace levyfp
