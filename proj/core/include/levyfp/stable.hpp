#pragma once

#include "levyfp/quadrature.hpp"
#include "levyfp/rng.hpp"

namespace levyfp {

// Strictly stable law, unit scale.
//
// Parametrization: for alpha < 2 the characteristic function is
//
//   E exp(i l Y) = exp( -|l|^alpha * exp(-i pi alpha (rho - 1/2) sgn l) ),
//
// where rho = P(Y > 0) is the positivity parameter.  For alpha = 2 the unit
// scale is fixed as Y ~ normal(0,1) (not the variance-2 law the formula above
// would give), so Brownian results read in standard units.  Admissibility
// requires alpha*rho <= 1 and alpha*(1-rho) <= 1; the one-sided boundary
// cases rho in {0,1} (subordinator or negative of one) are excluded.
struct StableParams {
    double alpha = 2.0;
    double rho = 0.5;
    double beta = 0.0; // classical skewness; must agree with rho

    // Validates ranges and the consistency of rho with (alpha, beta); throws
    // std::invalid_argument / unsupported_regime_error on violation.
    static StableParams make(double alpha, double beta);
    static StableParams make_symmetric(double alpha) { return make(alpha, 0.0); }

    double eta() const { return 1.0 / alpha; }       // self-similarity index
    double rho_bar() const { return 1.0 - rho; }     // P(Y < 0)

    // Law of -Y.
    StableParams dual() const { return StableParams{alpha, 1.0 - rho, -beta}; }
};

// Positivity parameter from (alpha, beta).  alpha = 1 is supported only for
// beta = 0 (the symmetric Cauchy law; skewed alpha = 1 laws are not strictly
// stable without a drift term).
double rho_from_skewness(double alpha, double beta);

// Density of Y at x, by adaptive quadrature of a rotated-contour inversion
// integral (all registry alphas, any real x).
double stable_density(const StableParams& p, double x, const QuadOptions& opt = {});

// Closed form of the density at the origin: Gamma(1+1/alpha) sin(pi rho)/pi
// for alpha < 2, 1/sqrt(2 pi) for alpha = 2.
double stable_density_at_zero(const StableParams& p);

// P(Y > x) for any real x; stable_cdf is 1 - stable_tail_upper.
double stable_tail_upper(const StableParams& p, double x, const QuadOptions& opt = {});
double stable_cdf(const StableParams& p, double x, const QuadOptions& opt = {});

// One draw of Y (Chambers-Mallows-Stuck; consumes exactly two uniforms).
double sample_stable(const StableParams& p, RngStream& rng);

// Density of the one-sided positive stable law S with E exp(-q S) =
// exp(-q^eta), 0 < eta < 1, via the finite-interval (Kanter) representation.
// Used by the spectrally-positive first-passage reduction.
double positive_stable_density(double eta, double u, const QuadOptions& opt = {});

// Levy measure of Y for alpha < 2: density c_+ x^{-1-alpha} on (0,inf) and
// c_- |x|^{-1-alpha} on (-inf,0), with
//   c_+ = Gamma(1+alpha) sin(pi alpha rho) / pi,
//   c_- = Gamma(1+alpha) sin(pi alpha (1-rho)) / pi.
// Zero for alpha = 2.
double levy_coeff_pos(const StableParams& p);
double levy_coeff_neg(const StableParams& p);

} // namespace levyfp
