#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levyfp/meander.hpp"
#include "levyfp/models.hpp"
#include "levyfp/quadrature.hpp"
#include "levyfp/simulate.hpp"
#include "levyfp/stable.hpp"

namespace levyfp {

// Outcome of one exact-identity evaluation.  Deterministic instances carry
// band = quadrature tolerance; Monte Carlo instances carry a band that
// already includes the sampling allowance.  `rel_err` is only meaningful
// when `rel_err_valid` (rhs != 0).
struct IdentityReport {
    std::string id;     // vigon | bridge | meander_conv | eq22 | DA | LLT |
                        // equivtails_index
    std::string model;  // process or stable-law label
    double t = 0.0;     // time context, 0 when not applicable
    double x = 0.0;     // space context, 0 when not applicable
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    bool rel_err_valid = false;
    double band = 0.0;  // acceptance band (absolute, on the compared scale)
    bool pass = false;
    bool inconclusive = false; // input table too noisy to decide either way
    std::string notes;  // method description for the run log
};

// ---------------------------------------------------------------------------
// Bridge product integral [id "bridge"]
// ---------------------------------------------------------------------------

// Checks (Gamma(rho)Gamma(rho_bar))^{-1} * int_0^inf g(z) g*(z) dz against
// 2^{-(1+1/alpha)} * f(0), the pinned instance of the uniform-maximum-time
// identity for the process pinned at zero over [0, 2].
//
// alpha = 2: both meander endpoint densities have the closed Rayleigh form,
// so the left side is evaluated by pure quadrature (the table may be null)
// and the band is 1e-6 absolute.  alpha < 2: the left side integrates the
// table histograms (boundary and tail extensions included); the band is
// rel_tol * rhs, and if the propagated table CI exceeds 20% of the value the
// report is marked inconclusive instead of failed.
IdentityReport bridge_integral_check(const StableParams& p,
                                     const MeanderTable* table,
                                     double rel_tol = 0.05,
                                     const QuadOptions& quad = {});

// ---------------------------------------------------------------------------
// Meander endpoint convolution [id "meander_conv"]
// ---------------------------------------------------------------------------

// Checks, for each grid x, the reproduction of the meander endpoint density
// by its own entrance-law convolution:
//   g(x) = int_0^1 ds int_0^x s^{-1/alpha - rho_bar} g(s^{-1/alpha} y)
//                         f_{1-s}(x - y) dy,
// with f_t(w) = t^{-1/alpha} f(t^{-1/alpha} w) the free density.  The inner
// integral is evaluated in the variable w = (x-y)/(1-s)^{1/alpha} so the
// near-delta factor at s -> 1 becomes the fixed density f(w); the outer
// integral substitutes away the integrable s^{-rho_bar} head at s -> 0.
// alpha = 2 runs fully closed-form (table may be null, rel_tol 0.02 is
// attainable); alpha < 2 reads g off the table and compares against the
// table's own value (self-consistency, rel_tol 0.05).  A non-converged
// quadrature raises std::runtime_error naming the corner.
std::vector<IdentityReport> meander_convolution_check(
    const StableParams& p, const MeanderTable* table,
    const std::vector<double>& x_grid, double rel_tol,
    const QuadOptions& quad = {});

// ---------------------------------------------------------------------------
// Ladder-height tail convolution [id "vigon"]
// ---------------------------------------------------------------------------

// Two estimates of the first descending ladder height's tail at each grid x
// for the Gaussian-plus-negative-jumps model, using the exact step-level
// duality: P(first descending ladder height > x) equals the expected sum of
// the step law's lower tail F_bar(x + T_j) over ascending ladder partial
// sums T_j (T_0 = 0 included).  The left side is the direct tail frequency
// of simulated descending first ladder heights; the right side evaluates the
// sum over the simulated ascending chains with F_bar computed exactly
// (Gaussian convolved with the Poisson mixture of exponential jump sums).
// Truncation of chains at tables.y_max is noted in `notes`.  Pass when
// |lhs - rhs| <= max(rel_tol * max(lhs, rhs), 3 * combined se).
// Requires the compound-Poisson kind; throws unsupported_regime_error
// otherwise, insufficient_samples_error when the tables are empty.
std::vector<IdentityReport> vigon_check(const ModelSpec& m,
                                        const LadderData& tables,
                                        const std::vector<double>& x_grid,
                                        double rel_tol = 0.05);

// ---------------------------------------------------------------------------
// Excursion one-dimensional decomposition [id "DA"]
// ---------------------------------------------------------------------------

// Ratio form of the excursion-law decomposition
//   t * n(eps_t in bin) = int_0^t ds int_{z in [0,x]} n_s(dz)
//                                            P_z(X_{t-s} in bin dx),
// evaluated on the harvested excursion set: both sides are raw probe counts
// (the unknown local-time normalization cancels in the ratio, which targets
// 1 per bin).  The inner probability uses the exact free transition law, so
// only the exactly self-similar kinds are supported; the s-integral is a
// power-law-exact quadrature over the set's probe times below t, a
// (1 - rho_bar)^{-1} head correction on (0, first probe), and the s = t
// endpoint value rho * N_t(bin).  The ladder-time drift term of the general
// identity is zero for every registry model (asserted).  `t` must be one of
// the set's probe times, with at least two earlier probes available.
// `bin_edges` are the ascending bin boundaries (n-1 reports for n edges).
std::vector<IdentityReport> semigroup_decomposition_check(
    const ModelSpec& m, const ExcursionSet& set, double t,
    const std::vector<double>& bin_edges, double ratio_tol = 0.10,
    const QuadOptions& quad = {});

// ---------------------------------------------------------------------------
// Local limit of the free process [id "LLT"]
// ---------------------------------------------------------------------------

// Draws X_t = c(t) * Y exactly (one stable variate per draw) and checks
//   c(t) * P(X_t in (x, x + Delta]) / Delta  vs  f(x / c(t))
// at each grid point x = x_over_ct * c(t), Delta = delta_over_ct * c(t),
// with a binomial 3 sigma + rel_tol band.  A final row checks the uniform
// bound: sup over the grid of the statistic against 1.1 * max f over the
// grid (one-sided; its `pass` is lhs <= rhs).  Supported for the kinds
// whose endpoint law is exactly c(t) * Y; the compound-Poisson kind is
// rejected with unsupported_regime_error.
std::vector<IdentityReport> llt_check(const ModelSpec& m, double t,
                                      const std::vector<double>& x_over_ct,
                                      double delta_over_ct,
                                      std::size_t n_draws,
                                      std::uint64_t master_seed,
                                      double rel_tol = 0.10);

// ---------------------------------------------------------------------------
// Truncated negative moment closure [id "eq22"]
// ---------------------------------------------------------------------------

// Checks k_star * E[Z^{-alpha}] = rho_bar, with the moment taken from the
// meander table (boundary extension included).  Needs a stable kind with
// negative jumps and alpha * rho_bar < 1.
IdentityReport eq22_check(const ModelSpec& m, const MeanderTable& table,
                          double rel_tol = 0.10);

// ---------------------------------------------------------------------------
// Lifetime tail indices of a dual pair [id "equivtails_index"]
// ---------------------------------------------------------------------------

// Log-log slopes of survivor counts over t_grid: the set of excursions of
// X - inf X targets -rho_bar, the dual set (built from -X) targets -rho, and
// the product t * n_hat * n_bar_hat targets slope 0.  Only the indices are
// asserted; the levels carry unidentified normalizations.  Three reports.
std::vector<IdentityReport> tail_index_check(const ModelSpec& m,
                                             const ExcursionSet& set,
                                             const ExcursionSet& dual_set,
                                             const std::vector<double>& t_grid,
                                             double slope_tol = 0.05);

} // namespace levyfp
