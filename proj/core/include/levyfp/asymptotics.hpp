#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levyfp/meander.hpp"
#include "levyfp/models.hpp"
#include "levyfp/simulate.hpp"

namespace levyfp {

// One evaluated limit-law statistic paired with its theoretical target.
// `ci` is the half-width of the acceptance band actually applied — a fixed
// tolerance for the ratio checks whose contracts pin absolute bands, or
// 3 standard errors for the pure Monte Carlo comparisons — and
// pass == (|statistic - target| <= ci).  Aggregate rows (regression slopes
// over a whole t-grid) carry t = 0.  `regime_warning` flags evaluations
// whose asymptotic-regime precondition is only marginally satisfied; it
// never affects pass.
struct TheoremCheck {
    std::string check_id;
    std::string model;
    double t = 0.0;
    double delta = 0.0;
    double x = 0.0; // x, y, or level-ratio argument, check-specific
    double statistic = 0.0;
    double target = 0.0;
    double ci = 0.0;
    bool pass = false;
    bool regime_warning = false;
};

// CSV surface: header "check_id,model,t,delta,x,statistic,target,ci,pass";
// numeric fields at 12 significant digits, pass rendered as 1/0.
std::string theorem_check_csv_header();
std::string to_csv_row(const TheoremCheck& check);

// ---------------------------------------------------------------------------
// Excursion lifetime laws [ids T1.2, T1.4, T1.3x, T1.5]
// ---------------------------------------------------------------------------

// t * #{zeta in (t, t+delta]} / (delta * #{zeta > t});  target rho_bar.
// t and delta must be grid multiples of set.dt; no surviving excursions
// raises insufficient_samples_error.                              [id T1.2]
TheoremCheck t1_lifetime_ratio(const ModelSpec& m, const ExcursionSet& set,
                               double t, double delta, double tol = 0.05);

// Fraction of incidental noise an estimator of a share carries: a share and
// a binomial 95% half-width over the crossed paths.
struct ShareEstimate {
    double share = 0.0;
    double ci_half_width = 0.0;
    std::size_t n_crossed = 0;
};

// Share of continuous-classified crossings among all crossings from level x
// by the horizon; the large-x plateau of this share estimates the continuous
// weight q for models where no closed form exists.
ShareEstimate continuous_crossing_share(const ModelSpec& m, double x,
                                        double horizon, std::size_t n_paths,
                                        const SimOptions& opt);

// The lifetime-ratio statistic restricted by how the excursion ended, each
// divided by rho_bar, so the pair estimates the jump weight p and the
// continuous weight q = 1 - p.
//   jump row        [id T1.4]: target p (1 for stable kinds with negative
//                   jumps, 0 when there are none).
//   continuous row  [id T1.5 when the model has no negative jumps, else
//                   T1.3x]: target q.  For BrownianPlusNegCP q has no closed
//                   form: pass `q_external` (from continuous_crossing_share)
//                   and the row checks two-estimator consistency within
//                   3 combined standard errors.
struct SplitRatios {
    TheoremCheck jump;
    TheoremCheck continuous;
};
SplitRatios t1_split_ratios(const ModelSpec& m, const ExcursionSet& set,
                            double t, double delta, double tol = 0.05,
                            const ShareEstimate* q_external = nullptr);

// Flatness of t * c(t) * #{zeta in (t, t+delta], ended continuously} over a
// geometric t-grid: log-log regression slope, target 0.  Only meaningful for
// models that cross levels continuously (creeps_downward); others raise
// unsupported_regime_error.                                  [ids T1.3, TR]
TheoremCheck creeping_excursion_shape(const ModelSpec& m, const ExcursionSet& set,
                                      const std::vector<double>& t_grid,
                                      double delta, double tol = 0.05,
                                      std::string_view id = "TR");

// ---------------------------------------------------------------------------
// Passage-time local limits at the two deviation scales [ids T2.6, T2.7]
// ---------------------------------------------------------------------------

// Normal-deviation window: start from x = x_over_ct * c(t), estimate
// P(T in (t, t+delta_t]) and form t * p_hat / delta_t; target is the
// passage density at time 1 from x_over_ct of the limit law (exact at all t
// for the stable kinds by self-similarity).  One row per grid t, band
// 3 standard errors.  `table` is consulted only for two-sided/spectrally
// negative stable targets.  Per-t discretization: dt_t = opt.dt * t and
// delta_t = delta_over_t * t, so every grid point runs at the same relative
// resolution and the same cost.  This and every simulation-driving check
// below rescale the jump cutoff with the per-t step: opt.epsilon > 0 is
// read as the cutoff at opt.dt and scaled by c(dt_t)/c(opt.dt); epsilon = 0
// selects 0.3 * c(dt_t).  Each internal run derives its own seed from
// opt.master_seed, so paired estimates are independent.           [id T2.6]
std::vector<TheoremCheck> t2_normal_deviation_check(
    const ModelSpec& m, const MeanderTable* table, double x_over_ct,
    const std::vector<double>& t_grid, double delta_over_t, std::size_t n_paths,
    const SimOptions& opt);

// Small-deviation window: two fixed levels x1 < x2 while t grows.  Emits per
// grid t the ratio p_hat(x1)/p_hat(x2) with target U*(x1)/U*(x2) (descending
// ladder renewal; empirical `tables` for the compound-Poisson model), band
// `ratio_tol`; plus one aggregate row (t = 0) with the log-log slope of
// t * p_hat(x1) / delta_t over the grid, target -rho_bar, band `slope_tol`.
// Rows are flagged regime_warning when x2 / c(max t) > 0.1.       [id T2.7]
std::vector<TheoremCheck> t2_small_deviation_check(
    const ModelSpec& m, double x1, double x2, const std::vector<double>& t_grid,
    double delta_over_t, std::size_t n_paths, const SimOptions& opt,
    const LadderData* tables = nullptr, double ratio_tol = 0.07,
    double slope_tol = 0.10);

// ---------------------------------------------------------------------------
// Jump-passage density asymptotics via the compensation estimator
// [ids TE (stable, alpha*rho_bar < 1) and TI (compound-Poisson, = 1)]
// ---------------------------------------------------------------------------

// Per grid t: h_hat(x1, t)/h_hat(x2, t) with target U*(x1)/U*(x2), band
// `ratio_tol`; plus one aggregate row with the log-log slope over t of
//   t * h_hat(x1, t) / survival_hat(x1, t)
// whose target is 0 (the ratio is asymptotically constant), band `slope_tol`.
// Requires negative jumps (unsupported_regime_error otherwise).  dt is
// t-scaled exactly as in the t2 checks.  Each h_hat here is the median of
// five independent sub-run means: the jump tail evaluated at the distance to
// the barrier has infinite moments of every order >= (1 + alpha*rho)/alpha,
// so a single sample mean is occasionally dominated by one near-barrier
// survivor; the median keeps the ratio stable without touching the
// estimator itself.
std::vector<TheoremCheck> compensation_small_x_checks(
    const ModelSpec& m, double x1, double x2, const std::vector<double>& t_grid,
    std::size_t n_paths, const SimOptions& opt, const LadderData* tables = nullptr,
    double ratio_tol = 0.10, double slope_tol = 0.10);

// ---------------------------------------------------------------------------
// Entrance-law shape of long excursions [id PZ]
// ---------------------------------------------------------------------------

// theta_hat(t, y) = mean of the negative Levy tail evaluated at y + (probe
// position at t), over excursions alive at t.  Emits one row per y in
// y_grid: statistic theta_hat(t, y)/theta_hat(t, 0), target phi(y / c(t))
// from the meander table, band 3 standard errors (ratio of means over the
// same excursions; errors via the influence function).  A final row reports
// k_star * E[Z^{-alpha}] from the meander table with target rho_bar, band
// 10% of the target.  Requires a stable kind with negative jumps and
// alpha*rho_bar < 1; anything else raises unsupported_regime_error.
std::vector<TheoremCheck> propZ_phi_check(const ModelSpec& m,
                                          const MeanderTable& table,
                                          const ExcursionSet& set, double t,
                                          const std::vector<double>& y_grid);

// ---------------------------------------------------------------------------
// Continuous (creeping) passage local limits [ids TS.7, TS.8]
// ---------------------------------------------------------------------------

// P_hat_c below is the continuous-classified part of the local passage
// probability.  Emits, over the geometric t-grid:
//   (i)  per t: P_hat_c(x1)/P_hat_c(x2) at fixed small levels, target
//        U*(x1)/U*(x2), band ratio_tol                         [id TS.7]
//   (ii) aggregate: log-log slope of t * c(t) * P_hat_c(x1) over t,
//        target 0, band slope_tol                              [id TS.7]
//   (iii) per t: P_hat_c(a*c(t))/P_hat_c(b*c(t)), target g*(a)/g*(b) from
//        the meander table (closed Rayleigh form when alpha = 2 and no
//        table is given), band ratio_tol                       [id TS.8]
// Non-creeping models raise unsupported_regime_error.
std::vector<TheoremCheck> creeping_local_checks(
    const ModelSpec& m, const MeanderTable* table, double x1, double x2,
    double a, double b, const std::vector<double>& t_grid, double delta_over_t,
    std::size_t n_paths, const SimOptions& opt, const LadderData* tables = nullptr,
    double ratio_tol = 0.10, double slope_tol = 0.05);

} // namespace levyfp
