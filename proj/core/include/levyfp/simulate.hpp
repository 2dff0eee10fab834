#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levyfp/models.hpp"
#include "levyfp/rng.hpp"

namespace levyfp {

enum class CrossingKind { continuous, jump };
std::string to_string(CrossingKind kind);

// Outcome of one first-passage path that did cross below 0.
struct PassageRecord {
    double start_x = 0.0;
    double t0 = 0.0;                 // crossing time, a grid multiple of dt
    CrossingKind crossing = CrossingKind::continuous;
    double pre_pos = 0.0;            // position just before the crossing event
    std::optional<double> jump_size; // the crossing jump (jump crossings only)
};

// Common simulation knobs.  epsilon = 0 selects the documented default
// explicit-jump cutoff for the model and step size.
struct SimOptions {
    double dt = 1e-3;
    double epsilon = 0.0;
    std::uint64_t master_seed = 1;
    unsigned worker_count = 0; // 0 = hardware concurrency
};

// Walks one path on the dt-grid from x > 0 until it first goes below 0 or the
// horizon ends (censoring returns nullopt).  Within a step, the continuous
// surrogate is applied first and the explicit jumps follow in sampled order;
// the first event taking the position below 0 classifies the crossing.
std::optional<PassageRecord> simulate_first_passage(const ModelSpec& m, double x,
                                                    double horizon, double dt,
                                                    RngStream& rng,
                                                    double epsilon = 0.0);

// Batch driver with deterministic merged output: records of crossing paths in
// path order, plus the censoring count (crossers + censored = n_paths).
struct PassageBatch {
    double start_x = 0.0;
    double horizon = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_censored = 0;
    std::vector<PassageRecord> records;
};
PassageBatch simulate_passage_batch(const ModelSpec& m, double x, double horizon,
                                    std::size_t n_paths, const SimOptions& opt);

// Binned estimate of P_x(T0 in (t, t+delta]) with its continuous/jump split.
// The split parts sum to p_hat exactly.
struct LocalProbEstimate {
    double t = 0.0;
    double delta = 0.0;
    double x = 0.0;
    double p_hat = 0.0;
    double p_continuous = 0.0;
    double p_jump = 0.0;
    std::size_t n_paths = 0;
    double ci_half_width = 0.0;
};
// Requires t >= 10*delta, both grid multiples of dt, and n_paths >= 10^4
// (insufficient_samples_error below that).
LocalProbEstimate estimate_local_passage_prob(const ModelSpec& m, double x, double t,
                                              double delta, std::size_t n_paths,
                                              const SimOptions& opt);

// Monte Carlo mean of levy_tail_neg(m, X_t) over paths still above 0 at t:
// an unbinned estimator of the jump-passage density at t.  Requires a model
// with negative jumps (unsupported_regime_error otherwise).
struct CompensationEstimate {
    double x = 0.0;
    double t = 0.0;
    double h_hat = 0.0;
    double ci_half_width = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_alive = 0;
};
CompensationEstimate compensation_density_estimator(const ModelSpec& m, double x,
                                                    double t, std::size_t n_paths,
                                                    const SimOptions& opt);

// One excursion of X above its running minimum: lifetime, how it ended, and
// the excursion position at each configured probe time < zeta.  The one
// excursion per path still open at the horizon is kept with censored = true;
// its zeta is the observed length (a strict lower bound on the lifetime) and
// its ended_by carries no information.  Dropping open excursions instead
// would deplete long lifetimes by an O((t/horizon)^rho_bar) factor, visibly
// tilting every lifetime-tail ratio at practical horizons.
struct ExcursionSample {
    double zeta = 0.0;
    CrossingKind ended_by = CrossingKind::continuous;
    bool censored = false;
    std::vector<std::pair<double, double>> probes; // (probe time, position)
};

struct ExcursionOptions {
    std::size_t n_paths = 1;
    double horizon = 10.0;
    double dt = 1e-3;
    std::vector<double> probe_times; // ascending grid multiples of dt
    double theta = 3.0;              // start threshold in units of c(dt)
    double epsilon = 0.0;
    std::uint64_t master_seed = 1;
    unsigned worker_count = 0;
};

struct ExcursionSet {
    double dt = 0.0;
    double horizon = 0.0;
    double theta = 0.0;
    std::size_t n_paths = 0;
    std::vector<double> probe_times;
    std::vector<ExcursionSample> samples;

    // #{zeta > t}; a censored sample witnesses zeta > t whenever its
    // observed length does, so it counts on the same footing.
    std::size_t count_lifetime_over(double t) const;
};

// Cuts paths of X - (running min) into excursions away from 0 on the grid;
// excursions whose peak never exceeds theta*c(dt) are grid noise and are
// dropped.  The excursion still open at the horizon (at most one per path)
// is recorded censored, keeping survivor counts unbiased.  Lifetime counts
// are meaningful only as ratios (the local-time normalization is
// unidentified).  Throws insufficient_samples_error when fewer than 100
// recorded excursions outlive max(probe_times).
ExcursionSet harvest_excursions(const ModelSpec& m, const ExcursionOptions& opt);

// Counts of excursion probe positions in (y, y+delta] at probe time t, with
// the conditional-density normalization count/(n_alive*delta).
struct EntranceLawEstimate {
    double t = 0.0;
    double y = 0.0;
    double delta = 0.0;
    std::size_t n_alive = 0; // excursions with zeta > t
    std::size_t count = 0;   // of those, position at t in (y, y+delta]
    double cond_density = 0.0;
};
EntranceLawEstimate entrance_law_local_estimate(const ExcursionSet& samples, double t,
                                                double y, double delta);

} // namespace levyfp
