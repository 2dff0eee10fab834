#include "levyfp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "levyfp/errors.hpp"
#include "levyfp/parallel.hpp"

namespace levyfp {

namespace {

double resolve_cutoff(const ModelSpec& m, double dt, double epsilon) {
    return epsilon > 0.0 ? epsilon : default_jump_cutoff(m, dt);
}

// t as an exact step count on the dt-grid; rejects off-grid times so that the
// binning below stays integer-exact.
std::uint64_t grid_steps(double t, double dt, const char* what) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    const double k = t / dt;
    const auto n = static_cast<std::int64_t>(std::llround(k));
    if (n < 1 || std::abs(k - static_cast<double>(n)) > 1e-6 * std::max(1.0, k)) {
        throw std::invalid_argument(std::string(what) +
                                    " must be a positive multiple of dt");
    }
    return static_cast<std::uint64_t>(n);
}

struct WalkResult {
    bool crossed = false;
    std::uint64_t step = 0; // 1-based crossing step
    CrossingKind kind = CrossingKind::continuous;
    double pre_pos = 0.0;
    double jump_size = 0.0;
    double final_pos = 0.0; // end position when censored
};

// Grid walk from x down-crossing 0.  Within a step the continuous surrogate
// acts first, then the explicit jumps in sampled order; the first event that
// takes the position below 0 ends the walk and classifies the crossing.
WalkResult walk_until_crossing(const IncrementSampler& sampler, double x,
                               std::uint64_t n_steps, RngStream& rng,
                               Increment& inc) {
    double pos = x;
    for (std::uint64_t k = 1; k <= n_steps; ++k) {
        sampler.sample(rng, inc);
        double cur = pos + inc.continuous;
        if (cur < 0.0) {
            return {true, k, CrossingKind::continuous, pos, 0.0, cur};
        }
        for (double j : inc.jumps) {
            if (cur + j < 0.0) {
                return {true, k, CrossingKind::jump, cur, j, cur + j};
            }
            cur += j;
        }
        pos = cur;
    }
    return {false, 0, CrossingKind::continuous, 0.0, 0.0, pos};
}

PassageRecord make_record(double x, double dt, const WalkResult& w) {
    PassageRecord r;
    r.start_x = x;
    r.t0 = static_cast<double>(w.step) * dt;
    r.crossing = w.kind;
    r.pre_pos = w.pre_pos;
    if (w.kind == CrossingKind::jump) r.jump_size = w.jump_size;
    return r;
}

void validate_passage_args(double x, double horizon, double dt) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("start position x must be positive");
    }
    if (!(dt > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("dt and horizon must be positive");
    }
    if (dt * 1000.0 > horizon * (1.0 + 1e-12)) {
        throw std::invalid_argument("dt too coarse: need >= 10^3 steps per horizon");
    }
}

} // namespace

std::string to_string(CrossingKind kind) {
    return kind == CrossingKind::continuous ? "continuous" : "jump";
}

std::optional<PassageRecord> simulate_first_passage(const ModelSpec& m, double x,
                                                    double horizon, double dt,
                                                    RngStream& rng, double epsilon) {
    validate_passage_args(x, horizon, dt);
    const IncrementSampler sampler(m, dt, resolve_cutoff(m, dt, epsilon));
    const auto n_steps = static_cast<std::uint64_t>(horizon / dt + 1e-9);
    Increment inc;
    const WalkResult w = walk_until_crossing(sampler, x, n_steps, rng, inc);
    if (!w.crossed) return std::nullopt;
    return make_record(x, dt, w);
}

PassageBatch simulate_passage_batch(const ModelSpec& m, double x, double horizon,
                                    std::size_t n_paths, const SimOptions& opt) {
    validate_passage_args(x, horizon, opt.dt);
    if (n_paths == 0) throw std::invalid_argument("n_paths must be positive");
    const IncrementSampler sampler(m, opt.dt, resolve_cutoff(m, opt.dt, opt.epsilon));
    const auto n_steps = static_cast<std::uint64_t>(horizon / opt.dt + 1e-9);

    struct Acc {
        std::vector<PassageRecord> records;
        std::uint64_t censored = 0;
    };
    auto blocks = run_blocks<Acc>(
        opt.master_seed, n_paths, 1024, opt.worker_count,
        [&](Acc& acc, std::uint64_t, RngStream& rng) {
            thread_local Increment inc;
            const WalkResult w = walk_until_crossing(sampler, x, n_steps, rng, inc);
            if (w.crossed) {
                acc.records.push_back(make_record(x, opt.dt, w));
            } else {
                ++acc.censored;
            }
        });

    PassageBatch out;
    out.start_x = x;
    out.horizon = horizon;
    out.n_paths = n_paths;
    for (auto& b : blocks) {
        out.n_censored += b.censored;
        out.records.insert(out.records.end(), b.records.begin(), b.records.end());
    }
    return out;
}

LocalProbEstimate estimate_local_passage_prob(const ModelSpec& m, double x, double t,
                                              double delta, std::size_t n_paths,
                                              const SimOptions& opt) {
    if (n_paths < 10000) {
        throw insufficient_samples_error(
            "estimate_local_passage_prob requires at least 10^4 paths", n_paths);
    }
    if (!(x > 0.0)) throw std::invalid_argument("start position x must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (t < 10.0 * delta * (1.0 - 1e-12)) {
        throw std::invalid_argument("bin start t must be at least 10*delta");
    }
    const std::uint64_t m_t = grid_steps(t, opt.dt, "t");
    const std::uint64_t m_end = m_t + grid_steps(delta, opt.dt, "delta");
    if (m_end < 1000) {
        throw std::invalid_argument("dt too coarse: need >= 10^3 steps per horizon");
    }
    const IncrementSampler sampler(m, opt.dt, resolve_cutoff(m, opt.dt, opt.epsilon));

    struct Acc {
        std::uint64_t cont = 0;
        std::uint64_t jump = 0;
    };
    auto blocks = run_blocks<Acc>(
        opt.master_seed, n_paths, 1024, opt.worker_count,
        [&](Acc& acc, std::uint64_t, RngStream& rng) {
            thread_local Increment inc;
            const WalkResult w = walk_until_crossing(sampler, x, m_end, rng, inc);
            if (w.crossed && w.step > m_t) {
                (w.kind == CrossingKind::continuous ? acc.cont : acc.jump) += 1;
            }
        });
    std::uint64_t cont = 0, jump = 0;
    for (const auto& b : blocks) {
        cont += b.cont;
        jump += b.jump;
    }

    LocalProbEstimate est;
    est.t = t;
    est.delta = delta;
    est.x = x;
    est.n_paths = n_paths;
    const double n = static_cast<double>(n_paths);
    est.p_continuous = static_cast<double>(cont) / n;
    est.p_jump = static_cast<double>(jump) / n;
    est.p_hat = est.p_continuous + est.p_jump;
    // Variance floored at one count so an empty bin still reports a usable
    // half-width.
    const double pe = std::min(std::max(est.p_hat, 1.0 / n), 1.0 - 1.0 / n);
    est.ci_half_width = 1.96 * std::sqrt(pe * (1.0 - pe) / n);
    return est;
}

CompensationEstimate compensation_density_estimator(const ModelSpec& m, double x,
                                                    double t, std::size_t n_paths,
                                                    const SimOptions& opt) {
    if (!m.has_negative_jumps) {
        throw unsupported_regime_error(
            "compensation estimator needs a model with negative jumps");
    }
    if (!(x > 0.0)) throw std::invalid_argument("start position x must be positive");
    if (n_paths < 2) {
        throw insufficient_samples_error("compensation estimator needs >= 2 paths",
                                         n_paths);
    }
    const std::uint64_t m_t = grid_steps(t, opt.dt, "t");
    const IncrementSampler sampler(m, opt.dt, resolve_cutoff(m, opt.dt, opt.epsilon));

    struct Acc {
        double w = 0.0;
        double w2 = 0.0;
        std::uint64_t alive = 0;
    };
    auto blocks = run_blocks<Acc>(
        opt.master_seed, n_paths, 1024, opt.worker_count,
        [&](Acc& acc, std::uint64_t, RngStream& rng) {
            thread_local Increment inc;
            const WalkResult w = walk_until_crossing(sampler, x, m_t, rng, inc);
            if (!w.crossed && w.final_pos > 0.0) {
                const double v = levy_tail_neg(m, w.final_pos);
                acc.w += v;
                acc.w2 += v * v;
                acc.alive += 1;
            }
        });
    double w = 0.0, w2 = 0.0;
    std::uint64_t alive = 0;
    for (const auto& b : blocks) {
        w += b.w;
        w2 += b.w2;
        alive += b.alive;
    }

    CompensationEstimate est;
    est.x = x;
    est.t = t;
    est.n_paths = n_paths;
    est.n_alive = alive;
    const double n = static_cast<double>(n_paths);
    est.h_hat = w / n;
    const double s2 = std::max(0.0, (w2 - n * est.h_hat * est.h_hat) / (n - 1.0));
    est.ci_half_width = 1.96 * std::sqrt(s2 / n);
    return est;
}

std::size_t ExcursionSet::count_lifetime_over(double t) const {
    std::size_t c = 0;
    for (const auto& s : samples) c += s.zeta > t ? 1 : 0;
    return c;
}

ExcursionSet harvest_excursions(const ModelSpec& m, const ExcursionOptions& opt) {
    if (opt.n_paths == 0) throw std::invalid_argument("n_paths must be positive");
    if (!(opt.dt > 0.0) || !(opt.horizon > 0.0)) {
        throw std::invalid_argument("dt and horizon must be positive");
    }
    if (opt.dt * 1e4 > opt.horizon * (1.0 + 1e-12)) {
        throw std::invalid_argument("horizon must cover at least 10^4 steps");
    }
    if (!(opt.theta >= 0.0) || !std::isfinite(opt.theta)) {
        throw std::invalid_argument("theta must be nonnegative and finite");
    }
    std::vector<std::uint64_t> probe_steps;
    probe_steps.reserve(opt.probe_times.size());
    for (std::size_t i = 0; i < opt.probe_times.size(); ++i) {
        const double pt = opt.probe_times[i];
        if (pt >= opt.horizon) {
            throw std::invalid_argument("probe times must lie below the horizon");
        }
        probe_steps.push_back(grid_steps(pt, opt.dt, "probe time"));
        if (i > 0 && probe_steps[i] <= probe_steps[i - 1]) {
            throw std::invalid_argument("probe times must be strictly increasing");
        }
    }

    const IncrementSampler sampler(m, opt.dt, resolve_cutoff(m, opt.dt, opt.epsilon));
    const double threshold = opt.theta * norming_function(m, opt.dt);
    const auto n_steps = static_cast<std::uint64_t>(opt.horizon / opt.dt + 1e-9);

    struct Acc {
        std::vector<ExcursionSample> samples;
    };
    auto blocks = run_blocks<Acc>(
        opt.master_seed, opt.n_paths, 1, opt.worker_count,
        [&](Acc& acc, std::uint64_t, RngStream& rng) {
            thread_local Increment inc;
            double pos = 0.0;
            double base = 0.0; // running minimum value
            std::uint64_t last_zero = 0;
            double max_r = 0.0;
            std::size_t next_probe = 0;
            std::vector<std::pair<double, double>> probes;
            for (std::uint64_t k = 1; k <= n_steps; ++k) {
                sampler.sample(rng, inc);
                // One scan: end-of-step position plus the first event (if any)
                // that dips below the current minimum, which classifies how an
                // ending excursion ends.
                double run = pos + inc.continuous;
                bool sub = run < base;
                CrossingKind kind = CrossingKind::continuous;
                for (double j : inc.jumps) {
                    if (!sub && run + j < base) {
                        sub = true;
                        kind = CrossingKind::jump;
                    }
                    run += j;
                }
                if (run < base) {
                    // Grid-level new minimum: the open excursion ends now.
                    if (max_r > threshold) {
                        ExcursionSample s;
                        s.zeta = static_cast<double>(k - last_zero) * opt.dt;
                        s.ended_by = kind;
                        s.probes = std::move(probes);
                        acc.samples.push_back(std::move(s));
                    }
                    probes = {};
                    base = run;
                    last_zero = k;
                    max_r = 0.0;
                    next_probe = 0;
                } else {
                    const double r = run - base;
                    max_r = std::max(max_r, r);
                    const std::uint64_t elapsed = k - last_zero;
                    while (next_probe < probe_steps.size() &&
                           probe_steps[next_probe] == elapsed) {
                        probes.emplace_back(opt.probe_times[next_probe], r);
                        ++next_probe;
                    }
                }
                pos = run;
            }
            // The excursion open at the horizon is kept as censored so that
            // survivor counts are not depleted of long lifetimes.
            if (max_r > threshold && n_steps > last_zero) {
                ExcursionSample s;
                s.zeta = static_cast<double>(n_steps - last_zero) * opt.dt;
                s.censored = true;
                s.probes = std::move(probes);
                acc.samples.push_back(std::move(s));
            }
        });

    ExcursionSet out;
    out.dt = opt.dt;
    out.horizon = opt.horizon;
    out.theta = opt.theta;
    out.n_paths = opt.n_paths;
    out.probe_times = opt.probe_times;
    for (auto& b : blocks) {
        out.samples.insert(out.samples.end(),
                           std::make_move_iterator(b.samples.begin()),
                           std::make_move_iterator(b.samples.end()));
    }
    const double max_probe = opt.probe_times.empty() ? 0.0 : opt.probe_times.back();
    const std::size_t usable = out.count_lifetime_over(max_probe);
    if (usable < 100) {
        throw insufficient_samples_error(
            "harvest_excursions: too few excursions outlive the probe window",
            usable);
    }
    return out;
}

EntranceLawEstimate entrance_law_local_estimate(const ExcursionSet& samples, double t,
                                                double y, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(y >= 0.0)) throw std::invalid_argument("y must be nonnegative");
    bool known = false;
    for (double pt : samples.probe_times) {
        if (std::abs(pt - t) <= 1e-9 * std::max(1.0, t)) {
            t = pt;
            known = true;
            break;
        }
    }
    if (!known) {
        throw std::invalid_argument("t is not a probe time of this excursion set");
    }

    EntranceLawEstimate est;
    est.t = t;
    est.y = y;
    est.delta = delta;
    for (const auto& s : samples.samples) {
        for (const auto& [pt, pos] : s.probes) {
            if (pt == t) {
                est.n_alive += 1;
                if (pos > y && pos <= y + delta) est.count += 1;
                break;
            }
        }
    }
    if (est.n_alive == 0) {
        throw insufficient_samples_error(
            "entrance_law_local_estimate: no excursions alive at the probe time", 0);
    }
    est.cond_density = static_cast<double>(est.count) /
                       (static_cast<double>(est.n_alive) * delta);
    return est;
}

} // namespace levyfp
