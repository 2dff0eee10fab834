#include "levyfp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "levyfp/errors.hpp"

namespace levyfp {

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::uint64_t grid_steps(double t, double dt, const char* what) {
    const double k = t / dt;
    const auto n = static_cast<std::int64_t>(std::llround(k));
    if (n < 1 || std::abs(k - static_cast<double>(n)) > 1e-6 * std::max(1.0, k)) {
        throw std::invalid_argument(std::string(what) +
                                    " must be a positive multiple of the set's dt");
    }
    return static_cast<std::uint64_t>(n);
}

struct BinCounts {
    double survivors = 0.0; // #{zeta > t}
    double in_bin = 0.0;    // #{zeta in (t, t+delta]}
    double in_bin_jump = 0.0;
    double in_bin_cont = 0.0;
};

BinCounts count_bins(const ExcursionSet& set, double t, double delta) {
    const std::uint64_t m_t = grid_steps(t, set.dt, "t");
    const std::uint64_t m_end = m_t + grid_steps(delta, set.dt, "delta");
    BinCounts c;
    for (const ExcursionSample& s : set.samples) {
        const auto k = static_cast<std::uint64_t>(std::llround(s.zeta / set.dt));
        if (k <= m_t) continue;
        // A censored sample still witnesses zeta > t, but its true lifetime
        // may exceed the observed one, so it can never be binned.
        c.survivors += 1.0;
        if (k <= m_end && !s.censored) {
            c.in_bin += 1.0;
            (s.ended_by == CrossingKind::jump ? c.in_bin_jump : c.in_bin_cont) += 1.0;
        }
    }
    if (c.survivors == 0.0) {
        throw insufficient_samples_error("no excursions outlive t", 0);
    }
    return c;
}

// Least-squares slope of log(y) against log(t).
double loglog_slope(const std::vector<double>& ts, const std::vector<double>& ys) {
    const std::size_t n = ts.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(ts[i]);
        my += std::log(ys[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(ts[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ys[i]) - my);
    }
    return sxy / sxx;
}

void require_t_grid(const std::vector<double>& t_grid) {
    if (t_grid.size() < 2) {
        throw std::invalid_argument("t_grid needs at least two points");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw std::invalid_argument("t_grid must be strictly increasing");
        }
    }
}

// One deterministic sub-seed per internal simulation so paired estimates are
// independent draws while the whole check stays reproducible.  The jump
// cutoff must track the per-t step size: a caller-supplied epsilon is read
// at the caller's base dt and rescaled with c(dt); when none is given we use
// 0.3*c(dt), the production balance for passage statistics (the library-wide
// default of 0.01*c(dt) prices each stable step at hundreds of jump draws,
// which these multi-run checks cannot afford and their ratio tolerances do
// not need).
SimOptions derived_options(const ModelSpec& m, const SimOptions& base,
                           double dt, std::uint64_t salt) {
    SimOptions o = base;
    o.dt = dt;
    o.epsilon = base.epsilon > 0.0
                    ? base.epsilon * norming_function(m, dt) /
                          norming_function(m, base.dt)
                    : 0.3 * norming_function(m, dt);
    o.master_seed = base.master_seed + 0x1000001ull * salt;
    return o;
}

// Snap delta_over_t to the per-t grid (the multiple is t-independent).
double snapped_delta(double delta_over_t, const SimOptions& opt, double t) {
    const double steps = delta_over_t / opt.dt;
    const auto m = std::llround(steps);
    if (m < 1 || std::abs(steps - static_cast<double>(m)) > 1e-6 * steps) {
        throw std::invalid_argument(
            "delta_over_t must be a positive multiple of the base dt");
    }
    return static_cast<double>(m) * opt.dt * t;
}

TheoremCheck make_check(std::string id, const ModelSpec& m, double t, double delta,
                        double x, double statistic, double target, double ci) {
    TheoremCheck c;
    c.check_id = std::move(id);
    c.model = m.name();
    c.t = t;
    c.delta = delta;
    c.x = x;
    c.statistic = statistic;
    c.target = target;
    c.ci = ci;
    c.pass = std::abs(statistic - target) <= ci;
    return c;
}

} // namespace

std::string theorem_check_csv_header() {
    return "check_id,model,t,delta,x,statistic,target,ci,pass";
}

std::string to_csv_row(const TheoremCheck& c) {
    return c.check_id + "," + c.model + "," + fmt12(c.t) + "," + fmt12(c.delta) +
           "," + fmt12(c.x) + "," + fmt12(c.statistic) + "," + fmt12(c.target) +
           "," + fmt12(c.ci) + "," + (c.pass ? "1" : "0");
}

TheoremCheck t1_lifetime_ratio(const ModelSpec& m, const ExcursionSet& set,
                               double t, double delta, double tol) {
    const BinCounts c = count_bins(set, t, delta);
    const double delta_actual =
        static_cast<double>(grid_steps(delta, set.dt, "delta")) * set.dt;
    const double r = c.in_bin / c.survivors;
    const double stat = (t / delta_actual) * r;
    return make_check("T1.2", m, t, delta_actual, 0.0, stat, m.limit.rho_bar(), tol);
}

ShareEstimate continuous_crossing_share(const ModelSpec& m, double x,
                                        double horizon, std::size_t n_paths,
                                        const SimOptions& opt) {
    const PassageBatch b = simulate_passage_batch(m, x, horizon, n_paths, opt);
    if (b.records.empty()) {
        throw insufficient_samples_error("no crossings observed", 0);
    }
    double cont = 0.0;
    for (const PassageRecord& r : b.records) {
        if (r.crossing == CrossingKind::continuous) cont += 1.0;
    }
    ShareEstimate s;
    s.n_crossed = b.records.size();
    const double n = static_cast<double>(s.n_crossed);
    s.share = cont / n;
    const double pe = std::min(std::max(s.share, 1.0 / n), 1.0 - 1.0 / n);
    s.ci_half_width = 1.96 * std::sqrt(pe * (1.0 - pe) / n);
    return s;
}

SplitRatios t1_split_ratios(const ModelSpec& m, const ExcursionSet& set, double t,
                            double delta, double tol,
                            const ShareEstimate* q_external) {
    const BinCounts c = count_bins(set, t, delta);
    const double delta_actual =
        static_cast<double>(grid_steps(delta, set.dt, "delta")) * set.dt;
    const double rho_bar = m.limit.rho_bar();
    const double scale = t / (delta_actual * rho_bar);
    const double r_jump = c.in_bin_jump / c.survivors;
    const double r_cont = c.in_bin_cont / c.survivors;
    const double stat_jump = scale * r_jump;
    const double stat_cont = scale * r_cont;

    double target_q, band;
    if (m.kind == ModelKind::BrownianPlusNegCP) {
        if (q_external == nullptr) {
            throw std::invalid_argument(
                "the compound-Poisson split has no closed-form weights; pass the "
                "crossing-share estimate");
        }
        target_q = q_external->share;
        const double se_stat =
            scale * std::sqrt(std::max(r_cont, 1.0 / c.survivors) / c.survivors);
        const double se_ext = q_external->ci_half_width / 1.96;
        band = 3.0 * std::sqrt(se_stat * se_stat + se_ext * se_ext);
    } else {
        // Stable kinds with negative jumps never creep downward (q = 0);
        // without negative jumps every ending is continuous (q = 1).
        target_q = m.has_negative_jumps ? 0.0 : 1.0;
        band = tol;
    }
    const char* cont_id = m.has_negative_jumps ? "T1.3x" : "T1.5";

    SplitRatios out;
    out.jump = make_check("T1.4", m, t, delta_actual, 0.0, stat_jump,
                          1.0 - target_q, band);
    out.continuous =
        make_check(cont_id, m, t, delta_actual, 0.0, stat_cont, target_q, band);
    return out;
}

TheoremCheck creeping_excursion_shape(const ModelSpec& m, const ExcursionSet& set,
                                      const std::vector<double>& t_grid,
                                      double delta, double tol,
                                      std::string_view id) {
    if (!m.creeps_downward) {
        throw unsupported_regime_error(
            "continuous-ending shape check needs a model that creeps downward");
    }
    require_t_grid(t_grid);
    std::vector<double> ys;
    ys.reserve(t_grid.size());
    for (double t : t_grid) {
        const BinCounts c = count_bins(set, t, delta);
        if (c.in_bin_cont == 0.0) {
            throw insufficient_samples_error(
                "empty continuous-ended lifetime bin", 0);
        }
        ys.push_back(t * norming_function(m, t) * c.in_bin_cont);
    }
    const double slope = loglog_slope(t_grid, ys);
    TheoremCheck c = make_check(std::string(id), m, 0.0, delta, 0.0, slope, 0.0, tol);
    return c;
}

std::vector<TheoremCheck> t2_normal_deviation_check(
    const ModelSpec& m, const MeanderTable* table, double x_over_ct,
    const std::vector<double>& t_grid, double delta_over_t, std::size_t n_paths,
    const SimOptions& opt) {
    if (!(x_over_ct > 0.0)) {
        throw std::invalid_argument("x_over_ct must be positive");
    }
    const double target = stable_passage_density(m.limit, x_over_ct, table);
    std::vector<TheoremCheck> out;
    std::uint64_t salt = 1;
    for (double t : t_grid) {
        const double dt_t = opt.dt * t;
        const double delta_t = snapped_delta(delta_over_t, opt, t);
        const double x = x_over_ct * norming_function(m, t);
        const LocalProbEstimate est = estimate_local_passage_prob(
            m, x, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        const double stat = t * est.p_hat / delta_t;
        const double band = 3.0 * (est.ci_half_width / 1.96) * (t / delta_t);
        out.push_back(make_check("T2.6", m, t, delta_t, x, stat, target, band));
    }
    return out;
}

std::vector<TheoremCheck> t2_small_deviation_check(
    const ModelSpec& m, double x1, double x2, const std::vector<double>& t_grid,
    double delta_over_t, std::size_t n_paths, const SimOptions& opt,
    const LadderData* tables, double ratio_tol, double slope_tol) {
    require_t_grid(t_grid);
    if (!(x1 > 0.0) || !(x2 > x1)) {
        throw std::invalid_argument("need 0 < x1 < x2");
    }
    const double target_ratio =
        tables ? renewal_U(m, x1, LadderSide::down, *tables) /
                     renewal_U(m, x2, LadderSide::down, *tables)
               : renewal_U(m, x1, LadderSide::down) /
                     renewal_U(m, x2, LadderSide::down);
    const bool warn = x2 / norming_function(m, t_grid.back()) > 0.1;

    std::vector<TheoremCheck> out;
    std::vector<double> shape;
    std::uint64_t salt = 1;
    for (double t : t_grid) {
        const double dt_t = opt.dt * t;
        const double delta_t = snapped_delta(delta_over_t, opt, t);
        const LocalProbEstimate e1 = estimate_local_passage_prob(
            m, x1, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        const LocalProbEstimate e2 = estimate_local_passage_prob(
            m, x2, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        if (e1.p_hat == 0.0 || e2.p_hat == 0.0) {
            throw insufficient_samples_error("empty passage-time bin", 0);
        }
        TheoremCheck c = make_check("T2.7", m, t, delta_t, x1 / x2,
                                    e1.p_hat / e2.p_hat, target_ratio, ratio_tol);
        c.regime_warning = warn;
        out.push_back(std::move(c));
        shape.push_back(t * e1.p_hat / delta_t);
    }
    TheoremCheck sc = make_check("T2.7", m, 0.0, 0.0, x1,
                                 loglog_slope(t_grid, shape),
                                 -m.limit.rho_bar(), slope_tol);
    sc.regime_warning = warn;
    out.push_back(std::move(sc));
    return out;
}

namespace {

// Median of independent sub-run means of the jump-tail average.  The summand
// grows without bound as a surviving path approaches the barrier, and under
// grid monitoring its sample distribution is heavy enough that a single mean
// is occasionally dominated by one near-barrier position at any step size.
// The median over sub-runs keeps the estimate stable while each sub-run stays
// an unmodified Monte Carlo mean.
struct RobustCompensation {
    double h = 0.0;        // median of sub-run means
    double survival = 0.0; // pooled share of paths alive at t
};

RobustCompensation robust_compensation(const ModelSpec& m, double x, double t,
                                       std::size_t n_paths,
                                       const SimOptions& opt) {
    constexpr std::size_t k = 5;
    const std::size_t n_sub = std::max<std::size_t>(2, n_paths / k);
    std::vector<double> means(k);
    std::uint64_t alive = 0;
    for (std::size_t i = 0; i < k; ++i) {
        SimOptions sub = opt;
        sub.master_seed = opt.master_seed + 0x9e3779b97f4a7c15ull * (i + 1);
        const CompensationEstimate e =
            compensation_density_estimator(m, x, t, n_sub, sub);
        means[i] = e.h_hat;
        alive += e.n_alive;
    }
    std::sort(means.begin(), means.end());
    RobustCompensation r;
    r.h = means[k / 2];
    r.survival =
        static_cast<double>(alive) / static_cast<double>(k * n_sub);
    return r;
}

} // namespace

std::vector<TheoremCheck> compensation_small_x_checks(
    const ModelSpec& m, double x1, double x2, const std::vector<double>& t_grid,
    std::size_t n_paths, const SimOptions& opt, const LadderData* tables,
    double ratio_tol, double slope_tol) {
    if (!m.has_negative_jumps) {
        throw unsupported_regime_error(
            "jump-passage density asymptotics need negative jumps");
    }
    require_t_grid(t_grid);
    if (!(x1 > 0.0) || !(x2 > x1)) {
        throw std::invalid_argument("need 0 < x1 < x2");
    }
    const char* id = m.kind == ModelKind::BrownianPlusNegCP ? "TI" : "TE";
    const double target_ratio =
        tables ? renewal_U(m, x1, LadderSide::down, *tables) /
                     renewal_U(m, x2, LadderSide::down, *tables)
               : renewal_U(m, x1, LadderSide::down) /
                     renewal_U(m, x2, LadderSide::down);

    std::vector<TheoremCheck> out;
    std::vector<double> shape;
    std::uint64_t salt = 1;
    for (double t : t_grid) {
        const double dt_t = opt.dt * t;
        const RobustCompensation c1 = robust_compensation(
            m, x1, t, n_paths, derived_options(m, opt, dt_t, salt++));
        const RobustCompensation c2 = robust_compensation(
            m, x2, t, n_paths, derived_options(m, opt, dt_t, salt++));
        if (c1.h <= 0.0 || c2.h <= 0.0 || c1.survival == 0.0) {
            throw insufficient_samples_error("degenerate compensation estimate", 0);
        }
        out.push_back(
            make_check(id, m, t, 0.0, x1 / x2, c1.h / c2.h, target_ratio, ratio_tol));
        shape.push_back(t * c1.h / (m.limit.rho_bar() * c1.survival));
    }
    out.push_back(make_check(id, m, 0.0, 0.0, x1, loglog_slope(t_grid, shape), 0.0,
                             slope_tol));
    return out;
}

std::vector<TheoremCheck> propZ_phi_check(const ModelSpec& m,
                                          const MeanderTable& table,
                                          const ExcursionSet& set, double t,
                                          const std::vector<double>& y_grid) {
    if (!m.is_stable() || !m.has_negative_jumps) {
        throw unsupported_regime_error(
            "entrance-law shape check needs a stable kind with negative jumps");
    }
    bool have_probe = false;
    for (double pt : set.probe_times) {
        if (std::abs(pt - t) <= 1e-9 * std::max(1.0, t)) {
            t = pt;
            have_probe = true;
            break;
        }
    }
    if (!have_probe) {
        throw std::invalid_argument("t is not a probe time of this excursion set");
    }

    // Tail mass at probe positions, per alive excursion, for each offset y.
    std::vector<double> base; // offset 0
    base.reserve(set.samples.size());
    for (const ExcursionSample& s : set.samples) {
        for (const auto& [pt, pos] : s.probes) {
            if (pt == t) {
                base.push_back(pos);
                break;
            }
        }
    }
    if (base.size() < 2) {
        throw insufficient_samples_error("too few excursions alive at t",
                                         base.size());
    }
    const double n = static_cast<double>(base.size());
    const double ct = norming_function(m, t);

    double denom_mean = 0.0;
    std::vector<double> b_vals(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        b_vals[i] = levy_tail_neg(m, base[i]);
        denom_mean += b_vals[i];
    }
    denom_mean /= n;

    std::vector<TheoremCheck> out;
    for (double y : y_grid) {
        if (!(y >= 0.0)) throw std::invalid_argument("y must be nonnegative");
        double num_mean = 0.0;
        std::vector<double> a_vals(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            a_vals[i] = levy_tail_neg(m, y + base[i]);
            num_mean += a_vals[i];
        }
        num_mean /= n;
        const double r = num_mean / denom_mean;
        // Ratio-of-means standard error over the same excursions.
        double var = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double d = a_vals[i] - r * b_vals[i];
            var += d * d;
        }
        var /= (n - 1.0);
        const double se = std::sqrt(var / n) / denom_mean;
        const double target = meander_phi(table, y / ct);
        out.push_back(make_check("PZ", m, t, 0.0, y, r, target, 3.0 * se));
    }

    const double moment = m.k_star * meander_negative_moment(table, 0.0);
    const double rho_bar = m.limit.rho_bar();
    out.push_back(make_check("PZ", m, 0.0, 0.0, 0.0, moment, rho_bar,
                             0.10 * rho_bar));
    return out;
}

std::vector<TheoremCheck> creeping_local_checks(
    const ModelSpec& m, const MeanderTable* table, double x1, double x2, double a,
    double b, const std::vector<double>& t_grid, double delta_over_t,
    std::size_t n_paths, const SimOptions& opt, const LadderData* tables,
    double ratio_tol, double slope_tol) {
    if (!m.creeps_downward) {
        throw unsupported_regime_error(
            "continuous-passage local checks need a model that creeps downward");
    }
    require_t_grid(t_grid);
    if (!(x1 > 0.0) || !(x2 > x1) || !(a > 0.0) || !(b > a)) {
        throw std::invalid_argument("need 0 < x1 < x2 and 0 < a < b");
    }
    const double target_small =
        tables ? renewal_U(m, x1, LadderSide::down, *tables) /
                     renewal_U(m, x2, LadderSide::down, *tables)
               : renewal_U(m, x1, LadderSide::down) /
                     renewal_U(m, x2, LadderSide::down);
    double target_shape;
    if (table != nullptr) {
        target_shape = table->g_star(a) / table->g_star(b);
    } else if (m.limit.alpha == 2.0) {
        // Rayleigh endpoint law of the length-1 meander.
        target_shape = (a * std::exp(-a * a / 2.0)) / (b * std::exp(-b * b / 2.0));
    } else {
        throw std::invalid_argument(
            "meander table required for the shape target when alpha < 2");
    }

    std::vector<TheoremCheck> out;
    std::vector<double> shape;
    std::uint64_t salt = 1;
    for (double t : t_grid) {
        const double dt_t = opt.dt * t;
        const double delta_t = snapped_delta(delta_over_t, opt, t);
        const double ct = norming_function(m, t);
        const LocalProbEstimate e1 = estimate_local_passage_prob(
            m, x1, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        const LocalProbEstimate e2 = estimate_local_passage_prob(
            m, x2, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        if (e1.p_continuous == 0.0 || e2.p_continuous == 0.0) {
            throw insufficient_samples_error("empty continuous-passage bin", 0);
        }
        out.push_back(make_check("TS.7", m, t, delta_t, x1 / x2,
                                 e1.p_continuous / e2.p_continuous, target_small,
                                 ratio_tol));
        shape.push_back(t * ct * e1.p_continuous / delta_t);

        const LocalProbEstimate ea = estimate_local_passage_prob(
            m, a * ct, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        const LocalProbEstimate eb = estimate_local_passage_prob(
            m, b * ct, t, delta_t, n_paths, derived_options(m, opt, dt_t, salt++));
        if (ea.p_continuous == 0.0 || eb.p_continuous == 0.0) {
            throw insufficient_samples_error("empty continuous-passage bin", 0);
        }
        out.push_back(make_check("TS.8", m, t, delta_t, a / b,
                                 ea.p_continuous / eb.p_continuous, target_shape,
                                 ratio_tol));
    }
    out.push_back(make_check("TS.7", m, 0.0, 0.0, x1, loglog_slope(t_grid, shape),
                             0.0, slope_tol));
    return out;
}

} // namespace levyfp
