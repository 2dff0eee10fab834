#include "levyfp/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levyfp/errors.hpp"
#include "levyfp/parallel.hpp"

namespace levyfp {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw config_error(std::string(what) + " must be positive and finite");
    }
}

} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::TwoSidedStable: return "TwoSidedStable";
        case ModelKind::SpectrallyPositiveStable: return "SpectrallyPositiveStable";
        case ModelKind::SpectrallyNegativeStable: return "SpectrallyNegativeStable";
        case ModelKind::BrownianMotion: return "BrownianMotion";
        case ModelKind::BrownianPlusNegCP: return "BrownianPlusNegCP";
    }
    throw std::logic_error("to_string: corrupt ModelKind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "TwoSidedStable" || name == "two_sided_stable") {
        return ModelKind::TwoSidedStable;
    }
    if (name == "SpectrallyPositiveStable" || name == "spectrally_positive_stable") {
        return ModelKind::SpectrallyPositiveStable;
    }
    if (name == "SpectrallyNegativeStable" || name == "spectrally_negative_stable") {
        return ModelKind::SpectrallyNegativeStable;
    }
    if (name == "BrownianMotion" || name == "brownian_motion" || name == "brownian" ||
        name == "bm") {
        return ModelKind::BrownianMotion;
    }
    if (name == "BrownianPlusNegCP" || name == "brownian_plus_neg_cp" || name == "bpncp") {
        return ModelKind::BrownianPlusNegCP;
    }
    throw config_error("unknown model kind: " + name);
}

ModelSpec ModelSpec::two_sided_stable(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw config_error("two_sided_stable: alpha must lie in (0,2)");
    }
    if (!(beta > -1.0 && beta < 1.0)) {
        throw config_error(
            "two_sided_stable: beta must lie in (-1,1); the |beta| = 1 boundary "
            "cases are the spectrally one-sided kinds");
    }
    ModelSpec m;
    m.kind = ModelKind::TwoSidedStable;
    m.limit = StableParams::make(alpha, beta);
    m.creeps_downward = false; // no Gaussian part, jumps on both sides
    m.has_negative_jumps = true;
    m.k_star = levy_coeff_neg(m.limit) / alpha;
    m.sigma_eff = 1.0;
    return m;
}

ModelSpec ModelSpec::spectrally_positive_stable(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw config_error(
            "spectrally_positive_stable: alpha must lie in (1,2); at alpha <= 1 "
            "the totally skewed law is one-sided");
    }
    ModelSpec m;
    m.kind = ModelKind::SpectrallyPositiveStable;
    m.limit = StableParams::make(alpha, 1.0); // rho = 1 - 1/alpha
    // alpha * rho_bar = 1: the descending ladder height is pure drift, so the
    // process crosses levels from above continuously with probability one.
    m.creeps_downward = true;
    m.has_negative_jumps = false;
    m.k_star = 0.0;
    m.sigma_eff = 1.0;
    return m;
}

ModelSpec ModelSpec::spectrally_negative_stable(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw config_error(
            "spectrally_negative_stable: alpha must lie in (1,2); at alpha <= 1 "
            "the totally skewed law is one-sided");
    }
    ModelSpec m;
    m.kind = ModelKind::SpectrallyNegativeStable;
    m.limit = StableParams::make(alpha, -1.0); // rho = 1/alpha
    m.creeps_downward = false;
    m.has_negative_jumps = true;
    m.k_star = levy_coeff_neg(m.limit) / alpha;
    m.sigma_eff = 1.0;
    return m;
}

ModelSpec ModelSpec::brownian_motion(double sigma) {
    require_positive(sigma, "brownian_motion: sigma");
    ModelSpec m;
    m.kind = ModelKind::BrownianMotion;
    m.limit = StableParams::make(2.0, 0.0);
    m.sigma = sigma;
    m.creeps_downward = true;
    m.has_negative_jumps = false;
    m.k_star = 0.0;
    m.sigma_eff = sigma;
    return m;
}

ModelSpec ModelSpec::brownian_plus_neg_cp(double sigma, double lambda, double jump_mean) {
    require_positive(sigma, "brownian_plus_neg_cp: sigma");
    require_positive(lambda, "brownian_plus_neg_cp: lambda");
    require_positive(jump_mean, "brownian_plus_neg_cp: jump_mean");
    ModelSpec m;
    m.kind = ModelKind::BrownianPlusNegCP;
    m.limit = StableParams::make(2.0, 0.0);
    m.sigma = sigma;
    m.lambda = lambda;
    m.jump_mean = jump_mean;
    m.creeps_downward = true; // Gaussian part present
    m.has_negative_jumps = true;
    // The exponential tail beats every power of c(t), so the rescaled
    // negative-jump intensity vanishes in the Gaussian limit.
    m.k_star = 0.0;
    // Var X_1 = sigma^2 + lambda * E[J^2] with E[J^2] = 2 * jump_mean^2.
    m.sigma_eff = std::sqrt(sigma * sigma + 2.0 * lambda * jump_mean * jump_mean);
    return m;
}

double norming_function(const ModelSpec& m, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("norming_function: t must be positive and finite");
    }
    return m.sigma_eff * std::pow(t, 1.0 / m.limit.alpha);
}

double levy_tail_neg(const ModelSpec& m, double y) {
    if (!(y > 0.0)) {
        throw std::invalid_argument("levy_tail_neg: y must be positive");
    }
    switch (m.kind) {
        case ModelKind::BrownianMotion:
        case ModelKind::SpectrallyPositiveStable:
            return 0.0;
        case ModelKind::BrownianPlusNegCP:
            return m.lambda * std::exp(-y / m.jump_mean);
        case ModelKind::TwoSidedStable:
        case ModelKind::SpectrallyNegativeStable: {
            const double alpha = m.limit.alpha;
            return levy_coeff_neg(m.limit) / alpha * std::pow(y, -alpha);
        }
    }
    throw std::logic_error("levy_tail_neg: corrupt ModelKind");
}

double sample_exact_increment(const ModelSpec& m, double dt, RngStream& rng) {
    switch (m.kind) {
        case ModelKind::TwoSidedStable:
        case ModelKind::SpectrallyPositiveStable:
        case ModelKind::SpectrallyNegativeStable:
            return norming_function(m, dt) * sample_stable(m.limit, rng);
        case ModelKind::BrownianMotion:
            return m.sigma * std::sqrt(dt) * rng.normal();
        case ModelKind::BrownianPlusNegCP: {
            // Centering drift + Gaussian part + downward compound-Poisson sum.
            double x = m.lambda * m.jump_mean * dt + m.sigma * std::sqrt(dt) * rng.normal();
            const std::uint64_t n = rng.poisson(m.lambda * dt);
            for (std::uint64_t i = 0; i < n; ++i) x -= m.jump_mean * rng.exp1();
            return x;
        }
    }
    throw std::logic_error("sample_exact_increment: corrupt ModelKind");
}

double default_jump_cutoff(const ModelSpec& m, double dt) {
    return 0.01 * norming_function(m, dt);
}

IncrementSampler::IncrementSampler(const ModelSpec& m, double dt, double cutoff)
    : kind_(m.kind), alpha_(m.limit.alpha), dt_(dt), cutoff_(cutoff) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw config_error("IncrementSampler: dt must be positive and finite");
    }
    switch (m.kind) {
        case ModelKind::BrownianMotion:
            cont_sd_ = m.sigma * std::sqrt(dt);
            break;
        case ModelKind::BrownianPlusNegCP:
            // Finite activity: every compound-Poisson jump is an explicit
            // event regardless of the cutoff, so the split is exact in law.
            cont_sd_ = m.sigma * std::sqrt(dt);
            cont_drift_ = m.lambda * m.jump_mean * dt;
            jump_rate_dt_ = m.lambda * dt;
            prob_positive_ = 0.0;
            exp_mean_ = m.jump_mean;
            break;
        case ModelKind::TwoSidedStable:
        case ModelKind::SpectrallyPositiveStable:
        case ModelKind::SpectrallyNegativeStable: {
            if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
                throw config_error("IncrementSampler: cutoff must be positive and finite");
            }
            const double alpha = alpha_;
            const double cpos = levy_coeff_pos(m.limit);
            const double cneg = levy_coeff_neg(m.limit);
            const double csum = cpos + cneg;
            // The Gaussian surrogate for sub-cutoff jumps is only trustworthy
            // when one step aggregates many of them: per-step variance must
            // dominate the square of the largest surrogate jump.
            if (std::pow(cutoff, alpha) > dt * csum / (2.0 - alpha)) {
                throw config_error(
                    "IncrementSampler: cutoff too large for the Gaussian "
                    "surrogate at this dt; lower the cutoff or enlarge dt");
            }
            jump_rate_dt_ = dt * csum / alpha * std::pow(cutoff, -alpha);
            prob_positive_ = cpos / csum;
            cont_sd_ = std::sqrt(dt * csum * std::pow(cutoff, 2.0 - alpha) / (2.0 - alpha));
            if (alpha > 1.0) {
                // Zero-mean process: compensate the mean of the explicit jumps.
                cont_drift_ = -dt * (cpos - cneg) * std::pow(cutoff, 1.0 - alpha) / (alpha - 1.0);
            } else if (alpha < 1.0) {
                // Bounded variation, no linear part: the surrogate carries the
                // mean of the sub-cutoff jumps it replaces.
                cont_drift_ = dt * (cpos - cneg) * std::pow(cutoff, 1.0 - alpha) / (1.0 - alpha);
            } else {
                // alpha = 1 is admitted only in the symmetric case, where both
                // corrections vanish by cancellation.
                cont_drift_ = 0.0;
            }
            break;
        }
    }
}

void IncrementSampler::sample(RngStream& rng, Increment& out) const {
    out.jumps.clear();
    out.continuous = cont_drift_ + cont_sd_ * rng.normal();
    if (jump_rate_dt_ <= 0.0) return;
    const std::uint64_t n = rng.poisson(jump_rate_dt_);
    if (kind_ == ModelKind::BrownianPlusNegCP) {
        for (std::uint64_t i = 0; i < n; ++i) {
            out.jumps.push_back(-exp_mean_ * rng.exp1());
        }
        return;
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        const double sign = rng.uniform01() < prob_positive_ ? 1.0 : -1.0;
        const double mag = cutoff_ * std::pow(rng.uniform01_pos(), -1.0 / alpha_);
        out.jumps.push_back(sign * mag);
    }
}

double renewal_U(const ModelSpec& m, double x, LadderSide which) {
    if (!(x >= 0.0)) {
        throw std::invalid_argument("renewal_U: x must be nonnegative");
    }
    if (m.kind == ModelKind::BrownianPlusNegCP) {
        throw unsupported_regime_error(
            "renewal_U: no closed form for BrownianPlusNegCP; pass the "
            "empirical ladder tables");
    }
    const double ex = which == LadderSide::up ? m.limit.alpha * m.limit.rho
                                              : m.limit.alpha * m.limit.rho_bar();
    return std::pow(x, ex);
}

double LadderData::renewal(double x, LadderSide which) const {
    if (!(x >= 0.0) || x > y_max) {
        throw std::invalid_argument("LadderData::renewal: x outside [0, y_max]");
    }
    const auto& chains = which == LadderSide::up ? up_chains : down_chains;
    if (chains.empty()) {
        throw insufficient_samples_error("LadderData::renewal: empty chain table", 0);
    }
    double total = 0.0;
    for (const auto& c : chains) {
        total += 1.0 + static_cast<double>(
                           std::upper_bound(c.begin(), c.end(), x) - c.begin());
    }
    return total / static_cast<double>(chains.size());
}

double LadderData::height_tail(double x, LadderSide which) const {
    const auto& h = which == LadderSide::up ? up_heights : down_heights;
    if (h.empty()) {
        throw insufficient_samples_error("LadderData::height_tail: empty height pool", 0);
    }
    std::size_t over = 0;
    for (double v : h) over += v > x ? 1 : 0;
    return static_cast<double>(over) / static_cast<double>(h.size());
}

double LadderData::mean_height(LadderSide which) const {
    const auto& h = which == LadderSide::up ? up_heights : down_heights;
    if (h.empty()) {
        throw insufficient_samples_error("LadderData::mean_height: empty height pool", 0);
    }
    double s = 0.0;
    for (double v : h) s += v;
    return s / static_cast<double>(h.size());
}

namespace {

struct LadderAcc {
    std::vector<double> up;
    std::vector<double> down;
};

std::vector<std::vector<double>> build_chains(const std::vector<double>& pool,
                                              double y_max) {
    std::vector<std::vector<double>> chains;
    std::vector<double> cur;
    double s = 0.0;
    for (double h : pool) {
        s += h;
        cur.push_back(s);
        if (s > y_max) {
            chains.push_back(std::move(cur));
            cur = {};
            s = 0.0;
        }
    }
    // An unfinished trailing chain would undercount points near y_max; drop it.
    return chains;
}

} // namespace

LadderData simulate_ladder_data(const ModelSpec& m, std::size_t n_epochs, double dt,
                                double y_max, std::uint64_t master_seed,
                                unsigned workers) {
    if (n_epochs == 0) throw std::invalid_argument("simulate_ladder_data: n_epochs == 0");
    require_positive(dt, "simulate_ladder_data: dt");
    require_positive(y_max, "simulate_ladder_data: y_max");

    // Ladder epoch lengths have infinite mean (the step count tail decays like
    // n^{-1/2}), so runaway epochs are abandoned at a cap that loses only a
    // fraction ~ cap^{-1/2} of them.
    constexpr std::uint64_t kMaxSteps = 100000;
    const std::uint64_t n = n_epochs;
    auto blocks = run_blocks<LadderAcc>(
        master_seed, 2 * n, 2048, workers,
        [&](LadderAcc& acc, std::uint64_t idx, RngStream& rng) {
            const bool up = idx < n;
            double s = 0.0;
            for (std::uint64_t step = 0; step < kMaxSteps; ++step) {
                s += sample_exact_increment(m, dt, rng);
                if (up ? s > 0.0 : s < 0.0) {
                    (up ? acc.up : acc.down).push_back(up ? s : -s);
                    return;
                }
            }
        });

    LadderData out;
    out.dt = dt;
    out.y_max = y_max;
    out.up_heights.reserve(n_epochs);
    out.down_heights.reserve(n_epochs);
    for (auto& b : blocks) {
        out.up_heights.insert(out.up_heights.end(), b.up.begin(), b.up.end());
        out.down_heights.insert(out.down_heights.end(), b.down.begin(), b.down.end());
    }
    const std::size_t min_pool = std::min(out.up_heights.size(), out.down_heights.size());
    if (min_pool < 100) {
        throw insufficient_samples_error(
            "simulate_ladder_data: too few completed ladder epochs", min_pool);
    }
    out.up_chains = build_chains(out.up_heights, y_max);
    out.down_chains = build_chains(out.down_heights, y_max);
    if (out.up_chains.empty() || out.down_chains.empty()) {
        throw insufficient_samples_error(
            "simulate_ladder_data: y_max too large, no chain completed", min_pool);
    }
    return out;
}

double renewal_U(const ModelSpec& m, double x, LadderSide which,
                 const LadderData& tables) {
    if (m.kind == ModelKind::BrownianPlusNegCP) return tables.renewal(x, which);
    return renewal_U(m, x, which);
}

} // namespace levyfp
