#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyfp/rng.hpp"
#include "levyfp/stable.hpp"

namespace levyfp {

// Registry of concrete processes attracted to the (alpha, rho) limit law,
// each carrying its exact norming constant, negative-jump tail, and ladder
// exponents so downstream checks can be sharp rather than asymptotic-only.
enum class ModelKind {
    TwoSidedStable,
    SpectrallyPositiveStable,
    SpectrallyNegativeStable,
    BrownianMotion,
    BrownianPlusNegCP,
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name); // config_error if unknown

struct ModelSpec {
    ModelKind kind;
    StableParams limit;      // attracting stable law (our unit-scale family)
    double sigma = 0.0;      // Gaussian coefficient
    double lambda = 0.0;     // compound-Poisson intensity (negative jumps)
    double jump_mean = 0.0;  // mean of the exponential jump sizes

    bool creeps_downward = false;    // crossing 0 continuously has positive prob
    bool has_negative_jumps = false; // negative-jump tail not identically 0
    double k_star = 0.0;             // lim t * levy_tail_neg(c(t))
    double sigma_eff = 1.0;          // c(t) = sigma_eff * t^{1/alpha} exactly
    // Ladder-time drifts, zero for every registry model (regular processes).
    double ladder_time_drift = 0.0;
    double dual_ladder_time_drift = 0.0;
    std::optional<double> d_star_known; // downward ladder-height drift if known

    static ModelSpec two_sided_stable(double alpha, double beta = 0.0);
    static ModelSpec spectrally_positive_stable(double alpha);
    static ModelSpec spectrally_negative_stable(double alpha);
    static ModelSpec brownian_motion(double sigma = 1.0);
    static ModelSpec brownian_plus_neg_cp(double sigma, double lambda,
                                          double jump_mean);

    bool is_stable() const {
        return kind == ModelKind::TwoSidedStable ||
               kind == ModelKind::SpectrallyPositiveStable ||
               kind == ModelKind::SpectrallyNegativeStable;
    }
    std::string name() const { return to_string(kind); }
};

// c(t) = sigma_eff * t^{1/alpha}; exact for every registry model.
double norming_function(const ModelSpec& m, double t);

// Negative-jump tail of the Levy measure.
double levy_tail_neg(const ModelSpec& m, double y);

// One grid increment drawn exactly from the model's increment law (stable
// draw, Gaussian, or Gaussian + compound Poisson + centering drift).  Use
// when crossing classification is not needed.
double sample_exact_increment(const ModelSpec& m, double dt, RngStream& rng);

// One grid increment split into a continuous surrogate and explicit jumps.
struct Increment {
    double continuous = 0.0;
    std::vector<double> jumps; // signed sizes; reused across calls
    double total() const {
        double s = continuous;
        for (double j : jumps) s += j;
        return s;
    }
};

// Small-jump Gaussian surrogate + explicit big jumps.  For the stable kinds
// jumps with |size| > cutoff become explicit events and the remainder is
// approximated by a matched Gaussian; for the compound-Poisson kind every
// jump is explicit (finite activity) and the split is exact in law.
class IncrementSampler {
public:
    // Throws config_error when the cutoff is too large for the Gaussian
    // surrogate to be valid for this model at this step size.
    IncrementSampler(const ModelSpec& m, double dt, double cutoff);

    void sample(RngStream& rng, Increment& out) const;

    double expected_jump_count() const { return jump_rate_dt_; }
    double continuous_sd() const { return cont_sd_; }
    double continuous_drift() const { return cont_drift_; }
    double cutoff() const { return cutoff_; }
    double dt() const { return dt_; }

private:
    ModelKind kind_;
    double alpha_ = 2.0;
    double dt_ = 0.0;
    double cutoff_ = 0.0;
    double cont_sd_ = 0.0;
    double cont_drift_ = 0.0;
    double jump_rate_dt_ = 0.0; // Poisson mean of explicit jumps per step
    double prob_positive_ = 0.0;
    double exp_mean_ = 0.0; // compound-Poisson jump size mean
};

// Default big-jump cutoff for a step size: a hundredth of the step scale.
double default_jump_cutoff(const ModelSpec& m, double dt);

// Renewal functions of the ladder height processes, closed-form branch:
// U(x) = x^{alpha rho}, U*(x) = x^{alpha rho_bar} (scale-free power laws).
enum class LadderSide { up, down };
double renewal_U(const ModelSpec& m, double x, LadderSide which);

// Empirical ladder tables for the compound-Poisson model, where no closed
// form exists.  Chains store partial-sum sequences of independent first
// ladder heights, truncated at y_max; heights keep the raw increments.
struct LadderData {
    double dt = 0.0;
    double y_max = 0.0;
    std::vector<double> up_heights;
    std::vector<double> down_heights;
    std::vector<std::vector<double>> up_chains;   // partial sums, T_0 = 0 omitted
    std::vector<std::vector<double>> down_chains;

    // Expected number of ladder points with partial sum <= x (counts T_0).
    double renewal(double x, LadderSide which) const;
    // Empirical tail P(first ladder height > x).
    double height_tail(double x, LadderSide which) const;
    double mean_height(LadderSide which) const;
};

LadderData simulate_ladder_data(const ModelSpec& m, std::size_t n_epochs,
                                double dt, double y_max,
                                std::uint64_t master_seed,
                                unsigned workers = 0);

double renewal_U(const ModelSpec& m, double x, LadderSide which,
                 const LadderData& tables);

} // namespace levyfp
