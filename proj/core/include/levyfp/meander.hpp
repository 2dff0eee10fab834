#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "levyfp/quadrature.hpp"
#include "levyfp/stable.hpp"

namespace levyfp {

// Histogram estimates of the endpoint densities of the length-1 meander of Y
// (column g) and of -Y (column g_star), built by acceptance-rejection over
// random walks conditioned to stay strictly positive.  The table carries
// fitted boundary power laws C·w^e below the first bin (e = alpha*rho for g,
// alpha*rho_bar for g_star -- the known boundary exponents of the meander
// endpoint laws) and a power tail beyond the last bin, so that the moment
// integrals that are singular at 0 stay finite and accurate.
struct MeanderTable {
    StableParams params{2.0, 0.5, 0.0};

    std::vector<double> grid;          // bin centers, uniform spacing
    std::vector<double> g_values;      // histogram densities at the centers
    std::vector<double> g_star_values;
    std::vector<double> ci_g;          // 95% half-widths, same units as g
    std::vector<double> ci_g_star;

    double bin_width = 0.0;
    std::uint64_t n_paths = 0;         // candidate walks per side
    std::uint64_t n_steps = 0;
    std::uint64_t accepted = 0;        // surviving walks, g side
    std::uint64_t accepted_star = 0;   // surviving walks, g_star side
    double boundary_coeff = 0.0;       // C with g(w) ~ C·w^{alpha·rho} near 0
    double boundary_coeff_star = 0.0;  // C* with g*(w) ~ C*·w^{alpha·rho_bar}

    // Point evaluation with boundary extension below the first bin edge and
    // power tail decay w^{-(1+alpha)} beyond the last edge.
    double g(double w) const;
    double g_star(double w) const;

    double trapezoid_mass_g() const;
    double trapezoid_mass_g_star() const;

    std::size_t bins() const { return grid.size(); }
    double edge(std::size_t i) const { return static_cast<double>(i) * bin_width; }

    // CSV with header y,g,g_star,ci_g,ci_g_star at 12 significant digits.
    void write_csv(std::ostream& os) const;
};

// Acceptance-rejection estimation of both meander endpoint densities.  Each
// candidate walk takes n_steps stable increments and is kept iff every
// partial sum is strictly positive; kept endpoints are rescaled by
// n_steps^{1/alpha}.  Items 0..n_paths-1 drive the g side, items
// n_paths..2n_paths-1 the g_star side, each from its own RNG stream, so the
// result is independent of worker count.  If grid is empty, a uniform grid
// is built with bin width max(0.02, 2·IQR·N^{-1/3}) capped to the 99.5th
// sample percentile.  Throws insufficient_samples_error if a side keeps
// fewer than 1000 walks.
MeanderTable estimate_meander_densities(const StableParams& p,
                                        std::uint64_t n_steps,
                                        std::uint64_t n_paths,
                                        const std::vector<double>& grid,
                                        std::uint64_t master_seed,
                                        unsigned workers = 0);

// E[(z+Z)^{-alpha}] computed from the g side of the table: per-bin closed
// forms plus the boundary-extension and tail pieces.  Requires
// alpha*rho_bar < 1 (else the z=0 moment diverges); throws
// unsupported_regime_error otherwise.
double meander_negative_moment(const MeanderTable& table, double z = 0.0);

// phi(z) = E[(z+Z)^{-alpha}] / E[Z^{-alpha}]; 1 at z = 0, nonincreasing.
double meander_phi(const MeanderTable& table, double z);

// Integrated-phi cache: phi evaluated on a fixed log grid once, then
// integrals int_a^b phi(u) du come from per-segment power-law closed forms.
// Needed by the passage-density convolution, where the inner integral of
// phi against the piecewise-constant g_star histogram is taken exactly.
class PhiIntegral {
  public:
    explicit PhiIntegral(const MeanderTable& table);

    double phi(double z) const;
    // int_a^b phi(u) du for 0 <= a <= b, with the asymptotic power tail
    // phi(u) ~ c·u^{-alpha} beyond the cached range.
    double integral(double a, double b) const;

  private:
    double alpha_;
    double tail_coeff_;                // c with phi(u) ~ c·u^{-alpha}
    std::vector<double> log_u_, log_phi_;
    std::vector<double> cum_;          // int_{u_0}^{u_i} phi du
    double u_lo_, u_hi_;
    double segment_integral(std::size_t i, double ua, double ub) const;
};

// Density at time 1 of the first passage below 0 of Y started from x > 0.
//   alpha = 2           : closed form x·exp(-x^2/2)/sqrt(2*pi).
//   no negative jumps   : ladder-time scaling through the one-sided stable
//                         density (exact in this normalization).
//   alpha*rho_bar < 1   : double quadrature of the excursion-meander
//                         convolution identity, using phi and g_star.
// The table argument is only consulted on the last branch.
double stable_passage_density(const StableParams& p, double x,
                              const MeanderTable* table = nullptr);

} // namespace levyfp
