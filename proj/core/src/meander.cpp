#include "levyfp/meander.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "levyfp/errors.hpp"
#include "levyfp/parallel.hpp"
#include "levyfp/rng.hpp"

namespace levyfp {
namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kSqrt2Pi = 2.506628274631000502415765284811045;

double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(q * (static_cast<double>(v.size()) - 1.0));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

// int_a^b (z+w)^{-alpha} dw, 0 <= a <= b, z >= 0, with (z, a) != (0, 0).
double shifted_power_mass(double alpha, double z, double a, double b) {
    if (alpha == 1.0) return std::log(z + b) - std::log(z + a);
    return (std::pow(z + b, 1.0 - alpha) - std::pow(z + a, 1.0 - alpha)) / (1.0 - alpha);
}

struct HistSide {
    const std::vector<double>* values;
    double boundary_coeff;
    double boundary_exp;
};

// E[(z+Z)^{-alpha}] over one histogram side: bulk bins by closed form, the
// region below the first interior edge by the fitted boundary power law, and
// the tail beyond the last edge by the power decay w^{-(1+alpha)}.
double side_negative_moment(const MeanderTable& t, const HistSide& s, double z) {
    const double alpha = t.params.alpha;
    const double h = t.bin_width;
    const std::size_t n = t.bins();
    if (n < 3) throw std::invalid_argument("meander table too small");

    double total = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double v = (*s.values)[i];
        if (v > 0.0) total += v * shifted_power_mass(alpha, z, t.edge(i), t.edge(i + 1));
    }
    // boundary piece over [0, e_1]
    const double e1 = t.edge(1);
    const double C = s.boundary_coeff;
    if (C > 0.0) {
        const double ex = s.boundary_exp;
        if (z == 0.0) {
            // exponent ex - alpha > -1 exactly when alpha*rho_bar < 1
            total += C * std::pow(e1, 1.0 + ex - alpha) / (1.0 + ex - alpha);
        } else {
            auto ig = [&](double w) { return C * std::pow(w, ex) * std::pow(z + w, -alpha); };
            total += integrate(ig, 0.0, e1, {1e-12, 1e-8, 400}).value;
        }
    }
    // tail piece: g(w) = g_N (w/c_N)^{-(1+alpha)} for w beyond the last edge;
    // assembled in log space so huge abscissae cannot overflow to inf * 0
    const double gN = s.values->back();
    if (gN > 0.0) {
        const double lcN = std::log(t.grid.back());
        const double E = t.edge(n);
        auto ig = [&](double lw) {
            const double lzw = lw + std::log1p(z * std::exp(-lw));
            return gN * std::exp(-(1.0 + alpha) * (lw - lcN) - alpha * lzw + lw);
        };
        total += integrate_to_inf(ig, std::log(E), {1e-13, 1e-8, 400}).value;
    }
    return total;
}

void require_moment_regime(const StableParams& p) {
    if (p.alpha * p.rho_bar() > 1.0 - 1e-12)
        throw unsupported_regime_error(
            "negative meander moment diverges when alpha*(1-rho) = 1");
}

} // namespace

double MeanderTable::g(double w) const {
    if (!(w > 0.0)) return 0.0;
    const std::size_t n = bins();
    if (w < edge(1)) return boundary_coeff * std::pow(w, params.alpha * params.rho);
    if (w >= edge(n))
        return g_values.back() * std::pow(w / grid.back(), -(1.0 + params.alpha));
    auto i = static_cast<std::size_t>(w / bin_width);
    if (i >= n) i = n - 1;
    return g_values[i];
}

double MeanderTable::g_star(double w) const {
    if (!(w > 0.0)) return 0.0;
    const std::size_t n = bins();
    if (w < edge(1)) return boundary_coeff_star * std::pow(w, params.alpha * params.rho_bar());
    if (w >= edge(n))
        return g_star_values.back() * std::pow(w / grid.back(), -(1.0 + params.alpha));
    auto i = static_cast<std::size_t>(w / bin_width);
    if (i >= n) i = n - 1;
    return g_star_values[i];
}

double MeanderTable::trapezoid_mass_g() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < bins(); ++i)
        m += 0.5 * (g_values[i] + g_values[i + 1]) * bin_width;
    return m;
}

double MeanderTable::trapezoid_mass_g_star() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < bins(); ++i)
        m += 0.5 * (g_star_values[i] + g_star_values[i + 1]) * bin_width;
    return m;
}

void MeanderTable::write_csv(std::ostream& os) const {
    os << "y,g,g_star,ci_g,ci_g_star\n";
    char buf[160];
    for (std::size_t i = 0; i < bins(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", grid[i],
                      g_values[i], g_star_values[i], ci_g[i], ci_g_star[i]);
        os << buf;
    }
}

MeanderTable estimate_meander_densities(const StableParams& p,
                                        std::uint64_t n_steps,
                                        std::uint64_t n_paths,
                                        const std::vector<double>& grid,
                                        std::uint64_t master_seed,
                                        unsigned workers) {
    if (n_steps < 64) throw std::invalid_argument("meander walks need at least 64 steps");
    if (n_paths == 0) throw std::invalid_argument("meander estimation needs candidate paths");

    const StableParams dual = p.dual();
    const double scale = std::pow(static_cast<double>(n_steps), -1.0 / p.alpha);

    struct Acc {
        std::vector<double> g_pts;
        std::vector<double> gs_pts;
    };
    auto job = [&](Acc& acc, std::uint64_t item, RngStream& rng) {
        const bool primal = item < n_paths;
        const StableParams& q = primal ? p : dual;
        double pos = 0.0;
        for (std::uint64_t k = 0; k < n_steps; ++k) {
            pos += sample_stable(q, rng);
            if (!(pos > 0.0)) return;
        }
        (primal ? acc.g_pts : acc.gs_pts).push_back(pos * scale);
    };
    auto blocks = run_blocks<Acc>(master_seed, 2 * n_paths, 4096, workers, job);
    Acc all = fold_blocks(std::move(blocks), [](Acc& t, const Acc& b) {
        t.g_pts.insert(t.g_pts.end(), b.g_pts.begin(), b.g_pts.end());
        t.gs_pts.insert(t.gs_pts.end(), b.gs_pts.begin(), b.gs_pts.end());
    });

    if (all.g_pts.size() < 1000) throw insufficient_samples_error(
        "meander acceptance too low on the primal side", all.g_pts.size());
    if (all.gs_pts.size() < 1000) throw insufficient_samples_error(
        "meander acceptance too low on the dual side", all.gs_pts.size());

    MeanderTable t;
    t.params = p;
    t.n_paths = n_paths;
    t.n_steps = n_steps;
    t.accepted = all.g_pts.size();
    t.accepted_star = all.gs_pts.size();

    if (grid.empty()) {
        std::vector<double> combined = all.g_pts;
        combined.insert(combined.end(), all.gs_pts.begin(), all.gs_pts.end());
        const double iqr = percentile(combined, 0.75) - percentile(combined, 0.25);
        const double n_comb = static_cast<double>(combined.size());
        t.bin_width = std::max(0.02, 2.0 * iqr * std::pow(n_comb, -1.0 / 3.0));
        // Heavy-tailed cases push high percentiles far out; the evaluators
        // carry an explicit power tail, so the grid only needs the body.
        const double w_max = std::min(percentile(combined, 0.995), 60.0);
        auto nb = static_cast<std::size_t>(std::ceil(w_max / t.bin_width));
        nb = std::min<std::size_t>(std::max<std::size_t>(nb, 8), 4000);
        t.grid.resize(nb);
        for (std::size_t i = 0; i < nb; ++i)
            t.grid[i] = (static_cast<double>(i) + 0.5) * t.bin_width;
    } else {
        if (grid.size() < 3) throw std::invalid_argument("meander grid needs >= 3 points");
        const double h = grid[1] - grid[0];
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            if (std::abs(grid[i + 1] - grid[i] - h) > 1e-9 * h)
                throw std::invalid_argument("meander grid must be uniformly spaced");
        if (std::abs(grid[0] - 0.5 * h) > 1e-9 * h)
            throw std::invalid_argument("meander grid must start at half a bin width");
        t.grid = grid;
        t.bin_width = h;
    }

    const std::size_t nb = t.grid.size();
    auto fill = [&](const std::vector<double>& pts, std::vector<double>& val,
                    std::vector<double>& ci) {
        std::vector<std::uint64_t> cnt(nb, 0);
        for (double z : pts) {
            auto i = static_cast<std::size_t>(z / t.bin_width);
            if (i < nb) ++cnt[i];
        }
        val.resize(nb);
        ci.resize(nb);
        const double N = static_cast<double>(pts.size());
        for (std::size_t i = 0; i < nb; ++i) {
            const double frac = static_cast<double>(cnt[i]) / N;
            val[i] = frac / t.bin_width;
            // floor the variance at one count so empty bins still declare a
            // usable half-width instead of a zero-width interval
            const double fe = std::max(frac, 1.0 / N);
            ci[i] = 1.96 * std::sqrt(fe * (1.0 - fe) / N) / t.bin_width;
        }
    };
    fill(all.g_pts, t.g_values, t.ci_g);
    fill(all.gs_pts, t.g_star_values, t.ci_g_star);

    auto fit_boundary = [&](const std::vector<double>& val, double ex) {
        double c = 0.0;
        for (std::size_t i = 0; i < 3; ++i) c += val[i] / std::pow(t.grid[i], ex);
        return c / 3.0;
    };
    t.boundary_coeff = fit_boundary(t.g_values, p.alpha * p.rho);
    t.boundary_coeff_star = fit_boundary(t.g_star_values, p.alpha * p.rho_bar());
    return t;
}

double meander_negative_moment(const MeanderTable& table, double z) {
    require_moment_regime(table.params);
    const HistSide side{&table.g_values, table.boundary_coeff,
                        table.params.alpha * table.params.rho};
    return side_negative_moment(table, side, z);
}

double meander_phi(const MeanderTable& table, double z) {
    if (!(z >= 0.0)) throw std::invalid_argument("phi argument must be nonnegative");
    if (z == 0.0) return 1.0;
    return meander_negative_moment(table, z) / meander_negative_moment(table, 0.0);
}

PhiIntegral::PhiIntegral(const MeanderTable& table) {
    require_moment_regime(table.params);
    alpha_ = table.params.alpha;
    u_lo_ = 1e-7;
    u_hi_ = 1e9;
    const std::size_t n = 700;
    const double denom = meander_negative_moment(table, 0.0);
    log_u_.resize(n);
    log_phi_.resize(n);
    const double l0 = std::log(u_lo_), l1 = std::log(u_hi_);
    for (std::size_t i = 0; i < n; ++i) {
        log_u_[i] = l0 + (l1 - l0) * static_cast<double>(i) / (static_cast<double>(n) - 1.0);
        const double ph = side_negative_moment(
                              table,
                              {&table.g_values, table.boundary_coeff,
                               table.params.alpha * table.params.rho},
                              std::exp(log_u_[i])) /
                          denom;
        log_phi_[i] = std::log(std::max(ph, 1e-300));
    }
    tail_coeff_ = std::exp(log_phi_.back() + alpha_ * log_u_.back());
    // cumulative integral over the cache, per-segment power-law closed form
    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        cum_[i + 1] = cum_[i] + segment_integral(i, std::exp(log_u_[i]),
                                                 std::exp(log_u_[i + 1]));
}

double PhiIntegral::segment_integral(std::size_t i, double ua, double ub) const {
    // On segment i, phi(u) = phi_i (u/u_i)^p with p from the cached slope.
    const double ui = std::exp(log_u_[i]);
    const double phi_i = std::exp(log_phi_[i]);
    const double p = (log_phi_[i + 1] - log_phi_[i]) / (log_u_[i + 1] - log_u_[i]);
    if (std::abs(p + 1.0) < 1e-9) return phi_i * ui * std::log(ub / ua);
    return phi_i * ui / (p + 1.0) *
           (std::pow(ub / ui, p + 1.0) - std::pow(ua / ui, p + 1.0));
}

double PhiIntegral::phi(double z) const {
    if (z <= u_lo_) return 1.0;
    if (z >= u_hi_) return tail_coeff_ * std::pow(z, -alpha_);
    const double lz = std::log(z);
    const double step = log_u_[1] - log_u_[0];
    auto i = static_cast<std::size_t>((lz - log_u_[0]) / step);
    if (i + 1 >= log_u_.size()) i = log_u_.size() - 2;
    const double f = (lz - log_u_[i]) / step;
    return std::exp(log_phi_[i] * (1.0 - f) + log_phi_[i + 1] * f);
}

double PhiIntegral::integral(double a, double b) const {
    if (!(b > a)) return 0.0;
    // Narrow intervals: midpoint rule avoids cancellation in the cumulative.
    if (b - a < 1e-6 * std::max(1.0, a)) return phi(0.5 * (a + b)) * (b - a);

    double total = 0.0;
    if (a < u_lo_) {
        total += std::min(b, u_lo_) - a; // phi = 1 below the cache
        a = u_lo_;
        if (b <= a) return total;
    }
    if (a < u_hi_) {
        const double hi = std::min(b, u_hi_);
        const double step = log_u_[1] - log_u_[0];
        auto idx = [&](double u) {
            auto i = static_cast<std::size_t>((std::log(u) - log_u_[0]) / step);
            return std::min(i, log_u_.size() - 2);
        };
        const std::size_t ia = idx(a), ib = idx(hi);
        if (ia == ib) {
            total += segment_integral(ia, a, hi);
        } else {
            total += segment_integral(ia, a, std::exp(log_u_[ia + 1]));
            total += cum_[ib] - cum_[ia + 1];
            total += segment_integral(ib, std::exp(log_u_[ib]), hi);
        }
        a = hi;
        if (b <= a) return total;
    }
    // asymptotic tail phi(u) = c u^{-alpha}
    if (alpha_ == 1.0) return total + tail_coeff_ * std::log(b / a);
    return total + tail_coeff_ * (std::pow(a, 1.0 - alpha_) - std::pow(b, 1.0 - alpha_)) /
                       (alpha_ - 1.0);
}

namespace {

// Inner integral of the passage-density convolution at a fixed time split s:
//   int_0^x phi((x-y)(1-s)^{-eta}) g*(y s^{-eta}) dy
// evaluated exactly against the piecewise-constant g* histogram by mapping
// each bin through the linear change of variable onto integrals of phi.
// oms = 1-s is passed explicitly: near s = 1 the outer substitution works
// with values of 1-s far below machine epsilon.
double passage_inner(const StableParams& p, double x, const MeanderTable& t,
                     const PhiIntegral& phi, double s, double oms) {
    const double eta = p.eta();
    const double se = std::pow(s, eta);              // y = w * s^eta
    const double use = std::pow(oms, -eta);
    const double W = x / se;                         // w-range is (0, W]
    const double jac = std::pow(oms, eta) / se;      // dw -> du factor
    auto u_of = [&](double w) { return (x - w * se) * use; };

    double total = 0.0;
    const std::size_t n = t.bins();
    // boundary power-law piece over (0, min(e_1, W)]
    {
        const double hi = std::min(t.edge(1), W);
        const double C = t.boundary_coeff_star;
        if (C > 0.0 && hi > 0.0) {
            const double ex = p.alpha * p.rho_bar();
            auto ig = [&](double w) {
                return C * std::pow(w, ex) * phi.phi(std::max(u_of(w), 0.0));
            };
            total += integrate(ig, 0.0, hi, {1e-13, 1e-7, 300}).value;
        }
    }
    // histogram bins, each a constant times an exact phi integral
    for (std::size_t i = 1; i < n && t.edge(i) < W; ++i) {
        const double v = t.g_star_values[i];
        if (v <= 0.0) continue;
        const double wa = t.edge(i), wb = std::min(t.edge(i + 1), W);
        total += v * jac * phi.integral(std::max(u_of(wb), 0.0), u_of(wa));
    }
    // power tail of g* beyond the table, integrated in log w
    if (W > t.edge(n)) {
        const double gN = t.g_star_values.back();
        if (gN > 0.0) {
            const double cN = t.grid.back();
            auto ig = [&](double lw) {
                const double w = std::exp(lw);
                if (w >= W) return 0.0;
                return gN * std::pow(w / cN, -(1.0 + p.alpha)) *
                       phi.phi(std::max(u_of(w), 0.0)) * w;
            };
            // truncate where the remaining g* tail mass is negligible
            const double w_stop = std::min(W, t.edge(n) * 1e8);
            total += integrate(ig, std::log(t.edge(n)), std::log(w_stop),
                               {1e-13, 1e-7, 400}).value;
        }
    }
    return total * se; // dy = s^eta dw
}

double passage_density_by_convolution(const StableParams& p, double x,
                                      const MeanderTable& t) {
    const PhiIntegral phi(t);
    const double eta = p.eta();
    const double rho = p.rho, rhob = p.rho_bar();
    const double pref = rhob / (std::tgamma(rhob) * std::tgamma(rho));

    auto outer = [&](double s, double oms) {
        return passage_inner(p, x, t, phi, s, oms) * std::pow(oms, -rhob - 1.0) *
               std::pow(s, -rho - eta);
    };
    // s in (0, 1/2]: substitute s = v^{1/(1-rho)} to flatten the s^{-rho} edge
    const double q1 = 1.0 / (1.0 - rho);
    auto left = [&](double v) {
        // the substituted integrand is flat at 0; keep s representable
        const double s = std::max(std::pow(v, q1), 1e-160);
        return outer(s, 1.0 - s) * q1 * std::pow(v, q1 - 1.0);
    };
    const QuadResult I1 =
        integrate(left, 0.0, std::pow(0.5, 1.0 - rho), {1e-10, 1e-6, 800});
    // s in (1/2, 1): substitute 1-s = w^{1/(eta-rhob)}, carrying 1-s exactly
    const double ex = eta - rhob; // positive exactly when alpha*rho_bar < 1
    const double q2 = 1.0 / ex;
    auto right = [&](double w) {
        const double oms = std::max(std::pow(w, q2), 1e-180);
        return outer(1.0 - oms, oms) * q2 * std::pow(w, q2 - 1.0);
    };
    const QuadResult I2 = integrate(right, 0.0, std::pow(0.5, ex), {1e-10, 1e-6, 800});
    return pref * (I1.value + I2.value);
}

} // namespace

double stable_passage_density(const StableParams& p, double x,
                              const MeanderTable* table) {
    if (!(x > 0.0)) throw std::invalid_argument("passage start must be positive");
    if (p.alpha == 2.0) return x * std::exp(-0.5 * x * x) / kSqrt2Pi;
    if (levy_coeff_neg(p) < 1e-14) {
        // No negative jumps: passage from x is a rescaled one-sided stable
        // ladder time (the Laplace exponent is exactly l^alpha here).
        const double xa = std::pow(x, -p.alpha);
        return xa * positive_stable_density(p.eta(), xa);
    }
    if (table == nullptr)
        throw std::invalid_argument(
            "passage density with negative jumps needs a meander table");
    return passage_density_by_convolution(p, x, *table);
}

} // namespace levyfp
