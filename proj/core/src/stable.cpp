#include "levyfp/stable.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "levyfp/errors.hpp"

namespace levyfp {
namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kSqrt2Pi = 2.506628274631000502415765284811045;

void validate(const StableParams& p) {
    if (!(p.alpha > 0.0) || p.alpha > 2.0)
        throw std::invalid_argument("stable index must lie in (0, 2]");
    if (!(p.rho > 0.0) || !(p.rho < 1.0))
        throw std::invalid_argument("positivity parameter must lie in (0, 1)");
    if (p.alpha * p.rho > 1.0 + 1e-12 || p.alpha * (1.0 - p.rho) > 1.0 + 1e-12)
        throw std::invalid_argument("inadmissible (alpha, rho): alpha*rho and "
                                    "alpha*(1-rho) must not exceed 1");
    const double want = rho_from_skewness(p.alpha, p.beta);
    if (std::abs(want - p.rho) > 1e-12)
        throw std::invalid_argument("rho inconsistent with (alpha, beta)");
}

// Rotation geometry for the contour-inversion integrals on {x >= 0}: the ray
// arg(lambda) = -nu keeps both exp(-i lambda x) and the stable term decaying.
struct Rotation {
    double nu;        // rotation angle in (0, pi/2]
    double sin_nu, cos_nu;
    double w;         // alpha*nu + pi*alpha*(rho - 1/2)
    double cos_w, sin_w;
};

Rotation make_rotation(const StableParams& p) {
    const double delta = p.rho - 0.5;
    // Largest admissible angle: alpha*nu + pi*alpha*delta <= pi/2.  Half of
    // it keeps strictly positive decay in the stable term so the integrand
    // also dies at x = 0.
    const double nu_max = kPi * (1.0 + p.alpha - 2.0 * p.alpha * p.rho) / (2.0 * p.alpha);
    const double nu = std::min(kPi / 2.0, 0.5 * nu_max);
    Rotation r;
    r.nu = nu;
    r.sin_nu = std::sin(nu);
    r.cos_nu = std::cos(nu);
    r.w = p.alpha * nu + kPi * p.alpha * delta;
    r.cos_w = std::cos(r.w);
    r.sin_w = std::sin(r.w);
    return r;
}

// Density on x >= 0 for alpha < 2 (callers pass the dual law for x < 0).
double density_nonneg(const StableParams& p, double x, const QuadOptions& opt) {
    const Rotation r = make_rotation(p);
    // Rescale r -> u so the integrand lives on an O(1) scale whether the
    // decay comes from the x term (large x) or the stable term (small x).
    const double scale = 1.0 / (1.0 + x * r.sin_nu);
    auto integrand = [&](double u) {
        const double rr = u * scale;
        const double ra = std::pow(rr, p.alpha);
        const double damp = -x * rr * r.sin_nu - ra * r.cos_w;
        const double phase = x * rr * r.cos_nu - ra * r.sin_w + r.nu;
        return std::exp(damp) * std::cos(phase);
    };
    const QuadResult q = integrate_to_inf(integrand, 0.0, opt);
    return q.value * scale / kPi;
}

// Upper tail on x >= 0 for alpha < 2.  The rotated contour passes the pole
// at the origin, which contributes the constant (1/2 - nu/pi).
double tail_nonneg(const StableParams& p, double x, const QuadOptions& opt) {
    const Rotation r = make_rotation(p);
    const double scale = 1.0 / (1.0 + x * r.sin_nu);
    auto integrand = [&](double u) {
        const double rr = u * scale;
        const double ra = std::pow(rr, p.alpha);
        const double damp = -x * rr * r.sin_nu - ra * r.cos_w;
        return std::exp(damp) * std::sin(ra * r.sin_w - x * rr * r.cos_nu) / u;
    };
    const QuadResult q = integrate_to_inf(integrand, 0.0, opt);
    return 0.5 - r.nu / kPi + q.value / kPi;
}

} // namespace

double rho_from_skewness(double alpha, double beta) {
    if (beta < -1.0 || beta > 1.0)
        throw std::invalid_argument("skewness must lie in [-1, 1]");
    if (alpha == 2.0) {
        if (beta != 0.0)
            throw std::invalid_argument("alpha = 2 requires beta = 0");
        return 0.5;
    }
    if (alpha == 1.0) {
        if (beta != 0.0)
            throw unsupported_regime_error(
                "alpha = 1 with nonzero skewness is not strictly stable; only "
                "the symmetric case is supported");
        return 0.5;
    }
    return 0.5 + std::atan(beta * std::tan(kPi * alpha / 2.0)) / (kPi * alpha);
}

StableParams StableParams::make(double alpha, double beta) {
    StableParams p{alpha, rho_from_skewness(alpha, beta), beta};
    validate(p);
    return p;
}

double stable_density(const StableParams& p, double x, const QuadOptions& opt) {
    validate(p);
    if (p.alpha == 2.0)
        return std::exp(-0.5 * x * x) / kSqrt2Pi;
    if (p.alpha == 1.0 && p.beta == 0.0)
        return 1.0 / (kPi * (1.0 + x * x));
    if (x >= 0.0) return density_nonneg(p, x, opt);
    return density_nonneg(p.dual(), -x, opt);
}

double stable_density_at_zero(const StableParams& p) {
    if (p.alpha == 2.0) return 1.0 / kSqrt2Pi;
    return std::tgamma(1.0 + 1.0 / p.alpha) * std::sin(kPi * p.rho) / kPi;
}

double stable_tail_upper(const StableParams& p, double x, const QuadOptions& opt) {
    validate(p);
    if (p.alpha == 2.0) return 0.5 * std::erfc(x / std::sqrt(2.0));
    if (p.alpha == 1.0 && p.beta == 0.0) return 0.5 - std::atan(x) / kPi;
    if (x >= 0.0) return tail_nonneg(p, x, opt);
    return 1.0 - tail_nonneg(p.dual(), -x, opt);
}

double stable_cdf(const StableParams& p, double x, const QuadOptions& opt) {
    return 1.0 - stable_tail_upper(p, x, opt);
}

double sample_stable(const StableParams& p, RngStream& rng) {
    const double v = kPi * (rng.uniform01() - 0.5);
    const double w = rng.exp1();
    if (p.alpha == 1.0) return std::tan(v); // symmetric Cauchy (beta = 0 enforced)

    const double shift = kPi * (p.rho - 0.5);
    const double a_vb = p.alpha * (v + shift);
    const double y = std::sin(a_vb) / std::pow(std::cos(v), 1.0 / p.alpha) *
                     std::pow(std::cos(v - a_vb) / w, (1.0 - p.alpha) / p.alpha);
    // alpha = 2 reduces to 2 sin(v) sqrt(w) ~ normal(0,2); unit scale is
    // normal(0,1).
    return p.alpha == 2.0 ? y / std::sqrt(2.0) : y;
}

double positive_stable_density(double eta, double u, const QuadOptions& opt) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("one-sided stable index must lie in (0, 1)");
    if (!(u > 0.0)) return 0.0;

    const double q = eta / (1.0 - eta);
    const double t = std::pow(u, -q); // concentration parameter of the kernel
    // A(phi) explodes like (pi - phi)^{-1/(1-eta)} at the right endpoint, so
    // integrate in y with phi = pi (1 - e^{-y}); the kernel then has an O(1)
    // width wherever its peak sits.
    auto integrand = [&](double y) {
        const double z = kPi * std::exp(-y); // pi - phi
        const double phi = kPi - z;
        if (phi <= 0.0) return 0.0;
        const double a = std::pow(std::sin(eta * phi), q) *
                         std::sin((1.0 - eta) * phi) /
                         std::pow(std::sin(phi), 1.0 + q);
        const double val = a * std::exp(-a * t);
        return val * z; // d(phi) = z dy
    };
    const QuadResult r = integrate_to_inf(integrand, 0.0, opt);
    // prefactor eta/(1-eta) * u^{-1/(1-eta)} = q * u^{-(1+q)}
    return q * std::pow(u, -(1.0 + q)) * r.value / kPi;
}

double levy_coeff_pos(const StableParams& p) {
    if (p.alpha == 2.0) return 0.0;
    return std::tgamma(1.0 + p.alpha) * std::sin(kPi * p.alpha * p.rho) / kPi;
}

double levy_coeff_neg(const StableParams& p) {
    if (p.alpha == 2.0) return 0.0;
    return std::tgamma(1.0 + p.alpha) * std::sin(kPi * p.alpha * (1.0 - p.rho)) / kPi;
}

} // namespace levyfp
