#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "quadrature.hpp"
#include "specfun.hpp"

/// Terminal law of the variance driver dY = xi Y^p dB sampled at time t:
/// density, atom at the origin, and moments.
namespace cevsmile::cev {

using quadrature::QuadratureConfig;

enum class BoundaryBehaviour { Absorbing, Reflecting };

/// Model parameters. Immutable after construction; construction validates
/// the (p, boundary) admissibility rules:
///   - Reflecting is only available for p < 1/2,
///   - for p in [1/2, 1) the origin is naturally absorbing,
///   - for p >= 1 the origin is unreachable and the flag is ignored.
/// p within 1e-10 of 1 is snapped to exactly 1 to keep eta = 1/(2(p-1))
/// away from its singularity.
struct CevModel {
    double y0;
    double xi;
    double t;
    double p;
    BoundaryBehaviour boundary;

    CevModel(double y0_, double xi_, double t_, double p_,
             BoundaryBehaviour boundary_ = BoundaryBehaviour::Absorbing)
        : y0(y0_), xi(xi_), t(t_), p(p_), boundary(boundary_) {
        if (!(y0 > 0.0) || !(xi > 0.0) || !(t > 0.0))
            throw std::invalid_argument("CevModel: y0, xi, t must be positive");
        if (!std::isfinite(p))
            throw std::invalid_argument("CevModel: p must be finite");
        if (std::abs(p - 1.0) <= 1e-10) p = 1.0;
        if (boundary == BoundaryBehaviour::Reflecting && p >= 0.5 && p < 1.0)
            throw std::invalid_argument(
                "CevModel: reflecting boundary is only admissible for p < 1/2");
        if (p >= 1.0) boundary = BoundaryBehaviour::Absorbing;
    }

    bool lognormal() const { return p == 1.0; }
    double eta() const { return 1.0 / (2.0 * (p - 1.0)); }
    double mu() const { return std::log(y0) - 0.5 * xi * xi * t; }
    bool reflecting() const { return boundary == BoundaryBehaviour::Reflecting; }
    /// true when the law carries positive mass at Y = 0
    bool has_atom() const { return p < 1.0 && boundary == BoundaryBehaviour::Absorbing; }
};

/// eta = 1/(2(p-1)) and mu = log(y0) - xi^2 t / 2 (p = 1 only uses mu).
struct CevConstants {
    double eta;
    double mu;
};

inline CevConstants constants(const CevModel& m) {
    return {m.lognormal() ? std::numeric_limits<double>::quiet_NaN() : m.eta(), m.mu()};
}

/// P(Y_t = 0). Zero unless the boundary is attainable and absorbing.
inline double mass_at_zero(const CevModel& m) {
    if (!m.has_atom()) return 0.0;
    const double om = 1.0 - m.p;
    const double arg = std::pow(m.y0, 2.0 * om) / (2.0 * m.xi * m.xi * om * om * m.t);
    return 1.0 - specfun::lower_gamma_reg(-m.eta(), arg);
}

/// log zeta_p(y). Routed through the log-scaled Bessel series so no
/// intermediate can overflow; finite wherever the density is positive.
inline double log_density(const CevModel& m, double y) {
    if (!(y > 0.0))
        throw std::domain_error("log_density: y must be positive");
    if (m.lognormal()) {
        const double z = std::log(y) - m.mu();
        return -std::log(y * m.xi * std::sqrt(2.0 * specfun::pi * m.t))
               - z * z / (2.0 * m.xi * m.xi * m.t);
    }
    const double om = 1.0 - m.p;
    const double s2 = m.xi * m.xi * m.t * om * om;
    const double nu = (m.p > 1.0 || m.reflecting()) ? m.eta() : -m.eta();
    const double ly = std::log(y), ly0 = std::log(m.y0);
    const double a = std::exp(2.0 * om * ly);   // y^{2(1-p)}
    const double b = std::exp(2.0 * om * ly0);  // y0^{2(1-p)}
    const double arg = std::exp(om * (ly + ly0)) / s2;
    return 0.5 * ly0 + (0.5 - 2.0 * m.p) * ly
           - std::log(std::abs(om) * m.xi * m.xi * m.t)
           - (a + b) / (2.0 * s2) + specfun::log_bessel_i(nu, arg);
}

inline double density(const CevModel& m, double y) { return std::exp(log_density(m, y)); }

/// Moment result: E(V^r) or the "infinite moment" signal.
struct MomentResult {
    double value;
    bool infinite;
};

namespace detail {

/// largest step-scan + bisection cut: walks from u_start in `dir` until
/// g(u) < target, then bisects the bracket; g must be eventually decreasing
/// in that direction.
template <class G>
double find_cut(G&& g, double u_start, int dir, double target) {
    double u0 = u_start, u1 = u_start, step = 1.0;
    for (int i = 0; i < 200; ++i) {
        u1 = u0 + dir * step;
        if (g(u1) < target) break;
        u0 = u1;
        step *= 1.6;
        if (i == 199)
            throw std::runtime_error("find_cut: integrand tail does not settle");
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (u0 + u1);
        (g(mid) < target ? u1 : u0) = mid;
    }
    return dir > 0 ? u1 : u0;  // on the small side of the bracket
}

/// breakpoints in u = log y for integrals of y^r zeta(y) dy; `log_scale` is a
/// rough log of the integrand's magnitude near its bulk, used to place the
/// truncation targets relative to the result size.
inline std::vector<double> weighted_density_grid(const CevModel& m, double r,
                                                 double tail_tol) {
    auto g = [&](double u) { return (r + 1.0) * u + log_density(m, std::exp(u)); };
    const double u0 = std::log(m.y0);
    // centre the grid on the bulk of y^{r+1} zeta(e^u)
    double upk = u0, vpk = g(u0);
    for (double u = u0 - 3.0; u <= u0 + 3.0; u += 0.25) {
        const double v = g(u);
        if (v > vpk) { vpk = v; upk = u; }
    }
    const double target = vpk + std::log(tail_tol) - 6.0;
    const double lo = find_cut(g, upk, -1, target);
    const double hi = find_cut(g, upk, +1, target);
    std::vector<double> pts{lo};
    for (double f : {0.75, 0.25})
        pts.push_back(f * lo + (1.0 - f) * upk);
    pts.push_back(upk);
    for (double f : {0.25, 0.75})
        pts.push_back((1.0 - f) * upk + f * hi);
    pts.push_back(hi);
    return pts;
}

} // namespace detail

/// E(V^r) by adaptive quadrature of y^r zeta_p(y) in log coordinates plus the
/// atom's contribution. Signals infinity when the atom makes a negative
/// moment diverge or when the p > 1 power tail does.
inline MomentResult moment(const CevModel& m, double r,
                           const QuadratureConfig& cfg = {}) {
    if (r == 0.0) return {1.0, false};
    if (r < 0.0 && mass_at_zero(m) > 0.0)
        return {std::numeric_limits<double>::infinity(), true};
    if (m.p > 1.0 && r >= 2.0 * m.p - 1.0)
        return {std::numeric_limits<double>::infinity(), true};
    if (r < 0.0 && !m.lognormal()) {
        // small-y law zeta ~ y^{-2p} (reflecting) or y^{1-2p} (absorbing, p<1)
        const double small_y_power = m.reflecting() ? -2.0 * m.p : 1.0 - 2.0 * m.p;
        if (m.p < 1.0 && r + small_y_power <= -1.0)
            return {std::numeric_limits<double>::infinity(), true};
    }
    const auto pts = detail::weighted_density_grid(m, r, cfg.tail_mass_tol);
    auto f = [&](double u) {
        return std::exp((r + 1.0) * u + log_density(m, std::exp(u)));
    };
    return {quadrature::integrate(f, pts, cfg).value, false};
}

} // namespace cevsmile::cev
