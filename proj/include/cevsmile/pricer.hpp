#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "black_scholes.hpp"
#include "cev_distribution.hpp"
#include "quadrature.hpp"

/// Mixture pricing against the CEV terminal law: the option price is the
/// Black-Scholes price averaged over the variance draw plus the atom's
/// intrinsic contribution.
///
/// Every call price is assembled as intrinsic + excess. The excess integrand
/// bs-excess(k, y, tau) * zeta(y) is integrated in log-variance coordinates
/// after normalising by its peak value, so prices whose excess is far below
/// the smallest normal double (deep wings, tau -> 0) are still produced with
/// full relative accuracy through their logarithm. The atom never contributes
/// to the excess: its payoff is exactly intrinsic.
namespace cevsmile::pricer {

using cev::CevModel;
using quadrature::QuadratureConfig;

struct SmilePoint {
    double k;
    double tau;
    double price;
    double implied_vol;
};

namespace detail {

/// peak location and value of a smooth unimodal-ish g over a coarse grid,
/// refined by ternary search
template <class G>
std::pair<double, double> locate_peak(G&& g, double u_center, double half_width) {
    double upk = u_center, vpk = g(u_center);
    for (double u = u_center - half_width; u <= u_center + half_width; u += 1.0) {
        const double v = g(u);
        if (v > vpk) { vpk = v; upk = u; }
    }
    double a = upk - 1.0, b = upk + 1.0;
    for (int i = 0; i < 80; ++i) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (g(m1) < g(m2)) a = m1; else b = m2;
    }
    const double u = 0.5 * (a + b);
    return {u, g(u)};
}

/// integrate exp(g(u)) du and return the log of the result
template <class G>
double log_integrate(G&& g, double upk, double gpk, const QuadratureConfig& cfg) {
    const double target = gpk - 46.0;
    const double lo = cev::detail::find_cut(g, upk, -1, target);
    const double hi = cev::detail::find_cut(g, upk, +1, target);
    std::vector<double> pts;
    for (double f : {0.0, 0.7, 0.92, 1.0, 1.08, 1.3, 2.0}) {
        const double u = f <= 1.0 ? lo + f * (upk - lo) : upk + (f - 1.0) * (hi - upk);
        if (pts.empty() || u > pts.back()) pts.push_back(u);
    }
    auto f = [&](double u) { return std::exp(g(u) - gpk); };
    const auto r = quadrature::integrate(f, pts, cfg);
    return gpk + std::log(r.value);
}

} // namespace detail

/// log of (call price - intrinsic). Finite deep into the small-maturity and
/// wing regimes where the price itself would underflow.
inline double call_excess_log(const CevModel& m, double k, double tau,
                              const QuadratureConfig& cfg = {}) {
    if (!(tau > 0.0)) throw std::domain_error("call_excess_log: tau must be positive");
    auto g = [&](double u) {
        return u + bs::log_call_excess(k, std::exp(u), tau) + cev::log_density(m, std::exp(u));
    };
    // the integrand peak moves like the proofs' rescaled variance: it stays
    // within a generous log window around y0 for every regime we price
    auto [upk, gpk] = detail::locate_peak(g, std::log(m.y0), 45.0);
    return detail::log_integrate(g, upk, gpk, cfg);
}

/// European call, mixture of BS prices over the variance law plus the atom.
inline double call_price(const CevModel& m, double k, double tau,
                         const QuadratureConfig& cfg = {}) {
    return bs::intrinsic(k) + std::exp(call_excess_log(m, k, tau, cfg));
}

/// European put by parity; equals the call excess for k < 0.
inline double put_price(const CevModel& m, double k, double tau,
                        const QuadratureConfig& cfg = {}) {
    const double put_intrinsic = k > 0.0 ? std::expm1(k) : 0.0;
    return put_intrinsic + std::exp(call_excess_log(m, k, tau, cfg));
}

/// P(Z_tau <= k) = int N((k + y tau/2)/sqrt(y tau)) zeta(y) dy + m_t 1{k>=0}.
inline double digital_price(const CevModel& m, double k, double tau,
                            const QuadratureConfig& cfg = {}) {
    if (!(tau > 0.0)) throw std::domain_error("digital_price: tau must be positive");
    const auto pts = cev::detail::weighted_density_grid(m, 0.0, cfg.tail_mass_tol);
    auto f = [&](double u) {
        const double y = std::exp(u);
        const double z = (k + 0.5 * y * tau) / std::sqrt(y * tau);
        return specfun::norm_cdf(z) * std::exp(u + cev::log_density(m, y));
    };
    const double atom = k >= 0.0 ? cev::mass_at_zero(m) : 0.0;
    return quadrature::integrate(f, pts, cfg).value + atom;
}

/// Price smile over a strike grid; input order preserved. Per-point failures
/// are rethrown with the offending index attached.
inline std::vector<SmilePoint> smile(const CevModel& m, const std::vector<double>& ks,
                                     double tau, const QuadratureConfig& cfg = {}) {
    std::vector<SmilePoint> out;
    out.reserve(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        try {
            const double le = call_excess_log(m, ks[i], tau, cfg);
            const double price = bs::intrinsic(ks[i]) + std::exp(le);
            const double vol = bs::implied_vol_from_log_excess(le, ks[i], tau);
            out.push_back({ks[i], tau, price, vol});
        } catch (const std::exception& e) {
            throw std::runtime_error("smile: point " + std::to_string(i) + " (k="
                                     + std::to_string(ks[i]) + "): " + e.what());
        }
    }
    return out;
}

/// d/dk and d^2/dk^2 of the call price, with one-sided values at k = 0 where
/// the atom's intrinsic payoff has a kink.
struct SkewConvexity {
    double dk_left;
    double dk_right;
    double dkk_left;
    double dkk_right;
};

inline SkewConvexity skew_convexity_integrals(const CevModel& m, double k, double tau,
                                              const QuadratureConfig& cfg = {}) {
    if (!(tau > 0.0)) throw std::domain_error("skew_convexity_integrals: tau must be positive");
    const auto pts = cev::detail::weighted_density_grid(m, 0.0, cfg.tail_mass_tol);
    auto fk = [&](double u) {
        const double y = std::exp(u);
        return bs::bs_partials(k, y, tau).dk * std::exp(u + cev::log_density(m, y));
    };
    auto fkk = [&](double u) {
        const double y = std::exp(u);
        return bs::bs_partials(k, y, tau).dkk * std::exp(u + cev::log_density(m, y));
    };
    const double ik = quadrature::integrate(fk, pts, cfg).value;
    const double ikk = quadrature::integrate(fkk, pts, cfg).value;
    const double mt = cev::mass_at_zero(m);
    // d/dk (1 - e^k)^+ is -e^k below zero and 0 above; both one-sided second
    // derivatives at 0 match the first-derivative jump convention of the
    // intrinsic payoff
    double atom_dk_l, atom_dk_r, atom_dkk_l, atom_dkk_r;
    if (k < 0.0) {
        atom_dk_l = atom_dk_r = -std::exp(k);
        atom_dkk_l = atom_dkk_r = -std::exp(k);
    } else if (k > 0.0) {
        atom_dk_l = atom_dk_r = 0.0;
        atom_dkk_l = atom_dkk_r = 0.0;
    } else {
        atom_dk_l = -1.0; atom_dk_r = 0.0;
        atom_dkk_l = -1.0; atom_dkk_r = 0.0;
    }
    return {ik + mt * atom_dk_l, ik + mt * atom_dk_r,
            ikk + mt * atom_dkk_l, ikk + mt * atom_dkk_r};
}

/// Ratio of delta-weighted mixture vegas hedging a tau-call with a T-call:
/// theta = int N(d+(k - log S, y, tau)) sqrt(y) zeta / same integral at T.
inline double hedge_ratio(const CevModel& m, double spot, double k, double tau,
                          double T, const QuadratureConfig& cfg = {}) {
    if (!(spot > 0.0)) throw std::domain_error("hedge_ratio: spot must be positive");
    if (!(T >= tau) || !(tau > 0.0))
        throw std::domain_error("hedge_ratio: need T >= tau > 0");
    const double keff = k - std::log(spot);
    const auto pts = cev::detail::weighted_density_grid(m, 0.5, cfg.tail_mass_tol);
    auto delta_integral = [&](double mat) {
        auto f = [&](double u) {
            const double y = std::exp(u);
            const double s = std::sqrt(y * mat);
            const double dplus = -keff / s + 0.5 * s;
            return specfun::norm_cdf(dplus) * std::exp(1.5 * u + cev::log_density(m, y));
        };
        return quadrature::integrate(f, pts, cfg).value;
    };
    const double num = delta_integral(tau);
    const double den = delta_integral(T);
    if (!(den > 0.0) || !std::isfinite(den))
        throw std::runtime_error("hedge_ratio: degenerate denominator");
    return num / den;
}

} // namespace cevsmile::pricer
