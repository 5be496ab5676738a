#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "specfun.hpp"

/// Black-Scholes kernel in the (log-moneyness k, variance rate w, maturity tau)
/// parameterisation: price, partials, small/large-maturity expansions and the
/// implied-volatility inversion.
///
/// Prices are always assembled as intrinsic + excess, where the excess
/// (price minus intrinsic) is computed on its own, in log space when the
/// wings make the direct N(d+) - e^k N(d-) difference cancel. The two normal
/// tails are combined through the scaled complementary error function and the
/// exact identity d_-^2/2 - k = d_+^2/2, so the excess keeps full relative
/// accuracy down to the smallest representable magnitudes.
namespace cevsmile::bs {

struct BsQuote {
    double k;
    double w;
    double tau;
};

inline double intrinsic(double k) { return k < 0.0 ? -std::expm1(k) : 0.0; }

namespace detail {

/// log of the out-of-the-money call price E(kappa, w, tau) for kappa >= 0.
inline double log_otm_call(double kappa, double w, double tau) {
    if (w <= 0.0) return -std::numeric_limits<double>::infinity();
    const double s = std::sqrt(w * tau);
    if (kappa == 0.0)
        return std::log(specfun::erf(s * 0.5 * specfun::inv_sqrt_two));
    const double dp = -kappa / s + 0.5 * s;
    const double dm = dp - s;
    if (dp > -8.0) {
        const double v = specfun::norm_cdf(dp) - std::exp(kappa) * specfun::norm_cdf(dm);
        return std::log(v);
    }
    // both tails tiny: N(d+) (1 - e^kappa N(d-)/N(d+)) with the ratio formed
    // from erfcx so the d^2/2 terms cancel exactly
    const double rp = specfun::erfcx(-dp * specfun::inv_sqrt_two);
    const double rm = specfun::erfcx(-dm * specfun::inv_sqrt_two);
    const double log_np = -0.5 * dp * dp + std::log(0.5 * rp);
    const double delta = std::log(rm) - std::log(rp);  // = kappa + log N(d-) - log N(d+)
    return log_np + std::log(-std::expm1(delta));
}

} // namespace detail

/// log(bs_call - intrinsic); finite for all w > 0, -inf at w = 0.
inline double log_call_excess(double k, double w, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("log_call_excess: tau must be positive");
    if (w < 0.0) throw std::domain_error("log_call_excess: w must be non-negative");
    const double base = detail::log_otm_call(std::abs(k), w, tau);
    return k < 0.0 ? k + base : base;
}

/// Call price N(-k/sqrt(w tau) + sqrt(w tau)/2) - e^k N(-k/sqrt(w tau) - sqrt(w tau)/2),
/// continuous down to w = 0 where it equals the intrinsic value (1 - e^k)^+.
inline double bs_call(double k, double w, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("bs_call: tau must be positive");
    if (w < 0.0) throw std::domain_error("bs_call: w must be non-negative");
    if (w == 0.0) return intrinsic(k);
    return intrinsic(k) + std::exp(log_call_excess(k, w, tau));
}

/// First and second partials in (k, w).
struct Partials {
    double dk;
    double dw;
    double dkk;
    double dkw;
    double dww;
};

inline Partials bs_partials(double k, double w, double tau) {
    if (!(w > 0.0)) throw std::domain_error("bs_partials: w must be positive");
    if (!(tau > 0.0)) throw std::domain_error("bs_partials: tau must be positive");
    const double s = std::sqrt(w * tau);
    const double dp = -k / s + 0.5 * s;
    const double dm = dp - s;
    const double pdf = specfun::norm_pdf(dp);  // equals e^k phi(d-)
    const double dk = -std::exp(k) * specfun::norm_cdf(dm);
    const double dw = pdf * std::sqrt(tau) / (2.0 * std::sqrt(w));
    const double dkk = dk + pdf / s;
    const double ddm_dw = k * tau / (2.0 * s * s * s) - tau / (4.0 * s);
    const double ddp_dw = k * tau / (2.0 * s * s * s) + tau / (4.0 * s);
    const double dkw = -pdf * ddm_dw;
    const double dww = 0.5 * pdf * std::sqrt(tau)
                       * (-dp * ddp_dw / std::sqrt(w) - 0.5 / (w * std::sqrt(w)));
    return {dk, dw, dkk, dkw, dww};
}

/// Leading small-maturity term of BS(k, y/ttau, tau) for k, y > 0:
/// (y^{3/2} / (k^2 sqrt(2 pi))) (tau/ttau)^{3/2} exp(-k^2 ttau/(2 y tau) + k/2).
/// Relative error O(tau/ttau).
inline double bs_small_time(double k, double y, double ttau, double tau) {
    if (!(k > 0.0) || !(y > 0.0) || !(ttau > 0.0) || !(tau > 0.0))
        throw std::domain_error("bs_small_time: k, y, ttau, tau must be positive");
    const double r = tau / ttau;
    return std::pow(y, 1.5) / (k * k * specfun::sqrt_two_pi) * std::pow(r, 1.5)
           * std::exp(-k * k / (2.0 * y * r) + 0.5 * k);
}

/// Leading large-maturity expansion 1 - 4/sqrt(2 pi tau y) exp(-y tau/8 + k/2);
/// relative error O(1/tau) on the correction term.
inline double bs_large_time(double k, double y, double tau) {
    if (!(y > 0.0)) throw std::domain_error("bs_large_time: y must be positive");
    return 1.0 - 4.0 / (specfun::sqrt_two_pi * std::sqrt(tau * y))
                     * std::exp(-y * tau / 8.0 + 0.5 * k);
}

namespace detail {

inline double solve_vol_from_log_excess(double log_excess, double k, double tau) {
    if (log_excess == -std::numeric_limits<double>::infinity()) return 0.0;
    auto g = [&](double sigma) { return log_call_excess(k, sigma * sigma, tau) - log_excess; };
    double lo = 1e-12, hi = 1.0;
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e6)
            throw std::domain_error("implied_vol: price not attainable below bracket cap");
    }
    if (g(lo) > 0.0) return 0.0;  // below resolvable excess
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Unique sigma >= 0 with bs_call(k, sigma^2, tau) = price, to 1e-10 absolute.
/// Throws on a no-arbitrage violation (price outside [(1-e^k)^+, 1)).
inline double implied_vol(double price, double k, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("implied_vol: tau must be positive");
    const double floor = intrinsic(k);
    if (price < floor || price >= 1.0 || std::isnan(price))
        throw std::domain_error("implied_vol: no-arbitrage violation");
    if (price == floor) return 0.0;
    return detail::solve_vol_from_log_excess(std::log(price - floor), k, tau);
}

/// Inversion fed by log(price - intrinsic) directly, for magnitudes far below
/// what a plain price double can carry.
inline double implied_vol_from_log_excess(double log_excess, double k, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("implied_vol: tau must be positive");
    return detail::solve_vol_from_log_excess(log_excess, k, tau);
}

} // namespace cevsmile::bs
