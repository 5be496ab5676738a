#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "black_scholes.hpp"
#include "cev_distribution.hpp"
#include "pricer.hpp"

/// Closed-form small- and large-maturity expansions of the mixture price and
/// its implied volatility, and the associated large-deviations speed/rate
/// evaluators. Everything is regime-dispatched on the variance exponent p
/// (p < 1, p = 1, p > 1); the regimes do not interpolate across p = 1.
namespace cevsmile::asymptotics {

using cev::CevModel;
using quadrature::QuadratureConfig;

struct RegimeNotSupported : std::domain_error {
    using std::domain_error::domain_error;
};

/// The exponent functions of the small-maturity Laplace analysis.
struct RegimeFunctions {
    std::function<double(double)> f0, f1, g0, g1;
};

inline RegimeFunctions regime_functions(const CevModel& m, double k) {
    const double x2t = m.xi * m.xi * m.t;
    const double om = 1.0 - m.p;
    return {
        [=](double y) { return k * k / (2.0 * y) + std::pow(y, 2.0 * om) / (2.0 * x2t * om * om); },
        [y0 = m.y0, x2t, om](double y) { return std::pow(y * y0, om) / (x2t * om * om); },
        [=](double y) { return k * k / (2.0 * y) + std::log(y) / x2t; },
        [x2t](double y) { return std::log(y) / x2t; },
    };
}

/// One row of the small-maturity constant table for a given (model, k).
struct SmallTimeConstants {
    double p;
    double beta_p = std::numeric_limits<double>::quiet_NaN();   // p < 1 only
    double ybar_p = std::numeric_limits<double>::quiet_NaN();   // p < 1 only
    double y_star = std::numeric_limits<double>::quiet_NaN();   // p = 1 only
    double c1, c2, c3, c4, c5;
    std::string remainder_order;

    double h1(double tau) const {
        if (p < 1.0) return std::pow(tau, beta_p - 1.0);
        if (p == 1.0) {
            const double l = std::log(tau) + std::log(std::log(1.0 / tau));
            return l * l;
        }
        return 0.0;
    }
    double h2(double tau) const {
        if (p < 1.0) return std::pow(tau, 0.5 * (beta_p - 1.0));
        if (p == 1.0) {
            const double ll = std::log(std::abs(std::log(tau)));
            return ll * ll / std::abs(std::log(tau));
        }
        return 0.0;
    }
};

/// T-invariant wing integral of the rescaled BS excess against y^{-power},
/// for power > 1 and k != 0. Results are cached per (power, k, T).
inline double jp_integral(double power, double k, double T = 1.0,
                          const QuadratureConfig& cfg = {}) {
    if (!(power > 1.0)) throw std::domain_error("jp_integral: power must exceed 1");
    if (k == 0.0) throw std::domain_error("jp_integral: k must be nonzero");
    if (!(T > 0.0)) throw std::domain_error("jp_integral: T must be positive");

    static std::map<std::tuple<double, double, double>, double> cache;
    static std::mutex cache_mutex;
    {
        std::lock_guard<std::mutex> lk(cache_mutex);
        auto it = cache.find({power, k, T});
        if (it != cache.end()) return it->second;
    }
    // for k < 0 the put-form integrand e^k - 1 + BS equals the call excess
    auto g = [&](double u) {
        return (1.0 - power) * u + bs::log_call_excess(k, std::exp(u) / T, T);
    };
    auto [upk, gpk] = pricer::detail::locate_peak(g, std::log(std::max(k * k, 1e-4)), 30.0);
    const double value = std::exp(pricer::detail::log_integrate(g, upk, gpk, cfg));
    std::lock_guard<std::mutex> lk(cache_mutex);
    cache.insert({{power, k, T}, value});
    return value;
}

namespace detail {

inline double f0_second(const CevModel& m, double k, double y) {
    const double om = 1.0 - m.p;
    const double x2t = m.xi * m.xi * m.t;
    return k * k / (y * y * y)
           + 2.0 * om * (2.0 * om - 1.0) * std::pow(y, 2.0 * om - 2.0) / (2.0 * x2t * om * om);
}

inline double f1_prime(const CevModel& m, double y) {
    const double om = 1.0 - m.p;
    const double x2t = m.xi * m.xi * m.t;
    return om * std::pow(m.y0, om) * std::pow(y, om - 1.0) / (x2t * om * om);
}

inline double g0_second(const CevModel& m, double k, double y) {
    const double x2t = m.xi * m.xi * m.t;
    return k * k / (y * y * y) - 1.0 / (y * y * x2t);
}

/// the two printed forms of the lognormal-case prefactor; algebraically equal
inline double lognormal_prefactor_general(const CevModel& m, double k) {
    const double x2t = m.xi * m.xi * m.t;
    const double ystar = k * k * x2t / 2.0;
    const double mu = m.mu();
    const double g0pp = 4.0 / (std::pow(m.xi, 6.0) * std::pow(m.t, 3.0) * std::pow(k, 4.0));
    return std::sqrt(ystar)
           * std::exp(0.5 * k - mu * mu / (2.0 * x2t) + mu * std::log(ystar) / x2t)
           / (k * k * m.xi * std::sqrt(2.0 * specfun::pi * m.t) * std::sqrt(g0pp));
}

inline double lognormal_prefactor_simplified(const CevModel& m, double k) {
    const double x2t = m.xi * m.xi * m.t;
    const double ystar = k * k * x2t / 2.0;
    const double mu = m.mu();
    return std::abs(k) * std::pow(m.xi, 3.0) * std::pow(m.t, 1.5)
           * std::exp(0.5 * k - mu * mu / (2.0 * x2t) + mu * std::log(ystar) / x2t)
           / (4.0 * std::sqrt(specfun::pi));
}

} // namespace detail

/// Constants of the small-maturity expansion for k != 0.
///
/// The p = 1 prefactor carries the Gaussian weight exp(-(log y*)^2/(2 xi^2 t))
/// of the lognormal density at the Laplace point; without it the expansion's
/// constant is off by that factor and the price ratio does not converge to
/// one (checked against high-precision quadrature of the mixture integral).
inline SmallTimeConstants small_time_constants(const CevModel& m, double k,
                                               const QuadratureConfig& cfg = {}) {
    if (k == 0.0)
        throw std::domain_error("small_time_constants: k must be nonzero (ATM has its own limit)");
    const double x2t = m.xi * m.xi * m.t;
    SmallTimeConstants c;
    c.p = m.p;
    const auto fn = regime_functions(m, k);
    if (m.p < 1.0) {
        const double om = 1.0 - m.p;
        c.beta_p = 1.0 / (3.0 - 2.0 * m.p);
        c.ybar_p = std::pow(k * k * x2t * om / 2.0, c.beta_p);
        c.c1 = fn.f0(c.ybar_p);
        c.c2 = fn.f1(c.ybar_p);
        c.c3 = (6.0 - 5.0 * m.p) / (6.0 - 4.0 * m.p);
        c.c4 = 0.0;
        const double f0pp = detail::f0_second(m, k, c.ybar_p);
        const double f1p = detail::f1_prime(m, c.ybar_p);
        c.c5 = std::pow(m.y0, m.p / 2.0) * std::pow(c.ybar_p, 1.5 * om)
               * std::exp(0.5 * k - std::pow(m.y0, 2.0 * om) / (2.0 * x2t * om * om)
                          + f1p * f1p / (2.0 * f0pp))
               / (k * k * m.xi * std::sqrt(2.0 * specfun::pi * f0pp * m.t));
        c.remainder_order = "O(tau^{(1-beta_p)/2})";
    } else if (m.p == 1.0) {
        c.y_star = k * k * x2t / 2.0;
        c.c1 = c.c2 = 1.0 / (2.0 * x2t);
        c.c3 = fn.g0(c.y_star) - m.mu() / x2t;
        c.c4 = fn.g1(c.y_star) - m.mu() / x2t - 2.0;
        const double lys = std::log(c.y_star);
        c.c5 = detail::lognormal_prefactor_simplified(m, k)
               * std::exp(-lys * lys / (2.0 * x2t));
        c.remainder_order = "O(1/|log tau|)";
    } else {
        const double om = 1.0 - m.p;
        const double eta = m.eta();
        c.c1 = c.c2 = c.c4 = 0.0;
        c.c3 = 2.0 * m.p - 1.0;
        c.c5 = 2.0 * (m.p - 1.0)
               * std::exp(-std::pow(m.y0, 2.0 * om) / (2.0 * x2t * om * om))
               * jp_integral(2.0 * m.p, k, 1.0, cfg)
               / (std::pow(2.0 * om * om * x2t, eta + 1.0) * std::tgamma(eta + 1.0));
        c.remainder_order = "O(tau^{p-1})";
    }
    return c;
}

/// log of the small-maturity excess asymptote
/// exp(-c1 h1 + c2 h2) tau^{c3} |log tau|^{c4} c5.
inline double small_tau_excess_log(const CevModel& m, double k, double tau,
                                   const QuadratureConfig& cfg = {}) {
    if (!(tau > 0.0) || tau >= 1.0)
        throw std::domain_error("small_tau_excess_log: need tau in (0,1)");
    const auto c = small_time_constants(m, k, cfg);
    return -c.c1 * c.h1(tau) + c.c2 * c.h2(tau) + c.c3 * std::log(tau)
           + c.c4 * std::log(std::abs(std::log(tau))) + std::log(c.c5);
}

/// Small-maturity asymptotic price (1 - e^k)^+ + excess asymptote.
inline double call_small_tau(const CevModel& m, double k, double tau,
                             const QuadratureConfig& cfg = {}) {
    return bs::intrinsic(k) + std::exp(small_tau_excess_log(m, k, tau, cfg));
}

/// Leading small-maturity implied variance:
///   p < 1 : (1-beta_p) (k^2 xi^2 t (1-p) / (2 tau))^{beta_p}
///   p = 1 : k^2 xi^2 t / (tau log(tau)^2)
///   p > 1 : k^2 / (2 (2p-1) tau |log tau|)
inline double implied_var_small_tau(const CevModel& m, double k, double tau) {
    if (k == 0.0) throw std::domain_error("implied_var_small_tau: k must be nonzero");
    if (!(tau > 0.0)) throw std::domain_error("implied_var_small_tau: tau must be positive");
    const double x2t = m.xi * m.xi * m.t;
    if (m.p < 1.0) {
        const double beta = 1.0 / (3.0 - 2.0 * m.p);
        return (1.0 - beta) * std::pow(k * k * x2t * (1.0 - m.p) / (2.0 * tau), beta);
    }
    if (m.p == 1.0) {
        const double l = std::log(tau);
        return k * k * x2t / (tau * l * l);
    }
    return k * k / (2.0 * (2.0 * m.p - 1.0) * tau * std::abs(std::log(tau)));
}

/// Limit of the ATM implied volatility as tau -> 0: E(sqrt(V)).
inline double atm_level(const CevModel& m, const QuadratureConfig& cfg = {}) {
    const auto r = cev::moment(m, 0.5, cfg);
    if (r.infinite) throw std::runtime_error("atm_level: E(sqrt(V)) is infinite");
    return r.value;
}

/// Small-maturity ATM skew and convexity asymptotes (one-sided in k).
/// Terms whose moments diverge are reported as infinite rather than guessed.
struct AtmSkewConvexity {
    double dk_left;
    double dk_right;
    double dkk;
    bool skew_infinite;
    bool dkk_infinite;
};

inline AtmSkewConvexity atm_skew_convexity_small_tau(const CevModel& m, double tau,
                                                     const QuadratureConfig& cfg = {}) {
    if (!(tau > 0.0)) throw std::domain_error("atm_skew_convexity: tau must be positive");
    const double mt = cev::mass_at_zero(m);
    if (mt >= 1.0) throw std::domain_error("atm_skew_convexity: degenerate law");
    const auto es = cev::moment(m, 0.5, cfg);
    const auto e32 = cev::moment(m, 1.5, cfg);
    AtmSkewConvexity out{};
    out.skew_infinite = es.infinite || e32.infinite;
    if (out.skew_infinite) {
        out.dk_left = -std::numeric_limits<double>::infinity();
        out.dk_right = std::numeric_limits<double>::infinity();
    } else {
        const double tau_term = -es.value / 48.0
                                * (e32.value - std::pow(es.value, 3.0)) * tau;
        const double atom_term = mt * es.value * std::sqrt(specfun::pi)
                                 / std::sqrt(2.0 * tau);
        out.dk_left = tau_term - atom_term;
        out.dk_right = tau_term + atom_term;
    }
    const auto em12 = cev::moment(m, -0.5, cfg);
    out.dkk_infinite = em12.infinite || es.infinite;
    if (out.dkk_infinite) {
        out.dkk = std::numeric_limits<double>::infinity();
    } else {
        out.dkk = es.value / tau
                  * (em12.value - (1.0 - mt * mt * std::sqrt(specfun::pi) / 8.0) / es.value);
    }
    return out;
}

/// Wing constant of the large-maturity expansion.
inline double frak_m(const CevModel& m, double e) {
    const double x2t = m.xi * m.xi * m.t;
    const double om = 1.0 - m.p;
    return std::pow(2.0, 3.0 - 6.0 * m.p - e) * std::tgamma(0.5 - 2.0 * m.p)
           / (std::sqrt(specfun::pi) * std::tgamma(1.0 + e)
              * std::pow(std::abs(om), 2.0 * e + 1.0) * std::pow(x2t, e + 1.0))
           * std::exp(-std::pow(m.y0, 2.0 * om) / (2.0 * x2t * om * om));
}

/// Large-maturity price expansion; defined for (p < 3/4, absorbing) and
/// (p < 1/4, reflecting) only.
inline double call_large_tau(const CevModel& m, double k, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("call_large_tau: tau must be positive");
    const double ek2 = std::exp(0.5 * k);
    if (m.boundary == cev::BoundaryBehaviour::Absorbing && m.p < 0.75) {
        const double mt = cev::mass_at_zero(m);
        return 1.0 - mt + mt * bs::intrinsic(k)
               - 8.0 * ek2 * m.y0 * (0.5 - 2.0 * m.p) * frak_m(m, -m.eta())
                     * std::pow(tau, -(2.0 - 2.0 * m.p));
    }
    if (m.reflecting() && m.p < 0.25)
        return 1.0 - ek2 * frak_m(m, m.eta()) * std::pow(tau, -(1.0 - 2.0 * m.p));
    throw RegimeNotSupported("call_large_tau: expansion only covers p<3/4 absorbing "
                             "or p<1/4 reflecting");
}

/// Large-maturity implied variance 8(1-2p) log(tau)/tau (p < 1/4, reflecting).
inline double implied_var_large_tau(const CevModel& m, double k, double tau) {
    (void)k;  // leading order is strike-independent
    if (!(m.reflecting() && m.p < 0.25))
        throw RegimeNotSupported("implied_var_large_tau: requires p<1/4 reflecting");
    if (!(tau > 1.0)) throw std::domain_error("implied_var_large_tau: tau must exceed 1");
    return 8.0 * (1.0 - 2.0 * m.p) * std::log(tau) / tau;
}

/// Small-maturity large-deviations speed h*(tau, p) and rate Lambda*_p(k).
struct SpeedRate {
    double speed;
    double rate;
};

inline SpeedRate ldp_speed_rate(const CevModel& m, double k, double tau,
                                const QuadratureConfig& cfg = {}) {
    if (!(tau > 0.0) || tau >= 1.0)
        throw std::domain_error("ldp_speed_rate: need tau in (0,1)");
    SpeedRate out{};
    if (m.p < 1.0) {
        const double beta = 1.0 / (3.0 - 2.0 * m.p);
        out.speed = std::pow(tau, 1.0 - beta);
        out.rate = k == 0.0 ? 0.0 : small_time_constants(m, k, cfg).c1;
    } else if (m.p == 1.0) {
        const double l = std::log(tau);
        out.speed = 1.0 / (l * l);
        out.rate = 1.0 / (2.0 * m.xi * m.xi * m.t);
    } else {
        out.speed = 1.0 / std::abs(std::log(tau));
        out.rate = 2.0 * m.p - 1.0;
    }
    return out;
}

} // namespace cevsmile::asymptotics
