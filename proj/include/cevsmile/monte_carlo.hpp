#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "black_scholes.hpp"
#include "cev_distribution.hpp"

/// Monte-Carlo verification side: exact and Euler samplers for the variance
/// draw, and mixing-based option price estimates. Every path owns a
/// deterministic substream derived from (seed, path index), so estimates are
/// reproducible bit-for-bit and independent of evaluation order.
namespace cevsmile::mc {

using cev::CevModel;

inline const char* rng_algorithm() { return "splitmix64/polar"; }

/// Counter-seeded splitmix64 stream with a polar-method normal generator.
class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
        state_ = mix(state_ ^ 0xBF58476D1CE4E5B9ULL);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double v1, v2, s;
        do {
            v1 = 2.0 * next_double() - 1.0;
            v2 = 2.0 * next_double() - 1.0;
            s = v1 * v1 + v2 * v2;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v2 * f;
        have_spare_ = true;
        return v1 * f;
    }

    /// exact Poisson draw by chunked inversion
    long poisson(double mean) {
        long total = 0;
        while (mean > 0.0) {
            const double chunk = std::min(mean, 40.0);
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double prod = next_double();
            long n = 0;
            while (prod > limit) {
                ++n;
                prod *= next_double();
            }
            total += n;
        }
        return total;
    }

    /// Marsaglia-Tsang gamma with unit scale, shape >= 1
    double gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct McEstimate {
    double value;
    double std_error;
    long n;
    double zero_fraction;
};

enum class Sampler { Exact, Euler };

namespace detail {

/// one exact draw from Law(Y_t) for p = 1/2 absorbing: Y = (xi^2/4) X with X
/// a zero-dimension squared-Bessel value at t, realised as a Poisson-mixed
/// gamma with Poisson mean 2 y0/(xi^2 t) and gamma scale 2t
inline double draw_exact_half(const CevModel& m, std::uint64_t seed, std::uint64_t i) {
    PathRng rng(seed, i);
    const long n = rng.poisson(2.0 * m.y0 / (m.xi * m.xi * m.t));
    if (n == 0) return 0.0;
    const double x = rng.gamma(static_cast<double>(n)) * 2.0 * m.t;
    return 0.25 * m.xi * m.xi * x;
}

struct PowHalf { double operator()(double y) const { return std::sqrt(y); } };
struct PowOne { double operator()(double y) const { return y; } };
struct PowThreeHalves { double operator()(double y) const { return y * std::sqrt(y); } };
struct PowEighth { double operator()(double y) const { return std::sqrt(std::sqrt(std::sqrt(y))); } };
struct PowQuarter { double operator()(double y) const { return std::sqrt(std::sqrt(y)); } };
struct PowZero { double operator()(double) const { return 1.0; } };
struct PowGeneric {
    double p;
    double operator()(double y) const { return std::pow(y, p); }
};

template <class P>
double euler_path(const CevModel& m, int steps, P powp, PathRng& rng) {
    const double dt = m.t / steps;
    const double sdt = std::sqrt(dt);
    const bool absorbing = m.p < 1.0 && !m.reflecting();
    double y = m.y0;
    for (int s = 0; s < steps; ++s) {
        y += m.xi * powp(std::max(y, 0.0)) * sdt * rng.normal();
        if (y <= 0.0) {
            if (absorbing) return 0.0;  // path sticks at the origin
            if (m.reflecting()) y = -y;
            else y = 0.0;  // p >= 1: diffusion already frozen at 0
        }
    }
    return y;
}

inline double draw_euler(const CevModel& m, int steps, std::uint64_t seed, std::uint64_t i) {
    PathRng rng(seed, i);
    if (m.p == 0.5) return euler_path(m, steps, PowHalf{}, rng);
    if (m.p == 1.0) return euler_path(m, steps, PowOne{}, rng);
    if (m.p == 1.5) return euler_path(m, steps, PowThreeHalves{}, rng);
    if (m.p == 0.125) return euler_path(m, steps, PowEighth{}, rng);
    if (m.p == 0.25) return euler_path(m, steps, PowQuarter{}, rng);
    if (m.p == 0.0) return euler_path(m, steps, PowZero{}, rng);
    return euler_path(m, steps, PowGeneric{m.p}, rng);
}

} // namespace detail

/// n exact draws from the p = 1/2 absorbing terminal law. The Poisson-zero
/// branch produces exact zeros, matching the analytic atom.
inline std::vector<double> sample_exact_half(const CevModel& m, long n, std::uint64_t seed) {
    if (m.p != 0.5 || m.reflecting())
        throw std::invalid_argument("sample_exact_half: requires p = 1/2 with absorption");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = detail::draw_exact_half(m, seed, static_cast<std::uint64_t>(i));
    return out;
}

/// n Euler-Maruyama terminal values with full truncation inside the
/// diffusion coefficient; absorbing paths stick at zero, reflecting paths
/// take absolute values after each step.
inline std::vector<double> sample_euler(const CevModel& m, long n, int steps,
                                        std::uint64_t seed) {
    if (steps < 100)
        throw std::invalid_argument("sample_euler: steps must be >= 100");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = detail::draw_euler(m, steps, seed, static_cast<std::uint64_t>(i));
    return out;
}

/// Mixing estimator: the conditional price given the variance draw is exact
/// Black-Scholes, so only the variance is simulated.
inline McEstimate mc_call_price(const CevModel& m, double k, double tau, long n,
                                std::uint64_t seed, Sampler sampler, int steps = 2000) {
    if (!(tau > 0.0)) throw std::domain_error("mc_call_price: tau must be positive");
    if (n <= 1) throw std::invalid_argument("mc_call_price: need n > 1");
    if (sampler == Sampler::Exact && (m.p != 0.5 || m.reflecting()))
        throw std::invalid_argument("mc_call_price: exact sampler requires p = 1/2 absorbing");
    if (sampler == Sampler::Euler && steps < 100)
        throw std::invalid_argument("mc_call_price: steps must be >= 100");
    double mean = 0.0, m2 = 0.0;
    long zeros = 0;
    for (long i = 0; i < n; ++i) {
        const double v = sampler == Sampler::Exact
                             ? detail::draw_exact_half(m, seed, static_cast<std::uint64_t>(i))
                             : detail::draw_euler(m, steps, seed, static_cast<std::uint64_t>(i));
        if (v == 0.0) ++zeros;
        const double payoff = bs::bs_call(k, v, tau);
        const double delta = payoff - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (payoff - mean);
    }
    const double variance = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n)),
            n, static_cast<double>(zeros) / static_cast<double>(n)};
}

/// Two-sample Kolmogorov-Smirnov statistic, used to validate the Euler
/// scheme against the exact sampler where the latter exists.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

/// Euler step count validated (and doubled if needed) against the exact
/// sampler via a KS test at the 1% level; models without an exact sampler
/// keep the requested count.
inline int validated_euler_steps(const CevModel& m, int steps, std::uint64_t seed,
                                 long n_validate = 20000) {
    if (m.p != 0.5 || m.reflecting()) return steps;
    const auto exact = sample_exact_half(m, n_validate, seed + 1);
    const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(n_validate));
    for (int doublings = 0; doublings < 3; ++doublings) {
        const auto euler = sample_euler(m, n_validate, steps, seed + 2);
        if (ks_statistic(exact, euler) < crit) return steps;
        steps *= 2;
    }
    return steps;
}

} // namespace cevsmile::mc
