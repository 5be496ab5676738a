#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

/// Real-order special functions used by the CEV terminal law and the
/// closed-form cumulant generating functions.
///
/// Everything here is evaluated to ~1e-12 relative accuracy or better on the
/// operating range of the model (orders nu > -1, arguments up to the point
/// where the exponentially scaled variants are the only finite ones).
///
/// The modified Bessel function is summed from its power series in log space,
/// outward from the largest term, so the scaled variant e^{-x} I_nu(x) never
/// forms an intermediate that can overflow. All terms of the series are
/// positive for nu > -1, so the summation is cancellation-free.
namespace cevsmile::specfun {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt_two_pi = 2.50662827463100050242;
inline constexpr double inv_sqrt_two = 0.70710678118654752440;

enum class BesselScaling { Unscaled, ExpScaled };

/// log I_nu(x) for nu > -1, x >= 0. Returns -inf where I_nu vanishes and
/// +inf at the x=0 singularity of negative orders.
inline double log_bessel_i(double nu, double x) {
    if (!(nu > -1.0))
        throw std::domain_error("log_bessel_i: order must satisfy nu > -1");
    if (x < 0.0 || std::isnan(x))
        throw std::domain_error("log_bessel_i: argument must be non-negative");
    if (x == 0.0) {
        if (nu == 0.0) return 0.0;
        return nu > 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    }
    if (x >= 1e4 && x >= 8.0 * nu * nu) {
        // large-argument expansion; terms shrink at least geometrically here
        const double mu4 = 4.0 * nu * nu;
        double term = 1.0, sum = 1.0;
        for (int j = 1; j <= 20; ++j) {
            term *= -(mu4 - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * j * x);
            sum += term;
            if (std::abs(term) < 1e-17 * sum) break;
        }
        return x - 0.5 * std::log(2.0 * pi * x) + std::log(sum);
    }
    const double q = 0.25 * x * x;
    const double log_half_x = std::log(0.5 * x);
    // index of the largest series term (m+1)(nu+m+1) ~ x^2/4
    double mstar_f = 0.5 * (-nu + std::sqrt(nu * nu + x * x)) - 1.0;
    const long mstar = mstar_f > 0.0 ? static_cast<long>(mstar_f + 0.5) : 0;
    const double log_peak = (nu + 2.0 * mstar) * log_half_x
                            - std::lgamma(static_cast<double>(mstar) + 1.0)
                            - std::lgamma(nu + static_cast<double>(mstar) + 1.0);
    // sum terms relative to the peak, Kahan-compensated
    double sum = 1.0, comp = 0.0;
    auto add = [&](double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    constexpr double cutoff = 1e-20;
    double u = 1.0;
    for (long m = mstar;; ++m) {
        u *= q / ((static_cast<double>(m) + 1.0) * (nu + static_cast<double>(m) + 1.0));
        if (!(u > cutoff)) break;
        add(u);
    }
    u = 1.0;
    for (long m = mstar; m >= 1; --m) {
        u *= static_cast<double>(m) * (nu + static_cast<double>(m)) / q;
        if (!(u > cutoff)) break;
        add(u);
    }
    return log_peak + std::log(sum);
}

/// I_nu(x), optionally exponentially scaled (ExpScaled returns e^{-x} I_nu(x),
/// finite for any representable x). Unscaled evaluation throws on overflow.
inline double bessel_i(double nu, double x, BesselScaling scaling = BesselScaling::Unscaled) {
    const double lg = log_bessel_i(nu, x);
    if (scaling == BesselScaling::ExpScaled) {
        if (std::isinf(lg)) return lg > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        return std::exp(lg - x);
    }
    if (lg > 709.0)
        throw std::overflow_error("bessel_i: unscaled value overflows, use ExpScaled");
    return std::exp(lg);
}

/// Normalised lower incomplete gamma function
/// P(a;x) = Gamma(a)^{-1} \int_0^x t^{a-1} e^{-t} dt, a > 0, x >= 0.
inline double lower_gamma_reg(double a, double x) {
    if (!(a > 0.0))
        throw std::domain_error("lower_gamma_reg: a must be positive");
    if (x < 0.0 || std::isnan(x))
        throw std::domain_error("lower_gamma_reg: x must be non-negative");
    if (x == 0.0) return 0.0;
    constexpr int max_iter = 1000;
    constexpr double eps = 1e-16;
    if (x < a + 1.0) {
        // series for P
        double ap = a, term = 1.0 / a, sum = term;
        for (int i = 0; i < max_iter; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) break;
        }
        return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
    }
    // Lentz continued fraction for Q, then P = 1 - Q
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

inline double erf(double z) { return std::erf(z); }
inline double erfc(double z) { return std::erfc(z); }

/// Scaled complementary error function e^{x^2} erfc(x).
inline double erfcx(double x) {
    if (x < 0.0) {
        if (x < -26.0) return std::numeric_limits<double>::infinity();
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic tail, converges to machine precision for x >= 25
    const double q = 0.5 / (x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 8; ++n) {
        term *= -(2.0 * n - 1.0) * q;
        sum += term;
    }
    return sum / (x * std::sqrt(pi));
}

/// log erfc(x) without underflow for large positive x.
inline double log_erfc(double x) {
    if (x <= 8.0) return std::log(std::erfc(x));
    return -x * x + std::log(erfcx(x));
}

inline double norm_pdf(double z) { return std::exp(-0.5 * z * z) / sqrt_two_pi; }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * inv_sqrt_two); }

/// log N(z), accurate into the far left tail.
inline double log_norm_cdf(double z) {
    return std::log(0.5) + log_erfc(-z * inv_sqrt_two);
}

} // namespace cevsmile::specfun
