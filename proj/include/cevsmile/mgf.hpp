#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cev_distribution.hpp"
#include "specfun.hpp"

/// Closed-form cumulant generating functions of the variance draw for the
/// exponents that admit them (p = 0 with either boundary, p = 1/2), the
/// bridge Lambda^Z(u, tau) = Lambda^V(u(u-1) tau / 2), and the wing slopes
/// they imply through Lee's moment formula.
///
/// The p = 0 formulas mix e^{2 u y0} against error functions of opposite
/// sign; the brackets are regrouped into sums/differences of scaled
/// complementary error functions and combined in log space, which keeps them
/// stable for |u| far beyond where the printed form cancels catastrophically.
namespace cevsmile::mgf {

using cev::CevModel;

/// Effective domain endpoints of Lambda^V.
struct MgfDomain {
    double lower;
    double upper;
};

namespace detail {

enum class ClosedForm { ZeroAbsorbing, ZeroReflecting, Half };

inline ClosedForm classify(const CevModel& m) {
    if (std::abs(m.p) <= 1e-12)
        return m.reflecting() ? ClosedForm::ZeroReflecting : ClosedForm::ZeroAbsorbing;
    if (std::abs(m.p - 0.5) <= 1e-12)
        return ClosedForm::Half;
    throw std::domain_error("mgf: closed form only available for p in {0, 1/2}");
}

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log(e^a - e^b) for a > b
inline double log_diff_exp(double a, double b) {
    return a + std::log(-std::expm1(b - a));
}

} // namespace detail

inline MgfDomain domain(const CevModel& m) {
    const double inf = std::numeric_limits<double>::infinity();
    if (detail::classify(m) == detail::ClosedForm::Half)
        return {-inf, 2.0 / (m.xi * m.xi * m.t)};
    return {-inf, inf};
}

/// Lambda^V(u) = log E e^{u V}.
inline double lambda_v(const CevModel& m, double u) {
    const auto form = detail::classify(m);
    const double x2t = m.xi * m.xi * m.t;
    if (form == detail::ClosedForm::Half) {
        if (!(u < 2.0 / x2t))
            throw std::domain_error("lambda_v: u at or beyond the p=1/2 pole 2/(xi^2 t)");
        return 2.0 * m.y0 * u / (2.0 - u * x2t);
    }
    // p = 0: bracket regrouped as e^{2 u y0} erfc(-z+) -/+ erfc(-z-)
    const double zp = (u * x2t + m.y0) / (m.xi * std::sqrt(2.0 * m.t));
    const double zm = (u * x2t - m.y0) / (m.xi * std::sqrt(2.0 * m.t));
    const double a1 = 2.0 * u * m.y0 + specfun::log_erfc(-zp);
    const double a2 = specfun::log_erfc(-zm);
    const double prefix = 0.5 * u * (u * x2t - 2.0 * m.y0) - std::log(2.0);
    if (form == detail::ClosedForm::ZeroReflecting)
        return prefix + detail::log_sum_exp(a1, a2);
    const double log_mt = std::log(cev::mass_at_zero(m));
    if (!(a1 > a2))  // bracket fully cancelled in double precision
        return log_mt;
    return detail::log_sum_exp(log_mt, prefix + detail::log_diff_exp(a1, a2));
}

/// Lambda^Z(u, tau) = Lambda^V(u(u-1) tau / 2).
inline double lambda_z(const CevModel& m, double u, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("lambda_z: tau must be positive");
    return lambda_v(m, 0.5 * u * (u - 1.0) * tau);
}

/// psi(u) = 2 - 4 (sqrt(u(u+1)) - u), written so the large-u cancellation
/// is evaluated through log1p/expm1.
inline double psi(double u) {
    if (u < 0.0) throw std::domain_error("psi: u must be non-negative");
    if (u == 0.0) return 2.0;
    return 2.0 - 4.0 * u * std::expm1(0.5 * std::log1p(1.0 / u));
}

/// Critical exponents and wing slopes of the total implied variance.
/// u_minus follows the convention u_- = u_+ - 1 (the positive root of
/// u(u+1) = 4/(xi^2 t tau)).
struct LeeWings {
    double u_plus;
    double u_minus;
    double beta_plus;
    double beta_minus;
};

inline LeeWings lee_wings(const CevModel& m, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("lee_wings: tau must be positive");
    const auto form = detail::classify(m);
    if (form != detail::ClosedForm::Half) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, 0.0, 0.0};
    }
    const double x2t = m.xi * m.xi * m.t;
    const double u_plus = 0.5 + 0.5 * std::sqrt(1.0 + 16.0 / (x2t * tau));
    const double beta = 2.0 / (m.xi * std::sqrt(m.t * tau))
                        * (std::sqrt(x2t * tau + 16.0) - 4.0);
    return {u_plus, u_plus - 1.0, beta, beta};
}

} // namespace cevsmile::mgf
