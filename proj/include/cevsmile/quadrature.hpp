#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

/// Global adaptive Gauss-Kronrod quadrature. "Global" in the usual sense:
/// the segment with the largest error estimate anywhere in the domain is
/// bisected next, rather than recursing locally.
namespace cevsmile::quadrature {

/// Tolerances and budget for one mixture integral.
struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_subdivisions = 2000;
    /// bound on the neglected tail mass when the infinite domain is truncated
    double tail_mass_tol = 1e-14;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_mass_tol > 0.0))
            throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
        if (max_subdivisions < 10)
            throw std::invalid_argument("QuadratureConfig: max_subdivisions must be >= 10");
    }
};

struct ToleranceNotMet : std::runtime_error {
    double value;
    double achieved_error;
    ToleranceNotMet(double v, double e)
        : std::runtime_error("quadrature: subdivision budget exhausted (achieved error "
                             + std::to_string(e) + ")"),
          value(v), achieved_error(e) {}
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int segments = 0;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (positive half of the rule)
inline constexpr double xgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double wgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double wg[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct Segment {
    double a, b, integral, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * xgk[j]);
        fv[14 - j] = f(c + h * xgk[j]);
    }
    fv[7] = f(c);
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double pair = (j == 7) ? fv[7] : fv[j] + fv[14 - j];
        const double apair = (j == 7) ? std::abs(fv[7]) : std::abs(fv[j]) + std::abs(fv[14 - j]);
        resk += wgk[j] * pair;
        resabs += wgk[j] * apair;
        if (j % 2 == 1) resg += wg[j / 2] * pair;
    }
    const double reskh = 0.5 * resk;
    double resasc = 0.0;
    for (int j = 0; j < 15; ++j) {
        const int w = j < 8 ? j : 14 - j;
        resasc += wgk[w] * std::abs(fv[j] - reskh);
    }
    const double habs = std::abs(h);
    double err = std::abs((resk - resg) * h);
    resasc *= habs;
    resabs *= habs;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (round_floor > std::numeric_limits<double>::min()) err = std::max(err, round_floor);
    return {a, b, resk * h, err};
}

} // namespace detail

/// Integrate f over [breakpoints.front(), breakpoints.back()], seeding the
/// worklist with one segment per consecutive breakpoint pair. Throws
/// ToleranceNotMet when max_subdivisions segments cannot reach the target.
template <class F>
IntegrationResult integrate(F&& f, const std::vector<double>& breakpoints,
                            const QuadratureConfig& cfg) {
    cfg.validate();
    if (breakpoints.size() < 2)
        throw std::invalid_argument("integrate: need at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("integrate: breakpoints must be strictly increasing");

    std::priority_queue<detail::Segment> worklist;
    double total = 0.0, total_err = 0.0;
    int count = 0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        auto s = detail::gk15(f, breakpoints[i - 1], breakpoints[i]);
        total += s.integral;
        total_err += s.error;
        worklist.push(s);
        ++count;
    }
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (count >= cfg.max_subdivisions)
            throw ToleranceNotMet(total, total_err);
        const auto worst = worklist.top();
        worklist.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            // interval no longer splittable in double precision; accept as is
            if (worklist.empty()) break;
            continue;
        }
        auto left = detail::gk15(f, worst.a, m);
        auto right = detail::gk15(f, m, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        worklist.push(left);
        worklist.push(right);
        ++count;
    }
    return {total, total_err, count};
}

} // namespace cevsmile::quadrature
