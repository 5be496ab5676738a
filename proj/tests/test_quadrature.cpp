#include <catch2/catch_amalgamated.hpp>

#include "cevsmile/quadrature.hpp"

#include <cmath>

using namespace cevsmile;
using Catch::Approx;

TEST_CASE("config validation", "[quadrature]") {
    quadrature::QuadratureConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_subdivisions = 5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("known integrals", "[quadrature]") {
    quadrature::QuadratureConfig cfg;
    auto r = quadrature::integrate([](double x) { return 4.0 / (1.0 + x * x); }, {0.0, 1.0}, cfg);
    CHECK(r.value == Approx(3.14159265358979323846).epsilon(1e-13));

    r = quadrature::integrate([](double x) { return std::exp(-x * x); }, {-9.0, 0.0, 9.0}, cfg);
    CHECK(r.value == Approx(std::sqrt(3.14159265358979323846)).epsilon(1e-13));

    // sharply peaked: a Gaussian of width 1e-3 over a unit interval
    const double s = 1e-3;
    r = quadrature::integrate(
        [&](double x) { return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * 3.14159265358979323846)); },
        {-0.5, 0.0, 0.5}, cfg);
    CHECK(r.value == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand converges", "[quadrature]") {
    quadrature::QuadratureConfig cfg;
    auto r = quadrature::integrate([](double x) { return std::sin(50.0 * x); }, {0.0, 1.0}, cfg);
    CHECK(r.value == Approx((1.0 - std::cos(50.0)) / 50.0).margin(1e-12));
    CHECK(r.segments > 1);
}

TEST_CASE("budget exhaustion reports tolerance-not-met", "[quadrature]") {
    quadrature::QuadratureConfig cfg;
    cfg.max_subdivisions = 10;
    cfg.rel_tol = 1e-14;
    cfg.abs_tol = 1e-300;
    // |x|^{-1/2}-type edge singularity needs many panels at this tolerance
    auto f = [](double x) { return 1.0 / std::sqrt(x); };
    CHECK_THROWS_AS(quadrature::integrate(f, {1e-12, 1.0}, cfg), quadrature::ToleranceNotMet);
    try {
        quadrature::integrate(f, {1e-12, 1.0}, cfg);
    } catch (const quadrature::ToleranceNotMet& e) {
        CHECK(e.value == Approx(2.0).epsilon(1e-2));
        CHECK(e.achieved_error > 0.0);
    }
}

TEST_CASE("breakpoint validation", "[quadrature]") {
    quadrature::QuadratureConfig cfg;
    auto f = [](double x) { return x; };
    CHECK_THROWS_AS(quadrature::integrate(f, {1.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(quadrature::integrate(f, {1.0, 1.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(quadrature::integrate(f, {1.0, 0.5}, cfg), std::invalid_argument);
}
