#include <catch2/catch_amalgamated.hpp>

#include "cevsmile/specfun.hpp"

#include <cmath>

using namespace cevsmile;
using Catch::Approx;

TEST_CASE("bessel_i at the origin", "[specfun]") {
    CHECK(specfun::bessel_i(0.0, 0.0) == 1.0);
    CHECK(specfun::bessel_i(1.0, 0.0) == 0.0);
    CHECK(specfun::bessel_i(0.3, 0.0) == 0.0);
    CHECK(std::isinf(specfun::bessel_i(-0.5, 0.0)));
}

TEST_CASE("bessel_i half order closed form", "[specfun]") {
    // I_{1/2}(x) = sqrt(2/(pi x)) sinh(x)
    for (double x : {0.1, 0.5, 2.0, 10.0, 40.0}) {
        const double ref = std::sqrt(2.0 / (specfun::pi * x)) * std::sinh(x);
        CHECK(specfun::bessel_i(0.5, x) == Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("bessel_i reference values", "[specfun]") {
    // references: mpmath besseli at 30 digits
    CHECK(specfun::bessel_i(-0.5, 0.3) == Approx(1.5227772707319231953).epsilon(1e-13));
    CHECK(specfun::bessel_i(0.7, 15.0) == Approx(333951.39704490555888).epsilon(1e-13));
    CHECK(specfun::bessel_i(-0.9, 0.05) == Approx(2.925633889115736343304).epsilon(1e-13));
    CHECK(specfun::bessel_i(2.3, 47.0) == Approx(1.42287834212458190836e19).epsilon(1e-13));
    CHECK(specfun::bessel_i(0.7, 800.0, specfun::BesselScaling::ExpScaled)
          == Approx(0.014102622712715645615).epsilon(1e-13));
    CHECK(specfun::bessel_i(4.5, 2.0, specfun::BesselScaling::ExpScaled)
          == Approx(0.003093476465347413802).epsilon(1e-13));
    // large-argument branch
    CHECK(specfun::bessel_i(1.0, 1e5, specfun::BesselScaling::ExpScaled)
          == Approx(0.001261561530121817127341).epsilon(1e-13));
}

TEST_CASE("bessel_i scaling invariant", "[specfun]") {
    for (double nu : {-0.8, -0.3, 0.0, 0.6, 1.0, 4.5}) {
        for (double x : {1e-3, 0.5, 2.0, 10.0, 100.0, 400.0}) {
            const double scaled = specfun::bessel_i(nu, x, specfun::BesselScaling::ExpScaled);
            const double plain = specfun::bessel_i(nu, x);
            CHECK(scaled * std::exp(x) == Approx(plain).epsilon(1e-12));
        }
    }
}

TEST_CASE("bessel_i error paths", "[specfun]") {
    CHECK_THROWS_AS(specfun::bessel_i(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::bessel_i(-1.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::bessel_i(0.5, -1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::bessel_i(0.5, 800.0), std::overflow_error);
    CHECK_NOTHROW(specfun::bessel_i(0.5, 800.0, specfun::BesselScaling::ExpScaled));
}

TEST_CASE("bessel_i sandwich and quadratic-exponent bounds", "[specfun][property]") {
    // lower/upper sandwich needs nu > -1/2, the e^{2x} bound holds on the
    // full implemented order range nu > -1
    for (int i = 0; i < 40; ++i) {
        const double nu_s = -0.49 + 5.0 * i / 39.0;
        for (int j = 0; j < 25; ++j) {
            const double x = 0.05 + 49.95 * j / 24.0;
            const double base = std::exp(nu_s * std::log(0.5 * x) - std::lgamma(nu_s + 1.0));
            const double v = specfun::bessel_i(nu_s, x);
            CHECK(v >= base * (1.0 - 1e-12));
            CHECK(v <= std::exp(x) * base * (1.0 + 1e-12));
        }
    }
    for (int i = 0; i < 40; ++i) {
        const double nu = -0.95 + 5.0 * i / 39.0;
        for (int j = 0; j < 25; ++j) {
            const double x = 0.05 + 49.95 * j / 24.0;
            const double bound = (nu + 2.0) / std::tgamma(nu + 2.0)
                                 * std::exp(nu * std::log(0.5 * x) + 2.0 * x);
            CHECK(specfun::bessel_i(nu, x) < bound);
        }
    }
}

TEST_CASE("lower_gamma_reg basics", "[specfun]") {
    CHECK(specfun::lower_gamma_reg(1.0, 0.0) == 0.0);
    CHECK(specfun::lower_gamma_reg(1.0, 7.0) == Approx(-std::expm1(-7.0)).epsilon(1e-14));
    CHECK(specfun::lower_gamma_reg(2.0, 500.0) == Approx(1.0).epsilon(1e-14));
    // references: mpmath gammainc(regularized)
    CHECK(specfun::lower_gamma_reg(4.0 / 7.0, 16.0 / 7.0)
          == Approx(0.9599418206833666849892).epsilon(1e-13));
    CHECK(specfun::lower_gamma_reg(3.5, 1.2)
          == Approx(0.06556292042202892333499).epsilon(1e-13));
    CHECK(specfun::lower_gamma_reg(0.3, 9.0)
          == Approx(0.9999917263039976544309).epsilon(1e-13));
    CHECK_THROWS_AS(specfun::lower_gamma_reg(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::lower_gamma_reg(-2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::lower_gamma_reg(1.0, -0.5), std::domain_error);
}

TEST_CASE("lower_gamma_reg monotone in x", "[specfun][property]") {
    for (double a : {0.2, 0.571, 1.0, 3.5, 10.0}) {
        double prev = -1.0;
        for (int j = 0; j <= 200; ++j) {
            const double x = 0.12 * j;
            const double v = specfun::lower_gamma_reg(a, x);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("erf and norm_cdf", "[specfun]") {
    CHECK(specfun::erf(0.0) == 0.0);
    CHECK(specfun::norm_cdf(0.0) == 0.5);
    // reference: mpmath ncdf(0.1)
    CHECK(specfun::norm_cdf(0.1) == Approx(0.53982783727702898147).epsilon(1e-14));
}

TEST_CASE("erf oddness and cdf symmetry", "[specfun][property]") {
    for (int i = 0; i < 1000; ++i) {
        const double z = -8.0 + 16.0 * i / 999.0;
        CHECK(std::abs(specfun::erf(-z) + specfun::erf(z)) < 1e-14);
        CHECK(std::abs(specfun::norm_cdf(z) + specfun::norm_cdf(-z) - 1.0) < 1e-14);
    }
}

TEST_CASE("log_norm_cdf deep tail", "[specfun]") {
    // mid-range agrees with the direct log
    for (double z : {-5.0, -1.0, 0.0, 2.0})
        CHECK(specfun::log_norm_cdf(z) == Approx(std::log(specfun::norm_cdf(z))).epsilon(1e-13));
    // reference: mpmath log(ncdf(-40))
    CHECK(specfun::log_norm_cdf(-40.0) == Approx(-804.6084420137537881666).epsilon(1e-14));
    // Mills bracket as an independent check at z = -60
    const double z = 60.0;
    const double log_phi = -0.5 * z * z - std::log(specfun::sqrt_two_pi);
    const double lo = log_phi + std::log(1.0 / z - 1.0 / (z * z * z));
    const double hi = log_phi - std::log(z);
    const double v = specfun::log_norm_cdf(-z);
    CHECK(v > lo - 1e-12);
    CHECK(v < hi + 1e-12);
}

TEST_CASE("erfcx consistency", "[specfun]") {
    for (double x : {0.0, 0.3, 2.0, 8.0, 20.0, 24.9, 25.1, 60.0}) {
        const double lhs = specfun::erfcx(x);
        if (x < 26.0)
            CHECK(lhs * std::exp(-x * x) == Approx(std::erfc(x)).epsilon(1e-12));
        CHECK(lhs > 0.0);
        if (x > 1.0)
            CHECK(lhs < 1.0 / (x * std::sqrt(specfun::pi)) * 1.01);
    }
}
