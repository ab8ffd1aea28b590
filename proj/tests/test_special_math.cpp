#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "loglap/special_math.hpp"

using namespace loglap;
using doctest::Approx;

namespace {
const double kGamma = std::numbers::egamma;
const double kLn2 = std::numbers::ln2;
}

TEST_CASE("gamma matches factorials and the half-integer value") {
    CHECK(gamma_fn(1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(3.0) == Approx(2.0).epsilon(1e-13));
    CHECK(gamma_fn(0.5) == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.05, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double x = unif(rng);
        CHECK(gamma_fn(x) == Approx(std::tgamma(x)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("digamma special values") {
    CHECK(digamma(1.0) == Approx(-kGamma).epsilon(1e-13));
    CHECK(digamma(0.5) == Approx(-kGamma - 2 * kLn2).epsilon(1e-13));
    CHECK(digamma(1.5) == Approx(2 - kGamma - 2 * kLn2).epsilon(1e-12));
    CHECK(digamma(1.5) == Approx(0.0364899740).epsilon(1e-9));
    CHECK_THROWS_AS(digamma(0.0), std::domain_error);
}

TEST_CASE("digamma recurrence on random arguments") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.5, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double x = unif(rng);
        CHECK(std::abs(digamma(x + 1) - digamma(x) - 1 / x) <= 1e-11);
    }
}

TEST_CASE("constants for n = 1, 2, 3") {
    const auto c2 = constants_for<double>(2);
    CHECK(c2.c_n == Approx(1 / std::numbers::pi).epsilon(1e-14));
    CHECK(c2.rho_n == Approx(2 * kLn2 - 2 * kGamma).epsilon(1e-13));
    CHECK(c2.rho_n == Approx(0.2318630313).epsilon(1e-9));
    const auto c3 = constants_for<double>(3);
    CHECK(c3.rho_n == Approx(2 - 2 * kGamma).epsilon(1e-12));
    CHECK(c3.rho_n == Approx(0.8455686702).epsilon(1e-9));
    const auto c1 = constants_for<double>(1);
    CHECK(c1.c_n == Approx(1.0).epsilon(1e-13));
    CHECK(c1.rho_n == Approx(-2 * kGamma).epsilon(1e-13));
    CHECK(c1.rho_n < 0);
    CHECK_THROWS_AS(constants_for<double>(0), std::domain_error);
    CHECK_THROWS_AS(constants_for<double>(-3), std::domain_error);
}

TEST_CASE("c_n equals 2 / |S^{n-1}| for n = 1..6") {
    for (int n = 1; n <= 6; ++n) {
        const double area = 2 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
        CHECK(constants_for<double>(n).c_n == Approx(2 / area).epsilon(1e-12));
        CHECK(unit_sphere_area<double>(n) == Approx(area).epsilon(1e-12));
    }
}

TEST_CASE("long double instantiation agrees with double") {
    const auto cl = constants_for<long double>(2);
    CHECK(static_cast<double>(cl.rho_n) == Approx(constants_for<double>(2).rho_n).epsilon(1e-14));
}
