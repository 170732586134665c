// SPDX-License-Identifier: MIT
// Bessel functions and the Riemann-function kernels of the transfer.

#include <catch_amalgamated.hpp>

#include <cmath>

#include "lai/bessel.hpp"

using namespace lai;

namespace {

// Series of E_pq(w) in long double: an independent reference for moderate w.
double series_ref(int p, int q, double eta, double w) {
    long double term = 1.0L, sum = 0.0L;
    for (int i = 2; i <= p; ++i) term /= i;
    for (int i = 2; i <= q; ++i) term /= i;
    sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= static_cast<long double>(eta) * w / (static_cast<long double>(k + p) * (k + q));
        sum += term;
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("Bessel functions agree with the standard library") {
    double wj = 0.0, wi = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double x = 0.025 * i;  // 0 .. 100
        wj = std::max(wj, std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
        wj = std::max(wj, std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)));
        if (x <= 60.0) {
            wi = std::max(wi, std::abs(bessel_i0(x) / std::cyl_bessel_i(0.0, x) - 1.0));
            wi = std::max(wi, x == 0.0 ? std::abs(bessel_i1(x)) : std::abs(bessel_i1(x) / std::cyl_bessel_i(1.0, x) - 1.0));
        }
    }
    CHECK(wj < 1e-13);
    CHECK(wi < 1e-13);
}

TEST_CASE("Bessel functions reject negative and NaN arguments") {
    CHECK_THROWS_AS(bessel_j0(-1.0), DomainError);
    CHECK_THROWS_AS(bessel_i1(std::nan("")), DomainError);
}

TEST_CASE("Kernel functions match their long-double series on both branches") {
    for (double eta : {-1.0, 1.0}) {
        double worst = 0.0;
        for (int i = 0; i <= 300; ++i) {
            const double w = 0.1 * i;  // 0 .. 30, across the series / closed-form switch at w = 1
            const double scale = eta > 0 ? std::exp(2.0 * std::sqrt(w)) : 1.0;
            worst = std::max(worst, std::abs(kernel::e00(eta, w) - series_ref(0, 0, eta, w)) / scale);
            worst = std::max(worst, std::abs(kernel::e01(eta, w) - series_ref(0, 1, eta, w)) / scale);
            worst = std::max(worst, std::abs(kernel::e11(eta, w) - series_ref(1, 1, eta, w)) / scale);
            worst = std::max(worst, std::abs(kernel::e12(eta, w) - series_ref(1, 2, eta, w)) / scale);
        }
        INFO("eta = " << eta);
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("Kernel functions satisfy their closed forms") {
    const double w = 7.3, x = 2.0 * std::sqrt(w);
    CHECK(kernel::e00(-1.0, w) == Catch::Approx(std::cyl_bessel_j(0.0, x)).epsilon(1e-13));
    CHECK(kernel::e01(-1.0, w) == Catch::Approx(std::cyl_bessel_j(1.0, x) / std::sqrt(w)).epsilon(1e-13));
    CHECK(kernel::e00(1.0, w) == Catch::Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-13));
    CHECK(kernel::e11(1.0, w) == Catch::Approx((std::cyl_bessel_i(0.0, x) - 1.0) / w).epsilon(1e-13));
    // Values at the origin: 1/(p! q!).
    CHECK(kernel::e12(-1.0, 0.0) == 0.5);
    CHECK(kernel::e11(1.0, 0.0) == 1.0);
}
