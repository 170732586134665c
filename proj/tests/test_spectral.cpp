// SPDX-License-Identifier: MIT
// Gaussian states, input statistics and Mandel spectra.

#include <catch_amalgamated.hpp>

#include <cmath>

#include "lai/spectral.hpp"

using namespace lai;

namespace {

InterfaceParams memory_params(double ATL) {
    InterfaceParams b;
    return params_for_ATL(ATL, b);
}

double max_dev(const std::vector<double>& v, double target) {
    double w = 0.0;
    for (double x : v) w = std::max(w, std::abs(x - target));
    return w;
}

}  // namespace

TEST_CASE("The cosine basis is orthonormal") {
    const Mat B = cosine_basis(24);
    CHECK((B.transpose() * B - Mat::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Vacuum stays at shot noise through either branch") {
    const Grid g{24, 24, 1.0, 1.0};
    for (double ATL : {-10.0, 10.0}) {
        InterfaceParams b;
        b.Fz_bar = ATL < 0 ? 1.0 : -1.0;
        const InterfaceParams p = params_for_ATL(ATL, b);
        const GaussianState in = input_state(p, g, SqueezedInput::vacuum(), true);
        for (Channel c : {Channel::Xi_I, Channel::Xi_III, Channel::T_I, Channel::T_III})
            CHECK(max_dev(mandel_spectrum(in, c).values, 1.0) < 1e-13);
        if (ATL < 0) {
            // A passive swap of two vacua leaves every mode at shot noise.
            const GaussianState out = propagate(in, build_transfer(p, g));
            for (Channel c : {Channel::Xi_I, Channel::Xi_III, Channel::T_I, Channel::T_III}) {
                INFO(to_string(c));
                CHECK(max_dev(mandel_spectrum(out, c).values, 1.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("Broadband squeezed input is flat at 1 + xi") {
    const Grid g{16, 16, 1.0, 1.0};
    const SqueezedInput sq = SqueezedInput::broadband(9.0);
    CHECK(sq.xi1 == Catch::Approx(-0.9));
    const GaussianState in = input_state(memory_params(-10.0), g, sq, true);
    CHECK(max_dev(mandel_spectrum(in, Channel::Xi_I).values, 0.1) < 1e-13);
    CHECK(max_dev(mandel_spectrum(in, Channel::Xi_III).values, 10.0) < 1e-12);
    CHECK(max_dev(mandel_spectrum(in, Channel::T_I).values, 1.0) < 1e-13);
    const auto sp = mandel_spectrum(in, Channel::Xi_I);
    CHECK(sp.domain == SpectralDomain::frequency);
    CHECK(sp.abscissa[3] == Catch::Approx(3.0 * M_PI));
}

TEST_CASE("Exponential cell covariance matches direct quadrature") {
    const int n = 6;
    const double d = 0.3, tau = 0.45;
    const Mat C = detail::exponential_cell_covariance(n, d, tau);
    const int m = 600;  // midpoint rule per cell
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const double t = (i + (a + 0.5) / m) * d, u = (j + (b + 0.5) / m) * d;
                    s += std::exp(-std::abs(t - u) / tau) / (2.0 * tau);
                }
            s /= double(m) * m;
            INFO("cells " << i << ", " << j);
            CHECK(C(i, j) == Catch::Approx(s).epsilon(2e-4));
        }
}

TEST_CASE("Finite-bandwidth input approaches the broadband levels at low frequency") {
    const Grid g{64, 64, 1.0, 1.0};
    const SqueezedInput sq = SqueezedInput::from_xi3_tau(9.0, 0.01);
    CHECK(sq.tau_c() == Catch::Approx(0.01));
    CHECK((1.0 + sq.xi1) * (1.0 + sq.xi3) == Catch::Approx(1.0));
    const GaussianState in = input_state(memory_params(-10.0), g, sq, false);
    const auto sI = mandel_spectrum(in, Channel::Xi_I).values, sIII = mandel_spectrum(in, Channel::Xi_III).values;
    // Lorentzian spectra: low modes near 1 + xi, high modes relax toward shot noise.
    CHECK(sIII[0] == Catch::Approx(10.0).epsilon(0.05));
    CHECK(sI[0] == Catch::Approx(0.1).epsilon(0.1));
    CHECK(sIII[63] < sIII[0]);
    CHECK(sI[63] > sI[0]);
}

TEST_CASE("Squeezed-input records are validated") {
    CHECK_THROWS_AS(SqueezedInput::from_xi3_tau(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(SqueezedInput::from_xi3_tau(3.0, 0.0), DomainError);
    CHECK_THROWS_AS(SqueezedInput::from_cavity(1.0, 0.6), DomainError);  // above threshold
    SqueezedInput bad;
    bad.xi1 = -0.5;
    bad.xi3 = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("State rotations and propagation check their arguments") {
    const Grid g{8, 8, 1.0, 1.0};
    const InterfaceParams p = memory_params(-2.0);
    const GaussianState sq = input_state(p, g, SqueezedInput::broadband(3.0), true);
    // Cell-dependent rotation of anisotropic white light noise is not representable.
    CHECK_THROWS_AS(rotate_state(sq, FrameDirection::in, PhaseParams{0.0, 1.0}, true, 0.0), DomainError);
    // A uniform rotation is fine and invertible.
    const GaussianState r = rotate_state(sq, FrameDirection::in, PhaseParams{1.0, 0.0}, true, 0.5);
    const GaussianState back = rotate_state(r, FrameDirection::out, PhaseParams{1.0, 0.0}, true, 0.5);
    CHECK((back.cov - sq.cov).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(propagate(sq, build_transfer(p, Grid{9, 8, 1.0, 1.0})), DimensionError);
}
