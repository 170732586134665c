// SPDX-License-Identifier: MIT
// Memory protocol: scenario validation, regime windows, fidelities and the
// qualitative storage behaviour.

#include <catch_amalgamated.hpp>

#include <cmath>

#include "lai/memory.hpp"

using namespace lai;

TEST_CASE("Memory scenarios are validated") {
    const SqueezedInput sq = SqueezedInput::broadband(3.0);
    CHECK_THROWS_AS(memory_run(10.0, -2.0, sq, true, 16), DomainError);
    CHECK_THROWS_AS(memory_run(-10.0, 0.0, sq, true, 16), DomainError);
    InterfaceParams neg;
    neg.Fz_bar = -1.0;
    CHECK_THROWS_AS(memory_run(-10.0, -2.0, sq, true, 16, neg), DomainError);
    CHECK_THROWS_AS(memory_run(-10.0, -2.0, sq, true, 1), DomainError);
    InterfaceParams gyro;
    gyro.kappa1 = 5.0;  // snapped to 2 pi for optimal retrieval
    const ProtocolRun run = memory_run(-10.0, -2.0, sq, true, 16, gyro);
    CHECK(run.write.kappa1 == Catch::Approx(2.0 * M_PI));
    CHECK(run.write.ATL() == Catch::Approx(-10.0));
    CHECK(run.read.ATL() == Catch::Approx(-2.0));
}

TEST_CASE("Regime windows follow the characteristic scales") {
    const ProtocolRun run = memory_run(-10.0, -8.0, SqueezedInput::from_xi3_tau(9.0, 0.1), false, 16);
    const RegimeReport r = regime_windows(run);
    CHECK(r.q_c == Catch::Approx(std::sqrt(10.0)));
    CHECK(r.Omega_c == Catch::Approx(std::sqrt(8.0)));
    REQUIRE(r.items.size() == 5);
    CHECK(r.items[0].value == Catch::Approx(10.0 * 0.1 / std::sqrt(10.0)));  // |A| tau_c / q_c
    CHECK(r.items[4].value == Catch::Approx(1.0));                            // |A| tau_c L
    CHECK(r.items[4].status == Status::warn);
    const ProtocolRun bb = memory_run(-10.0, -8.0, SqueezedInput::broadband(9.0), true, 16);
    CHECK(regime_windows(bb).items[0].value == 0.0);
}

TEST_CASE("Quantum fidelity by hand") {
    CHECK(quantum_fidelity(SqueezedInput::vacuum(), 0.0, 0.0) == Catch::Approx(1.0));
    const SqueezedInput sq = SqueezedInput::broadband(3.0);  // 1 + xi1 = 1/4, 1 + xi3 = 4
    CHECK(quantum_fidelity(sq, sq.xi1, sq.xi3) == Catch::Approx(1.0));
    // Output at vacuum: F = 2 / sqrt((1 + 1/4)(1 + 4)).
    CHECK(quantum_fidelity(sq, 0.0, 0.0) == Catch::Approx(2.0 / std::sqrt(1.25 * 5.0)));
    CHECK_THROWS_AS(quantum_fidelity(sq, -1.5, 0.0), DomainError);
}

TEST_CASE("Classical benchmark by hand and its admissibility window") {
    const SqueezedInput sq = SqueezedInput::from_xi3_tau(9.0, 0.01);  // D3 = 5
    const ClassicalResult c = classical_benchmark(sq, 1.0, 100);
    const double x = 5.0 * M_PI / 100.0;
    CHECK(c.D3_theta == Catch::Approx(x));
    CHECK(c.F == Catch::Approx(1.0 / std::sqrt(1.0 + x * x)));
    // sqrt(tau_c / T_N) = sqrt(0.01 * 100) = 1 > x^2: not admissible.
    CHECK_FALSE(c.constraint_ok);
    // N = 20: x^2 = (pi/4)^2 = 0.617 > sqrt(0.01 * 20) = 0.447, and < 1.
    CHECK(classical_benchmark(sq, 1.0, 20).constraint_ok);
    const ClassicalResult best = best_classical(sq, 1.0, 10000);
    REQUIRE(best.constraint_ok);
    for (long N = 1; N <= 10000; ++N) {
        const ClassicalResult r = classical_benchmark(sq, 1.0, N);
        if (r.constraint_ok) CHECK(r.F <= best.F);
    }
    const ClassicalResult none = best_classical(SqueezedInput::from_xi3_tau(1e4, 0.01), 1.0);
    CHECK_FALSE(none.constraint_ok);
    CHECK(none.F == 0.0);
    CHECK(none.N == 0);
    CHECK_THROWS_AS(classical_benchmark(sq, 1.0, 0), DomainError);
}

TEST_CASE("Stronger write-in stores more squeezing in the collective spin mode") {
    const SqueezedInput sq = SqueezedInput::broadband(9.0);
    double prev = 1.0;
    for (double ATL : {-2.0, -10.0, -40.0}) {
        const ProtocolRun run = memory_run(ATL, -2.0, sq, true, 32);
        const GaussianState post = run_write(run);
        const double k0 = mandel_spectrum(post, Channel::T_I).values[0];
        INFO("ATL = " << ATL);
        CHECK(k0 < prev);
        CHECK(k0 > 0.1 - 1e-9);  // cannot beat the input squeezing
        prev = k0;
    }
}

TEST_CASE("Readout-mode optimisation beats the collective mode") {
    const ProtocolRun run = memory_run(-10.0, -2.0, SqueezedInput::broadband(9.0), true, 32);
    const GaussianState post = run_write(run);
    const ReadoutMode m = optimize_readout_mode(post, Channel::T_I);
    CHECK(m.variance <= mandel_spectrum(post, Channel::T_I).values[0] + 1e-12);
    CHECK(m.variance * m.conjugate_variance >= 1.0 - 1e-9);  // uncertainty relation
    const FidelityReport f = fidelity_report(run, post);
    CHECK(f.quantum_F > 0.0);
    CHECK(f.quantum_F <= 1.0);
    // Broadband input makes the classical constraint vacuous: every N up to the scan limit qualifies.
    CHECK(f.classical_constraint_ok);
}

TEST_CASE("Retrieval returns the stored squeezing to the light") {
    const ProtocolRun run = memory_run(-40.0, -8.0, SqueezedInput::broadband(9.0), true, 32);
    const GaussianState post = run_write(run);
    const GaussianState out = run_read(post, run);
    CHECK(mandel_spectrum(out, Channel::Xi_I).values[0] < 1.0);
    CHECK(mandel_spectrum(out, Channel::Xi_III).values[0] > 1.0);
    const FidelityReport f = fidelity_report(run, post, &out);
    CHECK(f.retrieval_F > 0.5);
    CHECK_THROWS_AS(read_input(input_state(run.write, Grid{16, 16, 1.0, 1.0}, run.input, true), run), DimensionError);
}
