// SPDX-License-Identifier: MIT
// Entanglement protocol: mode solver, EPR witness and the sphere-constrained
// quadratic minimiser.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lai/entangle.hpp"

using namespace lai;

TEST_CASE("Entanglement scenarios need A > 0") {
    CHECK_THROWS_AS(entangle_params(-1.0), DomainError);
    CHECK_THROWS_AS(entangle_params(0.0), DomainError);
    InterfaceParams mem;
    mem = params_for_ATL(-5.0, mem);
    CHECK_THROWS_AS(solve_modes(mem, Grid{16, 16, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(run_entangle(mem, Grid{16, 16, 1.0, 1.0}), DomainError);
    const InterfaceParams p = entangle_params(5.0);
    CHECK(p.Fz_bar < 0.0);
    CHECK(p.ATL() == Catch::Approx(5.0));
}

TEST_CASE("Collective modes are normalised and give the vacuum EPR sum on the input") {
    const Grid g{16, 16, 1.0, 1.0};
    const ModePair m = collective_modes(g);
    CHECK(m.h.squaredNorm() * g.dt() == Catch::Approx(1.0));
    CHECK(m.g.squaredNorm() * g.dz() == Catch::Approx(1.0));
    const InterfaceParams p = entangle_params(2.0);
    const GaussianState vac = input_state(p, g, SqueezedInput::vacuum(), true);
    const auto [v1, v3] = epr_variance(vac, m);
    CHECK(v1 == Catch::Approx(2.0));
    CHECK(v3 == Catch::Approx(2.0));
    const WitnessReport w = entanglement_witness(vac, m);
    CHECK_FALSE(w.entangled);
    CHECK(w.pt_symplectic_min == Catch::Approx(1.0));
    CHECK_THROWS_AS(epr_variance(vac, collective_modes(Grid{8, 16, 1.0, 1.0})), DimensionError);
}

TEST_CASE("The mode solver improves on the collective guess and certifies entanglement at ATL = 10") {
    const Grid g{48, 48, 1.0, 1.0};
    const InterfaceParams p = entangle_params(10.0);
    const ModePair m = solve_modes(p, g);
    REQUIRE_FALSE(m.history.empty());
    for (std::size_t i = 1; i < m.history.size(); ++i) CHECK(m.history[i] <= m.history[i - 1] * (1 + 1e-12));
    CHECK(2.0 * m.residual * m.residual <= m.history.front());
    CHECK(m.h.squaredNorm() * g.dt() == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(m.g.squaredNorm() * g.dz() == Catch::Approx(1.0).epsilon(1e-10));
    const GaussianState s = run_entangle(p, g);
    const WitnessReport w = entanglement_witness(s, m);
    CHECK(w.entangled);
    CHECK(w.sum < 0.1);
    CHECK(w.pt_entangled);
    // Optimised modes beat the flat pair on the physical state.
    CHECK(w.sum < entanglement_witness(s, collective_modes(g)).sum);
}

TEST_CASE("The residual decreases with the coupling") {
    const Grid g{32, 32, 1.0, 1.0};
    double prev = INFINITY;
    for (double ATL : {1.0, 5.0, 20.0}) {
        const ModePair m = solve_modes(entangle_params(ATL), g);
        INFO("ATL = " << ATL);
        CHECK(m.residual < prev);
        prev = m.residual;
    }
}

TEST_CASE("Sphere-constrained quadratic minimisation matches brute force") {
    std::mt19937 rng(7);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix2d R;
        R << N(rng), N(rng), N(rng), N(rng);
        const Eigen::Matrix2d A = R.transpose() * R;
        const Eigen::Vector2d c(N(rng), trial % 5 == 0 ? 0.0 : N(rng));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
        const Vec x = detail::sphere_quadratic_min(es.eigenvectors(), es.eigenvalues(), c);
        auto f = [&](const Eigen::Vector2d& v) { return v.dot(A * v) - 2.0 * v.dot(c); };
        double best = INFINITY;
        for (int k = 0; k < 200000; ++k) {
            const double th = 2.0 * M_PI * k / 200000.0;
            best = std::min(best, f(Eigen::Vector2d(std::cos(th), std::sin(th))));
        }
        INFO("trial " << trial);
        CHECK(x.norm() == Catch::Approx(1.0));
        CHECK(f(x) <= best + 1e-8);
    }
}
