// SPDX-License-Identifier: MIT
// Transfer construction: commutator preservation, agreement with the
// box-scheme integrator, growth bounds and argument checking.

#include <catch_amalgamated.hpp>

#include <cmath>

#include "lai/propagator.hpp"

using namespace lai;

namespace {

InterfaceParams branch_params(double ATL) {
    InterfaceParams b;
    b.Fz_bar = ATL < 0 ? 1.0 : -1.0;
    return params_for_ATL(ATL, b);
}

Vec averages(const Profile& f, int n, double X) {
    Vec v(n);
    const int sub = 64;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < sub; ++k) s += f((i + (k + 0.5) / sub) * X / n);  // midpoint rule
        v[i] = s / sub;
    }
    return v;
}

}  // namespace

TEST_CASE("The identity transfer has zero symplectic residual") {
    const InterfaceParams p = branch_params(-3.0);
    const TransferMatrix id = identity_transfer(p, Grid{16, 16, 1.0, 1.0});
    CHECK(symplectic_residual(id) == 0.0);
    CHECK(kernel_commutator_defect(id) == 0.0);
}

TEST_CASE("Transfers preserve the commutator form on both branches") {
    for (double ATL : {-10.0, -1.0, 1.0, 10.0}) {
        const TransferMatrix tm = build_transfer(branch_params(ATL), Grid{32, 32, 1.0, 1.0});
        INFO("ATL = " << ATL);
        CHECK(tm.branch == (ATL < 0 ? Branch::memory : Branch::entanglement));
        CHECK(symplectic_residual(tm) < 1e-9);
    }
}

TEST_CASE("The kernel-block defect shrinks under refinement") {
    for (double ATL : {-10.0, 10.0}) {
        const InterfaceParams p = branch_params(ATL);
        double prev = INFINITY;
        for (int n : {16, 32, 64}) {
            const TransferOptions o{false, false, 8};
            const double d = kernel_commutator_defect(build_transfer(p, Grid{n, n, 1.0, 1.0}, o));
            INFO("ATL = " << ATL << ", n = " << n);
            CHECK(d < 0.5 * prev);
            prev = d;
        }
    }
}

TEST_CASE("Transfer agrees with the box-scheme integrator on a small grid") {
    const Grid g{32, 32, 1.0, 1.0};
    auto f1 = [](double t) { return 1.0 + 0.5 * std::cos(M_PI * t); };
    auto f3 = [](double t) { return std::sin(2.0 * M_PI * t); };
    auto s1 = [](double z) { return 0.3 - z * z; };
    auto s2 = [](double z) { return std::cos(3.0 * z); };
    for (double ATL : {-5.0, 5.0}) {
        const InterfaceParams p = branch_params(ATL);
        const auto o = pde_oracle(p, g, f1, f3, s1, s2, OracleOptions{9, true, 1e-2});
        const auto r = apply_transfer(build_transfer(p, g), ChannelPair{averages(f1, 32, 1.0), averages(f3, 32, 1.0)},
                                      ChannelPair{averages(s1, 32, 1.0), averages(s2, 32, 1.0)});
        // Compare in shot-noise units.
        const double wf = 1.0 / std::sqrt(2.0 * p.Xi2_bar), ws = 1.0 / std::sqrt(p.cbar13 * std::abs(p.Fz_bar));
        const double err = std::max({(r.first.first - o.first.first).cwiseAbs().maxCoeff() * wf,
                                     (r.first.second - o.first.second).cwiseAbs().maxCoeff() * wf,
                                     (r.second.first - o.second.first).cwiseAbs().maxCoeff() * ws,
                                     (r.second.second - o.second.second).cwiseAbs().maxCoeff() * ws});
        const double scale = std::max({o.first.first.cwiseAbs().maxCoeff() * wf, o.second.first.cwiseAbs().maxCoeff() * ws,
                                       o.second.second.cwiseAbs().maxCoeff() * ws});
        INFO("ATL = " << ATL);
        CHECK(err / scale < 2e-3);
    }
}

TEST_CASE("Memory transfers are contractions; amplification is bounded by I0") {
    const Grid g{32, 32, 1.0, 1.0};
    for (double ATL : {-10.0, -40.0}) {
        const InterfaceParams p = branch_params(ATL);
        const TransferMatrix tm = build_transfer(p, g);
        const auto [a, s] = canonical_form(p, g);
        Vec d(64);
        d.head(32).setConstant(std::sqrt(a));
        d.tail(32).setConstant(std::sqrt(std::abs(s)));
        const Mat scaled = d.cwiseInverse().asDiagonal() * tm.block_I() * d.asDiagonal();
        CHECK(Eigen::JacobiSVD<Mat>(scaled).singularValues()(0) <= 1.0 + 1e-9);
    }
    double prev = 1.0;
    for (double ATL : {1.0, 10.0, 40.0}) {
        const TransferMatrix tm = build_transfer(branch_params(ATL), g, TransferOptions{false, false, 8});
        const double norm = Eigen::JacobiSVD<Mat>(tm.K_ff).singularValues()(0);
        INFO("ATL = " << ATL);
        CHECK(norm > prev);
        CHECK(norm <= std::cyl_bessel_i(0.0, 2.0 * std::sqrt(ATL)));
        prev = norm;
    }
}

TEST_CASE("Transfer construction rejects degenerate and mismatched input") {
    InterfaceParams p = branch_params(-2.0);
    InterfaceParams zero = p;
    zero.Xi2_bar = 0.0;
    zero = refresh(zero);
    CHECK_THROWS_AS(build_transfer(zero, Grid{8, 8, 1.0, 1.0}), DegenerateCouplingError);
    CHECK_THROWS_AS(build_transfer(p, Grid{8, 8, 2.0, 1.0}), DimensionError);
    CHECK_THROWS_AS(build_transfer(p, Grid{1, 8, 1.0, 1.0}), DomainError);
    const TransferMatrix tm = build_transfer(p, Grid{8, 8, 1.0, 1.0});
    CHECK_THROWS_AS(apply_transfer(tm, ChannelPair{Vec::Zero(7), Vec::Zero(8)}, ChannelPair{Vec::Zero(8), Vec::Zero(8)}),
                    DimensionError);
    CHECK_THROWS_AS(pde_oracle(p, Grid{8, 8, 1.0, 1.0}, [](double) { return 0.0; }, [](double) { return 0.0; },
                               [](double) { return 0.0; }, [](double) { return 0.0; }, OracleOptions{0}),
                    DomainError);
}

TEST_CASE("Frame rotations are inverse pairs") {
    const Grid g{16, 16, 1.0, 1.0};
    const PhaseParams ph{2.0 * M_PI, 0.7};
    ChannelPair f{Vec::LinSpaced(16, -1.0, 2.0), Vec::LinSpaced(16, 3.0, 0.5)};
    ChannelPair s{Vec::LinSpaced(16, 0.2, 0.9), Vec::LinSpaced(16, -2.0, 1.0)};
    // At a common point the in and out rotations undo each other.
    const ChannelPair fb = rotate_field(FrameDirection::out, ph, g, 0.3, rotate_field(FrameDirection::in, ph, g, 0.3, f));
    const ChannelPair sb = rotate_spin(FrameDirection::out, ph, g, 0.4, rotate_spin(FrameDirection::in, ph, g, 0.4, s));
    CHECK((fb.first - f.first).norm() < 1e-13);
    CHECK((fb.second - f.second).norm() < 1e-13);
    CHECK((sb.first - s.first).norm() < 1e-13);
    CHECK((sb.second - s.second).norm() < 1e-13);
    // The boundary rotations act at z = 0, t = 0 (in) and z = L, t = T (out), so they
    // only cancel when both phases advance by whole turns across the cell.
    const PhaseParams turns{2.0 * M_PI, 2.0 * M_PI};
    const auto in = rotate_frame(FrameDirection::in, turns, g, f, s);
    const auto back = rotate_frame(FrameDirection::out, turns, g, in.first, in.second);
    CHECK((back.first.first - f.first).norm() < 1e-12);
    CHECK((back.second.second - s.second).norm() < 1e-12);
    const auto skew = rotate_frame(FrameDirection::out, ph, g, rotate_frame(FrameDirection::in, ph, g, f, s).first,
                                   rotate_frame(FrameDirection::in, ph, g, f, s).second);
    CHECK((skew.second.second - s.second).norm() > 0.1);
    CHECK_THROWS_AS(rotate_field(FrameDirection::in, ph, g, 0.0, ChannelPair{Vec::Zero(3), Vec::Zero(3)}), DimensionError);
}
