// SPDX-License-Identifier: MIT
// Line-data parsing, polarizability sums, the gyrotropy zero and the
// feasibility thresholds.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "lai/coupling.hpp"

using namespace lai;

namespace {

const std::string kData = LAI_SOURCE_DIR "/data/rb87_d1.lines";

LineTable parse(const std::string& text) {
    std::istringstream in(text);
    return parse_line_table(in, "test.lines");
}

void expect_config_error(const std::string& text, const std::string& fragment) {
    try {
        parse(text);
        FAIL("no ConfigError for: " << text);
    } catch (const ConfigError& e) {
        INFO(e.what());
        CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("Line tables: malformed records are reported with their location") {
    expect_config_error("reference_MHz 1\nbogus 3\n", "test.lines:2");
    expect_config_error("reference_MHz 1\nline 1 1 x 1\n", "bad number");
    expect_config_error("line 1 1 0 1\n", "must precede");
    expect_config_error("reference_MHz 1e8\nline 1 3 0 1\n", "dipole transition");
    expect_config_error("reference_MHz 1e8\nline 1 1 0\n", "expected 'line");
    expect_config_error("reference_MHz 1e8\nline 1 1 0 -1\n", "non-negative");
    CHECK_THROWS_AS(load_line_table(LAI_SOURCE_DIR "/tests/data/empty.lines"), ConfigError);
    CHECK_THROWS_AS(load_line_table(LAI_SOURCE_DIR "/tests/data/no_such_file.lines"), ConfigError);
}

TEST_CASE("The shipped D1 table parses with fractional weights") {
    const LineTable t = load_line_table(kData);
    REQUIRE(t.lines.size() == 4);
    CHECK(t.name == "Rb87_D1");
    CHECK(t.lines[0].d_F0F_sq == Catch::Approx(t.dipole_sq_scale / 6.0).epsilon(1e-15));
    CHECK(t.lines[1].F.twice_value == 4);
}

TEST_CASE("A single line gives a single pole and one sign on each side") {
    const LineTable t = load_line_table(LAI_SOURCE_DIR "/tests/data/single.lines");
    const HalfInt F0 = HalfInt::integer(1);
    auto k = [&](double det) { return kappa1(t.lines, t.omega_at(det), 1.0, 1.0, F0); };
    int changes_left = 0, changes_right = 0;
    for (double d = -3000.0; d + 7.0 < 0.0; d += 7.0) changes_left += (k(d) * k(d + 7.0) < 0.0);
    for (double d = 1.0; d + 7.0 < 3000.0; d += 7.0) changes_right += (k(d) * k(d + 7.0) < 0.0);
    CHECK(changes_left == 0);
    CHECK(changes_right == 0);
    CHECK(k(-1.0) * k(1.0) < 0.0);
    CHECK_THROWS_AS(kappa1_zero_MHz(t, F0, -700.0, -10.0), NumericError);
    CHECK_THROWS_AS(kappa1(t.lines, t.lines[0].omega_FF0, 1.0, 1.0, F0), SingularityError);
}

TEST_CASE("Light shift and gyrotropy share the orientation sum") {
    const LineTable t = load_line_table(kData);
    const HalfInt F0 = HalfInt::integer(1);
    for (double det : {-2500.0, -400.0, 300.0, 2200.0}) {
        const double w = t.omega_at(det);
        const double k1 = kappa1(t.lines, w, 0.01, 1e10, F0), o1 = omega1(t.lines, w, 0.01, 1e12, F0);
        CHECK(o1 / k1 == Catch::Approx(1e12 / 1e10).epsilon(1e-12));
    }
}

TEST_CASE("Polarizability sums are additive over lines and fall off as 1/detuning") {
    const LineTable t = load_line_table(kData);
    const HalfInt F0 = HalfInt::integer(1);
    const double w = t.omega_at(-1234.0);
    double sum = 0.0;
    for (const auto& l : t.lines) sum += kappa1({l}, w, 1.0, 1.0, F0);
    CHECK(kappa1(t.lines, w, 1.0, 1.0, F0) == Catch::Approx(sum).epsilon(1e-13));
    double esum = 0.0;
    for (const auto& l : t.lines) esum += epsilon({l}, w, 1.0, F0);
    CHECK(epsilon(t.lines, w, 1.0, F0) == Catch::Approx(esum).epsilon(1e-13));
    // Far detuned: doubling the detuning halves the orientation sum (the optical frequency barely changes),
    // while the rank-2 sum of an unresolved J=1/2 -> 1/2 line cancels at leading order and falls faster.
    const double k1 = kappa1(t.lines, t.omega_at(-2e5), 1.0, 1.0, F0), k2 = kappa1(t.lines, t.omega_at(-4e5), 1.0, 1.0, F0);
    CHECK(k1 / k2 == Catch::Approx(2.0).epsilon(0.02));
    const double e1 = epsilon(t.lines, t.omega_at(-2e5), 1.0, F0), e2 = epsilon(t.lines, t.omega_at(-4e5), 1.0, F0);
    CHECK(std::abs(e1 / e2) > 2.0);
    // Scaling with the cross-section.
    CHECK(epsilon(t.lines, w, 2.0, F0) == Catch::Approx(0.5 * epsilon(t.lines, w, 1.0, F0)).epsilon(1e-14));
    CHECK_THROWS_AS(epsilon(t.lines, w, 0.0, F0), DomainError);
}

TEST_CASE("kappa1 vanishes about 200 MHz below the F0=1 -> F=1 line") {
    const LineTable t = load_line_table(kData);
    const double z = kappa1_zero_MHz(t, HalfInt::integer(1), -700.0, -10.0);
    CHECK(z > -225.0);
    CHECK(z < -185.0);
    CHECK(std::abs(kappa1(t.lines, t.omega_at(z), 1.0, 1.0, HalfInt::integer(1))) <
          1e-6 * std::abs(kappa1(t.lines, t.omega_at(-700.0), 1.0, 1.0, HalfInt::integer(1))));
    // A bracket that straddles the pole at 0 MHz has a sign change but no zero.
    CHECK_THROWS_AS(kappa1_zero_MHz(t, HalfInt::integer(1), -150.0, 300.0), NumericError);
}

TEST_CASE("Operational inequality thresholds") {
    CHECK(much_less(0.05) == Status::pass);
    CHECK(much_less(0.5) == Status::warn);
    CHECK(much_less(1.0) == Status::warn);
    CHECK(much_less(1.5) == Status::fail);
    CHECK(much_greater(20.0) == Status::pass);
    CHECK(much_greater(5.0) == Status::warn);
    CHECK(much_greater(1.0) == Status::warn);
    CHECK(much_greater(0.5) == Status::fail);
}

TEST_CASE("Feasibility report collects the worst status") {
    InterfaceParams w;
    w.epsilon = 1e-6;
    w.N_A = 1e12;
    w.N_P = 1e13;
    w.S0 = 0.01;
    InterfaceParams r = w;
    r.N_P = 1e11;
    CrossSections cs{1e-16, 1e-16, 1e-5};
    const FeasibilityReport ok = feasibility_check(w, r, cs);
    CHECK(ok.items.size() == 7);
    r.N_P = 2e13;  // N_P' << N_P violated
    const FeasibilityReport bad = feasibility_check(w, r, cs);
    CHECK(bad.overall == Status::fail);
    cs.lambda_bar = 0.0;
    CHECK_THROWS_AS(feasibility_check(w, r, cs), DomainError);
}

TEST_CASE("The cooperative parameter sign follows -Fz") {
    InterfaceParams p;
    p.Fz_bar = 2.0;
    CHECK(cooperative_A(p) < 0.0);
    p.Fz_bar = -2.0;
    CHECK(cooperative_A(p) > 0.0);
    p.cbar13 = 0.25;
    p.epsilon = 3.0;
    p.Xi2_bar = 5.0;
    CHECK(cooperative_A(p) == Catch::Approx(-2.0 * 0.25 * 9.0 * 5.0 * -2.0));
    CHECK_THROWS_AS(params_for_ATL(-10.0, p), DomainError);  // Fz < 0 cannot give A < 0
    CHECK(params_for_ATL(10.0, p).ATL() == Catch::Approx(10.0));
}
