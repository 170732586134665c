// SPDX-License-Identifier: MIT
/**
 * @file angular.hpp
 * @brief Exact angular-momentum algebra: Clebsch–Gordan and 6j coefficients,
 *        the commutator algebra of irreducible spin tensors, and the
 *        alignment coefficients c1, c3 and cbar13.
 *
 * Coefficients are evaluated with the Racah sums in exact rational
 * arithmetic (arbitrary precision integers) and are converted to floating
 * point only at the API boundary.  Phases follow the Condon–Shortley
 * convention.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "lai/errors.hpp"
#include "lai/halfint.hpp"

namespace lai {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/**
 * @brief Exact real number of the form sign * sqrt(square), square >= 0 rational.
 *
 * Both CG and 6j coefficients are of this form.
 */
struct SignedSqrtRational {
    int sign = 0;          ///< -1, 0 or +1
    Rational square = 0;   ///< value squared

    double to_double() const {
        if (sign == 0) return 0.0;
        const long double num = static_cast<long double>(boost::multiprecision::numerator(square));
        const long double den = static_cast<long double>(boost::multiprecision::denominator(square));
        return static_cast<double>(sign * std::sqrt(num / den));
    }
    friend bool operator==(const SignedSqrtRational& a, const SignedSqrtRational& b) {
        return a.sign == b.sign && (a.sign == 0 || a.square == b.square);
    }
};

/** @brief Alignment coefficients of a ground hyperfine level. */
struct CouplingCoefficients {
    Rational c1_exact;       ///< 3 / [F0(F0+1)(2F0+1)]
    double c1 = 0.0;
    double c3 = 0.0;         ///< weight of T_30 in [T_xy, T_xieta]; zero for F0 = 1
    Rational cbar13_exact;   ///< 15 / [F0(F0+1)(2F0+1)(2F0+3)]
    double cbar13 = 0.0;
};

/** @brief One term coefficient * T_{K''Q''} of a tensor commutator expansion. */
struct TensorTerm {
    int K = 0;
    int Q = 0;
    double coefficient = 0.0;
};

namespace detail {

inline BigInt factorial(int n) {
    if (n < 0) throw DomainError("angular: factorial of negative argument");
    BigInt r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/** @brief Validate a (j, m) pair given as doubled integers. */
inline void check_jm(HalfInt j, HalfInt m, const char* ctx) {
    if (j.twice_value < 0)
        throw DomainError(std::string(ctx) + ": negative angular momentum " + j.str());
    if (((j.twice_value - m.twice_value) % 2) != 0)
        throw DomainError(std::string(ctx) + ": j=" + j.str() + " and m=" + m.str() + " have inconsistent parity");
    if (std::abs(m.twice_value) > j.twice_value)
        throw DomainError(std::string(ctx) + ": |m| > j for j=" + j.str() + ", m=" + m.str());
}

inline void check_j(HalfInt j, const char* ctx) {
    if (j.twice_value < 0) throw DomainError(std::string(ctx) + ": negative angular momentum " + j.str());
}

/** @brief Triangle condition with integer perimeter (all in doubled units). */
inline bool triangle(int a2, int b2, int c2) {
    if ((a2 + b2 + c2) % 2 != 0) return false;
    return c2 >= std::abs(a2 - b2) && c2 <= a2 + b2;
}

/** @brief Squared triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!. */
inline Rational triangle_delta_sq(int a2, int b2, int c2) {
    return Rational(factorial((a2 + b2 - c2) / 2) * factorial((a2 - b2 + c2) / 2) * factorial((-a2 + b2 + c2) / 2),
                    factorial((a2 + b2 + c2) / 2 + 1));
}

inline SignedSqrtRational from_parts(const Rational& prefactor_sq, const Rational& sum) {
    SignedSqrtRational r;
    if (sum == 0 || prefactor_sq == 0) return r;
    r.sign = sum > 0 ? 1 : -1;
    r.square = prefactor_sq * sum * sum;
    return r;
}

}  // namespace detail

/**
 * @brief Exact Clebsch–Gordan coefficient <j1 m1 j2 m2 | J M>.
 * @throws DomainError for malformed (j, m) pairs.
 */
inline SignedSqrtRational clebsch_gordan_exact(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    detail::check_jm(j1, m1, "clebsch_gordan");
    detail::check_jm(j2, m2, "clebsch_gordan");
    detail::check_jm(J, M, "clebsch_gordan");
    if (m1.twice_value + m2.twice_value != M.twice_value) return {};
    if (!detail::triangle(j1.twice_value, j2.twice_value, J.twice_value)) return {};

    const int a = j1.twice_value, b = j2.twice_value, c = J.twice_value;
    const int ma = m1.twice_value, mb = m2.twice_value, mc = M.twice_value;
    using detail::factorial;
    const Rational pref = Rational(c + 1) * detail::triangle_delta_sq(a, b, c) *
                          Rational(factorial((c + mc) / 2) * factorial((c - mc) / 2) * factorial((a - ma) / 2) *
                                   factorial((a + ma) / 2) * factorial((b - mb) / 2) * factorial((b + mb) / 2));
    // Summation range: all factorial arguments non-negative.
    const int k_min = std::max({0, (b - c - ma) / 2, (a - c + mb) / 2});
    const int k_max = std::min({(a + b - c) / 2, (a - ma) / 2, (b + mb) / 2});
    Rational sum = 0;
    for (int k = k_min; k <= k_max; ++k) {
        const BigInt den = factorial(k) * factorial((a + b - c) / 2 - k) * factorial((a - ma) / 2 - k) *
                           factorial((b + mb) / 2 - k) * factorial((c - b + ma) / 2 + k) *
                           factorial((c - a - mb) / 2 + k);
        sum += Rational((k % 2 == 0) ? 1 : -1, den);
    }
    return detail::from_parts(pref, sum);
}

/** @brief Clebsch–Gordan coefficient as a double. */
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    return clebsch_gordan_exact(j1, m1, j2, m2, J, M).to_double();
}

/**
 * @brief Exact Wigner 6j symbol {j1 j2 j3; j4 j5 j6} from the Racah formula.
 *
 * Returns zero when any of the four triads violates the triangle rule.
 */
inline SignedSqrtRational wigner6j_exact(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
    for (HalfInt j : {j1, j2, j3, j4, j5, j6}) detail::check_j(j, "wigner6j");
    const int a = j1.twice_value, b = j2.twice_value, c = j3.twice_value;
    const int d = j4.twice_value, e = j5.twice_value, f = j6.twice_value;
    using detail::triangle;
    if (!triangle(a, b, c) || !triangle(a, e, f) || !triangle(d, b, f) || !triangle(d, e, c)) return {};

    const Rational pref = detail::triangle_delta_sq(a, b, c) * detail::triangle_delta_sq(a, e, f) *
                          detail::triangle_delta_sq(d, b, f) * detail::triangle_delta_sq(d, e, c);
    const int s1 = (a + b + c) / 2, s2 = (a + e + f) / 2, s3 = (d + b + f) / 2, s4 = (d + e + c) / 2;
    const int p1 = (a + b + d + e) / 2, p2 = (a + c + d + f) / 2, p3 = (b + c + e + f) / 2;
    const int t_min = std::max({s1, s2, s3, s4});
    const int t_max = std::min({p1, p2, p3});
    using detail::factorial;
    Rational sum = 0;
    for (int t = t_min; t <= t_max; ++t) {
        const BigInt den = factorial(t - s1) * factorial(t - s2) * factorial(t - s3) * factorial(t - s4) *
                           factorial(p1 - t) * factorial(p2 - t) * factorial(p3 - t);
        const BigInt num = factorial(t + 1);
        sum += Rational((t % 2 == 0) ? num : BigInt(-num), den);
    }
    return detail::from_parts(pref, sum);
}

/** @brief Wigner 6j symbol as a double. */
inline double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
    return wigner6j_exact(j1, j2, j3, j4, j5, j6).to_double();
}

/**
 * @brief Alignment coefficients c1, c3 and cbar13 of a ground level F0.
 * @throws DomainError for F0 < 1 (no alignment exists).
 */
inline CouplingCoefficients alignment_coefficients(HalfInt F0) {
    if (F0.twice_value < 2)
        throw DomainError("alignment_coefficients: F0=" + F0.str() + " has no rank-2 alignment (need F0 >= 1)");
    const int f2 = F0.twice_value;  // 2 F0
    // Work with doubled values: F0(F0+1)(2F0+1) = f2 (f2+2) (f2+1) / 4.
    CouplingCoefficients cc;
    cc.c1_exact = Rational(3 * 4, BigInt(f2) * (f2 + 2) * (f2 + 1));
    cc.cbar13_exact = Rational(15 * 4, BigInt(f2) * (f2 + 2) * (f2 + 1) * (f2 + 3));
    cc.c1 = static_cast<double>(cc.c1_exact);
    cc.cbar13 = static_cast<double>(cc.cbar13_exact);
    // c3 = -6 sqrt[(F0-1)(F0+2)] / sqrt[7 F0 (F0+1)(2F0-1)(2F0+1)(2F0+3)], exact under the root.
    const Rational num_sq = Rational(36) * Rational(BigInt(f2 - 2) * (f2 + 4), 4);
    const Rational den_sq = Rational(7) * Rational(BigInt(f2) * (f2 + 2), 4) * (f2 - 1) * (f2 + 1) * (f2 + 3);
    const Rational c3_sq = num_sq / den_sq;
    cc.c3 = (c3_sq == 0) ? 0.0 : -SignedSqrtRational{1, c3_sq}.to_double();
    return cc;
}

/**
 * @brief Expansion of the single-atom commutator [T_KQ, T_K'Q'] over T_K''Q''.
 *
 * Only K'' with K+K'+K'' odd contribute; Q'' = Q + Q'.  Terms with a zero
 * coefficient are omitted.
 * @throws DomainError when a rank lies outside [0, 2 F0] or is not integer.
 */
inline std::vector<TensorTerm> tensor_commutator(HalfInt F0, HalfInt K, HalfInt Q, HalfInt Kp, HalfInt Qp) {
    detail::check_j(F0, "tensor_commutator");
    for (HalfInt r : {K, Q, Kp, Qp})
        if (!r.is_integer()) throw DomainError("tensor_commutator: ranks and projections must be integers, got " + r.str());
    for (HalfInt r : {K, Kp})
        if (r.twice_value < 0 || r.twice_value > 2 * F0.twice_value)
            throw DomainError("tensor_commutator: rank " + r.str() + " outside [0, 2F0] for F0=" + F0.str());
    if (std::abs(Q.twice_value) > K.twice_value || std::abs(Qp.twice_value) > Kp.twice_value)
        throw DomainError("tensor_commutator: projection exceeds rank");

    const int k = K.twice_value / 2, kp = Kp.twice_value / 2;
    const int q2 = Q.twice_value / 2 + Qp.twice_value / 2;
    const int two_f0 = F0.twice_value;
    std::vector<TensorTerm> out;
    for (int k2 = std::abs(k - kp); k2 <= std::min(k + kp, two_f0); ++k2) {
        if ((k + kp + k2) % 2 == 0) continue;  // factor [1 - (-1)^(K+K'+K'')] vanishes
        if (std::abs(q2) > k2) continue;
        const auto sixj = wigner6j_exact(K, Kp, HalfInt::integer(k2), F0, F0, F0);
        const auto cg = clebsch_gordan_exact(K, Q, Kp, Qp, HalfInt::integer(k2), HalfInt::integer(q2));
        if (sixj.sign == 0 || cg.sign == 0) continue;
        // (-1)^(2F0 + K''): 2F0 is an integer.
        const int phase = ((two_f0 + k2) % 2 == 0) ? 1 : -1;
        const Rational mag_sq = Rational((2 * k + 1) * (2 * kp + 1)) * 4 * sixj.square * cg.square;
        const SignedSqrtRational term{phase * sixj.sign * cg.sign, mag_sq};
        out.push_back({k2, q2, term.to_double()});
    }
    return out;
}

/**
 * @brief Expectation value <F0 F0| T_K0 |F0 F0> in the stretched Zeeman state.
 *
 * Used to convert the single-atom algebra into the collective coefficient
 * cbar13 (mean T_30 density relative to mean F_z density).
 */
inline double stretched_tensor_expectation(HalfInt F0, int K) {
    const auto cg = clebsch_gordan_exact(F0, F0, HalfInt::integer(K), HalfInt::integer(0), F0, F0);
    const SignedSqrtRational v{cg.sign, cg.square * Rational(2 * K + 1, F0.twice_value + 1)};
    return v.to_double();
}

/**
 * @brief Re-derive (c1, c3, cbar13) from the tensor commutator algebra.
 *
 * [T_xy, T_xieta] = (i/2)[T_22, T_2-2] is expanded over T_10 and T_30; the
 * T_10 weight is converted to F_z = sqrt(F0(F0+1)(2F0+1)/3) T_10, and the
 * collective coefficient follows from the stretched-state ratio
 * <T_30>/<F_z>.  Independent of the closed forms in alignment_coefficients.
 */
inline CouplingCoefficients alignment_from_tensor_algebra(HalfInt F0) {
    if (F0.twice_value < 2)
        throw DomainError("alignment_from_tensor_algebra: F0=" + F0.str() + " has no rank-2 alignment");
    const auto terms = tensor_commutator(F0, HalfInt::integer(2), HalfInt::integer(2), HalfInt::integer(2),
                                         HalfInt::integer(-2));
    double w1 = 0.0, w3 = 0.0;
    for (const auto& t : terms) {
        if (t.K == 1) w1 = 0.5 * t.coefficient;
        if (t.K == 3) w3 = 0.5 * t.coefficient;
    }
    const double f = F0.value();
    const double fz_norm = std::sqrt(f * (f + 1) * (2 * f + 1) / 3.0);  // F_z = fz_norm * T_10
    CouplingCoefficients cc;
    cc.c1 = w1 / fz_norm;
    cc.c3 = w3;
    const double fz_mean = fz_norm * stretched_tensor_expectation(F0, 1);
    cc.cbar13 = cc.c1 + cc.c3 * stretched_tensor_expectation(F0, 3) / fz_mean;
    return cc;
}

}  // namespace lai
