// SPDX-License-Identifier: MIT
/**
 * @file bessel.hpp
 * @brief Cylindrical Bessel functions J0, J1, I0, I1 and the entire-function
 *        family that builds the light–atom transfer kernels.
 *
 * J0/J1 use Miller's backward recurrence normalised by the Neumann sum
 * J0 + 2 sum J_2k = 1 (short power series near the origin, Hankel
 * asymptotics far out); I0/I1 use their positive power series, switching to
 * the asymptotic expansion for large arguments.
 */
#pragma once

#include <cmath>
#include <string>

#include "lai/errors.hpp"

namespace lai {

/** @brief Which Bessel function to evaluate. */
enum class BesselKind { J0, J1, I0, I1 };

namespace detail {

inline void bessel_check(double x, const char* name) {
    if (!(x >= 0.0) || std::isnan(x))
        throw DomainError(std::string("bessel: ") + name + " requires x >= 0, got " + std::to_string(x));
}

/** @brief Power series sum_k s^k (x/2)^(2k+n) / (k! (k+n)!), s = -1 for J, +1 for I. */
inline double bessel_series(int n, double x, double s) {
    const double h = 0.5 * x;
    const double h2 = h * h;
    double term = (n == 0) ? 1.0 : h;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= s * h2 / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

/** @brief Hankel asymptotic expansion for J_n, n in {0, 1}, large x. */
inline double bessel_j_hankel(int n, double x) {
    const double mu = 4.0 * n * n;
    double p = 1.0, q = 0.0, term = 1.0;
    for (int k = 1; k < 30; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        if (k % 2 == 1) {
            q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        } else {
            p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        }
        if (std::abs(term) < 1e-17) break;
    }
    const double chi = x - (0.5 * n + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

/** @brief Miller backward recurrence returning (J0, J1). */
inline void bessel_j_miller(double x, double& j0, double& j1) {
    int start = static_cast<int>(x + 40.0 + 12.0 * std::sqrt(x));
    if (start % 2 == 1) ++start;
    double jp1 = 0.0, jk = 1e-30, norm = 0.0;
    double r0 = 0.0, r1 = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm1 = (2.0 * k / x) * jk - jp1;  // J_{k-1}
        jp1 = jk;
        jk = jm1;
        if (std::abs(jk) > 1e250) {  // rescale to avoid overflow
            jk *= 1e-250; jp1 *= 1e-250; norm *= 1e-250; r1 *= 1e-250;
        }
        if (k - 1 == 1) r1 = jk;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jk;
    }
    r0 = jk;
    norm += r0;
    j0 = r0 / norm;
    j1 = r1 / norm;
}

inline double bessel_i_asymptotic(int n, double x) {
    const double mu = 4.0 * n * n;
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < 30; ++k) {
        term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        sum += term;
        if (std::abs(term) < 1e-17) break;
    }
    return std::exp(x) / std::sqrt(2.0 * M_PI * x) * sum;
}

}  // namespace detail

/**
 * @brief Evaluate J0, J1, I0 or I1 at x >= 0.
 * @throws DomainError for negative or NaN x.
 */
inline double bessel(BesselKind kind, double x) {
    switch (kind) {
        case BesselKind::J0:
        case BesselKind::J1: {
            detail::bessel_check(x, kind == BesselKind::J0 ? "J0" : "J1");
            const int n = (kind == BesselKind::J0) ? 0 : 1;
            if (x < 2.0) return detail::bessel_series(n, x, -1.0);
            if (x > 1000.0) return detail::bessel_j_hankel(n, x);
            double j0 = 0.0, j1 = 0.0;
            detail::bessel_j_miller(x, j0, j1);
            return n == 0 ? j0 : j1;
        }
        case BesselKind::I0:
        case BesselKind::I1: {
            detail::bessel_check(x, kind == BesselKind::I0 ? "I0" : "I1");
            const int n = (kind == BesselKind::I0) ? 0 : 1;
            if (x <= 100.0) return detail::bessel_series(n, x, 1.0);
            return detail::bessel_i_asymptotic(n, x);
        }
    }
    throw DomainError("bessel: unknown kind");
}

inline double bessel_j0(double x) { return bessel(BesselKind::J0, x); }
inline double bessel_j1(double x) { return bessel(BesselKind::J1, x); }
inline double bessel_i0(double x) { return bessel(BesselKind::I0, x); }
inline double bessel_i1(double x) { return bessel(BesselKind::I1, x); }

/**
 * @brief Entire functions E_pq(w) = sum_k (eta w)^k / ((k+p)! (k+q)!), w >= 0.
 *
 * With x = 2 sqrt(w) and eta = -1 (oscillatory branch) or +1 (growing
 * branch) these are the Riemann function of the Goursat problem and its
 * successive integrals:
 *   E00 = J0(x) | I0(x),   E01 = J1(x)/sqrt(w) | I1(x)/sqrt(w),
 *   E11 = (1 - J0)/w | (I0 - 1)/w,   E12 = (1 - E01)/w | (E01 - 1)/w.
 * Small arguments use the series, larger ones the Bessel closed forms.
 */
namespace kernel {

inline double series(int p, int q, double eta, double w) {
    double denom0 = 1.0;
    for (int i = 2; i <= p; ++i) denom0 *= i;
    for (int i = 2; i <= q; ++i) denom0 *= i;
    double term = 1.0 / denom0, sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= eta * w / (static_cast<double>(k + p) * (k + q));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

inline double e00(double eta, double w) {
    if (w <= 1.0) return series(0, 0, eta, w);
    const double x = 2.0 * std::sqrt(w);
    return eta < 0 ? bessel_j0(x) : bessel_i0(x);
}

inline double e01(double eta, double w) {
    if (w <= 1.0) return series(0, 1, eta, w);
    const double x = 2.0 * std::sqrt(w);
    return (eta < 0 ? bessel_j1(x) : bessel_i1(x)) / std::sqrt(w);
}

inline double e11(double eta, double w) {
    if (w <= 1.0) return series(1, 1, eta, w);
    return eta < 0 ? (1.0 - e00(eta, w)) / w : (e00(eta, w) - 1.0) / w;
}

inline double e12(double eta, double w) {
    if (w <= 1.0) return series(1, 2, eta, w);
    return eta < 0 ? (1.0 - e01(eta, w)) / w : (e01(eta, w) - 1.0) / w;
}

}  // namespace kernel

}  // namespace lai
