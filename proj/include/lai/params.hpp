// SPDX-License-Identifier: MIT
/**
 * @file params.hpp
 * @brief Classical interface parameters and the discretisation grid.
 *
 * All quantities are in consistent user units (the physics depends only on
 * dimensionless products such as ATL and kappa1*L).  Field fluxes are in
 * photons per unit time, spin densities in angular momentum per unit length.
 */
#pragma once

#include <cmath>
#include <string>

#include "lai/errors.hpp"
#include "lai/halfint.hpp"

namespace lai {

/**
 * @brief Uniform midpoint grid: n_t time cells on [0, T], n_z space cells on [0, L].
 *
 * Samples represent cell averages; point values are attached to midpoints.
 */
struct Grid {
    int n_t = 0;
    int n_z = 0;
    double T = 1.0;
    double L = 1.0;

    double dt() const { return T / n_t; }
    double dz() const { return L / n_z; }
    double t_mid(int i) const { return (i + 0.5) * dt(); }
    double z_mid(int i) const { return (i + 0.5) * dz(); }

    void validate() const {
        if (n_t < 2 || n_z < 2)
            throw DomainError("Grid: need n_t, n_z >= 2 (got " + std::to_string(n_t) + ", " + std::to_string(n_z) + ")");
        if (!(T > 0.0) || !(L > 0.0)) throw DomainError("Grid: T and L must be positive");
    }
    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n_t == b.n_t && a.n_z == b.n_z && a.T == b.T && a.L == b.L;
    }
};

/**
 * @brief Classical parameter set of the linearised light–atom interface.
 *
 * A is stored but always derivable: A = -2 cbar13 eps^2 Xi2_bar Fz_bar.
 */
struct InterfaceParams {
    double epsilon = 1.0;   ///< alignment coupling constant
    double kappa1 = 0.0;    ///< gyrotropy constant [1/length]
    double Omega1 = 0.0;    ///< light shift [rad/time]
    double OmegaBar = 0.0;  ///< 2 Omega0 + Omega1 [rad/time]
    double Xi2_bar = 1.0;   ///< mean circular Stokes flux [photons/time]
    double Fz_bar = 1.0;    ///< mean spin density [angular momentum/length]
    double cbar13 = 0.5;    ///< collective alignment coefficient
    double A = 0.0;         ///< cooperative parameter [1/(length time)]
    double L = 1.0;         ///< sample length
    double T = 1.0;         ///< interaction time
    double S0 = 1.0;        ///< beam cross section
    double N_A = 0.0;       ///< number of atoms
    double N_P = 0.0;       ///< number of probe photons
    HalfInt F0 = HalfInt::integer(1);
    bool degenerate = true;  ///< 2 Omega0 + Omega1 = 0 during the interaction (forces OmegaBar = 0)

    double ATL() const { return A * T * L; }
    /** @brief Light coupling a = 2 eps Xi2_bar of the rotated-frame equations. */
    double a_coef() const { return 2.0 * epsilon * Xi2_bar; }
    /** @brief Spin coupling b = cbar13 eps Fz_bar of the rotated-frame equations. */
    double b_coef() const { return cbar13 * epsilon * Fz_bar; }
    double omega_bar_effective() const { return degenerate ? 0.0 : OmegaBar; }
};

/** @brief A = -2 cbar13 eps^2 Xi2_bar Fz_bar. */
inline double cooperative_A(const InterfaceParams& p) {
    return -2.0 * p.cbar13 * p.epsilon * p.epsilon * p.Xi2_bar * p.Fz_bar;
}

/** @brief Recompute the derived members A, N_P and N_A after a parameter update. */
inline InterfaceParams refresh(InterfaceParams p) {
    p.A = cooperative_A(p);
    p.N_P = p.Xi2_bar * p.T;
    p.N_A = std::abs(p.Fz_bar * p.L) / p.F0.value();
    return p;
}

/**
 * @brief Solve for Xi2_bar so that A T L equals the requested value.
 *
 * eps, Fz_bar, cbar13, T and L are taken from @p base.  The sign of ATL must
 * be opposite to the sign of Fz_bar since Xi2_bar > 0.
 * @throws DomainError if the requested sign is unreachable or ATL = 0.
 */
inline InterfaceParams params_for_ATL(double ATL, InterfaceParams base) {
    if (ATL == 0.0) throw DomainError("params_for_ATL: ATL must be nonzero");
    const double denom = -2.0 * base.cbar13 * base.epsilon * base.epsilon * base.Fz_bar * base.T * base.L;
    if (denom == 0.0) throw DomainError("params_for_ATL: eps, Fz_bar, cbar13, T, L must be nonzero");
    const double xi2 = ATL / denom;
    if (!(xi2 > 0.0))
        throw DomainError("params_for_ATL: ATL=" + std::to_string(ATL) + " needs Fz_bar of opposite sign (Xi2_bar > 0)");
    base.Xi2_bar = xi2;
    return refresh(base);
}

/** @brief Snap the gyrotropy so that kappa1 L is the nearest nonzero-or-zero multiple of 2 pi. */
inline InterfaceParams snap_optimal_retrieval(InterfaceParams p) {
    const double turns = std::round(p.kappa1 * p.L / (2.0 * M_PI));
    p.kappa1 = 2.0 * M_PI * turns / p.L;
    return p;
}

}  // namespace lai
