// SPDX-License-Identifier: MIT
/**
 * @file entangle.hpp
 * @brief Light–atom entanglement for A > 0: EPR variances, optimal mode pair, witness.
 *
 * The EPR combinations are
 *   X = int h Xi_I^out dt - int g T_I^out dz,   P = int h Xi_III^out dt + int g T_III^out dz,
 * built from shot-normalised collective quadratures so that uncorrelated
 * vacua give Var X = Var P = 2.  For vacuum inputs the variances equal the
 * squared norm of the adjoint-transfer residual of the mode pair, so the
 * minimum-variance pair is the least-squares solution of the homogeneous
 * mode equations.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lai/errors.hpp"
#include "lai/params.hpp"
#include "lai/propagator.hpp"
#include "lai/spectral.hpp"

namespace lai {

/** @brief Temporal mode h (light) and spatial mode g (spin), unit norm in the discrete L2 norm. */
struct ModePair {
    Vec h;
    Vec g;
    double residual = 0.0;        ///< sqrt(objective / 2): RMS of the discretised mode-equation residuals
    std::vector<double> history;  ///< objective V1 + V3 after every sweep (first entry: initial guess)
    int iterations = 0;
};

/** @brief Entanglement scenario: Xi2_bar solved from ATL > 0 with Fz_bar < 0, kappa1 L snapped to 2 pi k. */
inline InterfaceParams entangle_params(double ATL, InterfaceParams base = {}) {
    if (!(ATL > 0.0)) throw DomainError("entangle_params: the entanglement scenario needs ATL > 0");
    base.Fz_bar = -std::abs(base.Fz_bar);
    return params_for_ATL(ATL, snap_optimal_retrieval(base));
}

/** @brief Vacuum light and coherent spins through the A > 0 transfer. */
inline GaussianState run_entangle(const InterfaceParams& p, const Grid& grid) {
    if (!(cooperative_A(p) > 0.0)) throw DomainError("run_entangle: requires A > 0 (Fz_bar < 0)");
    return propagate(input_state(p, grid, SqueezedInput::vacuum(), true), build_transfer(p, grid));
}

/** @brief Flat (Omega = 0, q = 0 collective) mode pair. */
inline ModePair collective_modes(const Grid& grid) {
    ModePair m;
    m.h = Vec::Constant(grid.n_t, 1.0 / std::sqrt(grid.T));
    m.g = Vec::Constant(grid.n_z, 1.0 / std::sqrt(grid.L));
    return m;
}

namespace detail {

/** @brief Rows mapping the stacked state to (X_h, P_h, X_g, P_g), shot-normalised. */
inline Mat mode_weights(const GaussianState& s, const ModePair& m) {
    const int nt = s.n_t(), nz = s.n_z();
    if (m.h.size() != nt || m.g.size() != nz) throw DimensionError("mode pair does not match the state grid");
    const double fw = s.grid.dt() / std::sqrt(s.shot_level(Channel::Xi_I));
    const double sw = s.grid.dz() / std::sqrt(s.shot_level(Channel::T_I));
    Mat W = Mat::Zero(4, s.size());
    W.block(0, s.offset(Channel::Xi_I), 1, nt) = fw * m.h.transpose();
    W.block(1, s.offset(Channel::Xi_III), 1, nt) = fw * m.h.transpose();
    W.block(2, s.offset(Channel::T_I), 1, nz) = sw * m.g.transpose();
    W.block(3, s.offset(Channel::T_III), 1, nz) = sw * m.g.transpose();
    return W;
}

/**
 * @brief min over unit x of x^T A x - 2 x^T c, given A = U diag(lam) U^T (lam ascending).
 *
 * The minimiser is x = (A - mu I)^{-1} c with mu < lam_min and |x| = 1
 * (secular equation, solved by safeguarded bisection on mu).
 */
inline Vec sphere_quadratic_min(const Mat& U, const Vec& lam, const Vec& c) {
    const Vec ct = U.transpose() * c;
    const double cn = ct.norm();
    if (cn <= 1e-300) return U.col(0);
    auto norm_at = [&](double mu) { return (ct.array() / (lam.array() - mu)).matrix().norm(); };
    double lo = lam(0) - cn - 1.0, hi = lam(0);
    if (std::abs(ct(0)) <= 1e-14 * cn) {
        // Possible hard case: the boundary solution may need an eigenvector component.
        Vec y = Vec::Zero(ct.size());
        for (Eigen::Index i = 1; i < ct.size(); ++i) y(i) = ct(i) / (lam(i) - lam(0));
        if (y.norm() <= 1.0) {
            y(0) = std::sqrt(std::max(0.0, 1.0 - y.squaredNorm()));
            return U * y;
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (norm_at(mid) > 1.0) hi = mid; else lo = mid;
    }
    Vec y = (ct.array() / (lam.array() - lo)).matrix();
    return U * (y / y.norm());
}

}  // namespace detail

/** @brief Shot-normalised 4x4 covariance of (X_h, P_h, X_g, P_g). */
inline Eigen::Matrix4d mode_covariance(const GaussianState& s, const ModePair& m) {
    const Mat W = detail::mode_weights(s, m);
    return Eigen::Matrix4d(W * s.cov * W.transpose());
}

/**
 * @brief EPR variances V1 = Var(X_h - X_g), V3 = Var(P_h + P_g); 2 each for uncorrelated vacua.
 * @throws DimensionError on grid mismatch.
 */
inline std::pair<double, double> epr_variance(const GaussianState& s, const ModePair& m) {
    const Eigen::Matrix4d V = mode_covariance(s, m);
    Eigen::Vector4d u1(1, 0, -1, 0), u3(0, 1, 0, 1);
    return {u1.dot(V * u1), u3.dot(V * u3)};
}

/** @brief Options of the mode solver. */
struct ModeSolverOptions {
    int max_iterations = 200;    ///< bound on multiplier updates (and on polishing sweeps)
    double tolerance = 1e-12;    ///< balance |h|^2 - |g|^2 of the dual eigenvector at convergence
};

/**
 * @brief Minimum-variance mode pair for the entangled state of @p p on @p grid.
 *
 * The mode equations are discretised by cell projection (Galerkin) of the
 * adjoint residuals; for vacuum inputs their squared norm is the resolved
 * part of V1 + V3.  The objective |R u|^2, u = (x, y) with |x| = |y| = 1,
 * is bounded below by 2 sigma_min(R)^2, attained when the lowest singular
 * vector is balanced.  Otherwise the minimum equals the maximum over lambda
 * of twice the lowest eigenvalue of R^T R + lambda diag(I, -I), a concave
 * function whose maximiser has a balanced eigenvector, found by a root
 * search on |x|^2 - |y|^2.  The result is polished by exact alternating
 * minimisation on each sphere.  history starts with the collective-mode
 * guess and is nonincreasing; residual = sqrt(objective / 2).
 * @throws SolverError if the multiplier search does not converge (the message carries the last objective).
 */
inline ModePair solve_modes(const InterfaceParams& p, const Grid& grid, const ModeSolverOptions& opt = {}) {
    if (!(cooperative_A(p) > 0.0)) throw DomainError("solve_modes: requires A > 0 (Fz_bar < 0)");
    // Galerkin discretisation of the mode equations: cell-projected adjoint residuals, i.e. the resolved
    // part of the vacuum response (the subgrid completion belongs to the physical state, not to the equations).
    TransferOptions to;
    to.moments = false;
    to.subgrid = false;
    const TransferMatrix tm = build_transfer(p, grid, to);
    const GaussianState vac = input_state(p, grid, SqueezedInput::vacuum(), true);
    const int nt = grid.n_t, nz = grid.n_z, n = vac.size();
    // Residual operators in shot-normalised, cell-orthonormal coordinates:
    //   objective = |Pf x - Ps y|^2,  x, y unit vectors (x <-> h sqrt(dt), y <-> g sqrt(dz)).
    // Kept unsquared so that small objectives are not lost to cancellation in a Gram matrix.
    const Mat M = tm.stacked();
    const Vec in_sd = vac.cov.diagonal().cwiseSqrt();
    const double rf = std::sqrt(grid.dt() / vac.shot_level(Channel::Xi_I));
    const double rs = std::sqrt(grid.dz() / vac.shot_level(Channel::T_I));
    Mat Pf(2 * n, nt), Ps(2 * n, nz);
    Pf.topRows(n) = rf * (M.middleRows(vac.offset(Channel::Xi_I), nt) * in_sd.asDiagonal()).transpose();
    Pf.bottomRows(n) = rf * (M.middleRows(vac.offset(Channel::Xi_III), nt) * in_sd.asDiagonal()).transpose();
    Ps.topRows(n) = rs * (M.middleRows(vac.offset(Channel::T_I), nz) * in_sd.asDiagonal()).transpose();
    Ps.bottomRows(n) = -rs * (M.middleRows(vac.offset(Channel::T_III), nz) * in_sd.asDiagonal()).transpose();
    auto objective = [&](const Vec& x, const Vec& y) { return (Pf * x - Ps * y).squaredNorm(); };

    ModePair m;
    Vec x = Vec::Constant(nt, 1.0 / std::sqrt(nt));
    Vec y = Vec::Constant(nz, 1.0 / std::sqrt(nz));
    m.history.push_back(objective(x, y));

    // Q = [Pf, -Ps]^T [Pf, -Ps] acts on (x, y).
    Mat R(2 * n, nt + nz);
    R << Pf, -Ps;
    auto balance = [&](const Vec& u) { return u.head(nt).squaredNorm() - u.tail(nz).squaredNorm(); };
    // Since |u|^2 = 2, the objective is bounded below by 2 sigma_min(R)^2; a balanced lowest singular
    // vector attains the bound and is the global optimum (the common case, e.g. T = L).
    Eigen::BDCSVD<Mat> rsvd(R, Eigen::ComputeThinV);
    const Vec u0 = rsvd.matrixV().col(rsvd.singularValues().size() - 1);
    const bool balanced = std::abs(balance(u0)) <= opt.tolerance * 1e4;
    const Mat Q = balanced ? Mat() : Mat(R.transpose() * R);
    Eigen::SelfAdjointEigenSolver<Mat> es;
    auto lowest = [&](double lam) {
        Mat Ql = Q;
        Ql.diagonal().head(nt).array() += lam;
        Ql.diagonal().tail(nz).array() -= lam;
        es.compute(Ql);
        if (es.info() != Eigen::Success) throw SolverError("solve_modes: eigen-decomposition failed");
    };
    const double bound = balanced ? 0.0 : 2.0 * Q.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    double lo = -bound, hi = bound;  // balance > 0 at lo, < 0 at hi (the lowest eigenvalue is concave in lam)
    bool converged = balanced;
    int it = 0;
    Vec u = u0;
    for (; !balanced && it < opt.max_iterations; ++it) {
        const double lam = 0.5 * (lo + hi);
        lowest(lam);
        u = es.eigenvectors().col(0);
        const double b = balance(u);
        if (std::abs(b) <= opt.tolerance) { converged = true; break; }
        if (b > 0.0) lo = lam; else hi = lam;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lam))) {
            // The balance jumps across the optimum only when the lowest eigenvalue is degenerate there:
            // balance a combination of the two lowest eigenvectors.
            const Vec u1 = es.eigenvectors().col(0), u2 = es.eigenvectors().col(1);
            const double b11 = balance(u1), b22 = balance(u2);
            const double b12 = u1.head(nt).dot(u2.head(nt)) - u1.tail(nz).dot(u2.tail(nz));
            // balance(cos a u1 + sin a u2) = mean + amp cos(2a - phase)
            const double mean = 0.5 * (b11 + b22), amp = std::hypot(0.5 * (b11 - b22), b12);
            if (amp >= std::abs(mean) && amp > 0.0) {
                const double a = 0.5 * (std::acos(-mean / amp) + std::atan2(b12, 0.5 * (b11 - b22)));
                u = std::cos(a) * u1 + std::sin(a) * u2;
            }
            converged = true;
            break;
        }
    }
    if (!converged)
        throw SolverError("solve_modes: multiplier search did not converge after " + std::to_string(opt.max_iterations) +
                          " steps, collective-mode objective = " + std::to_string(m.history.back()));
    m.iterations = it + 1;
    if (u.head(nt).norm() > 0.0 && u.tail(nz).norm() > 0.0) {
        const Vec xn = u.head(nt).normalized(), yn = u.tail(nz).normalized();
        // Never worse than the collective guess.
        if (objective(xn, yn) < m.history.back()) { x = xn; y = yn; }
    }
    double f = objective(x, y);
    m.history.push_back(f);
    // Polish: exact minimisation on each sphere in turn (never increases the objective).  The quadratic
    // forms come from singular value decompositions of the unsquared operators, which resolve
    // objectives far below the rounding level of the Gram matrix.
    auto sphere_form = [](const Mat& P, Mat& V, Vec& lam) {
        Eigen::BDCSVD<Mat> svd(P, Eigen::ComputeThinV);
        V = svd.matrixV().rowwise().reverse();
        lam = svd.singularValues().reverse().array().square();
    };
    Mat Vf, Vs;
    Vec lf, ls;
    sphere_form(Pf, Vf, lf);
    sphere_form(Ps, Vs, ls);
    for (int k = 0; k < opt.max_iterations; ++k) {
        const double prev = m.history.back();
        const Vec xn = detail::sphere_quadratic_min(Vf, lf, Pf.transpose() * (Ps * y));
        const double fx = objective(xn, y);
        if (fx < f) { x = xn; f = fx; }
        const Vec yn = detail::sphere_quadratic_min(Vs, ls, Ps.transpose() * (Pf * x));
        const double fy = objective(x, yn);
        if (fy < f) { y = yn; f = fy; }
        m.history.push_back(f);
        if (prev - f <= 1e-12 * prev) break;
    }
    if (x.sum() < 0.0) { x = -x; y = -y; }
    m.h = x / std::sqrt(grid.dt());
    m.g = y / std::sqrt(grid.dz());
    m.residual = std::sqrt(std::max(0.0, 0.5 * f));
    return m;
}

/** @brief EPR-sum witness and the partial-transpose cross-check on the 4x4 mode covariance. */
struct WitnessReport {
    double sum = 0.0;             ///< V1 + V3
    double separable_bound = 4.0;
    bool entangled = false;       ///< sum < bound
    double pt_symplectic_min = 0.0;  ///< smallest symplectic eigenvalue of the partial transpose (vacuum = 1)
    bool pt_entangled = false;       ///< pt_symplectic_min < 1
};

/**
 * @brief Two-vacua EPR witness V1 + V3 < 4 plus the partial-transpose test of the extracted two-mode state.
 */
inline WitnessReport entanglement_witness(const GaussianState& s, const ModePair& m) {
    const auto [v1, v3] = epr_variance(s, m);
    WitnessReport w;
    w.sum = v1 + v3;
    w.entangled = w.sum < w.separable_bound;
    const Eigen::Matrix4d V = mode_covariance(s, m);
    // Commutator structure [x_i, x_j] = 2 i K_ij: light [X_h, P_h] = -2i, spin [X_g, P_g] = 2i sign(Fz).
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    K(0, 1) = -1.0;
    K(1, 0) = 1.0;
    const double ss = s.Fz_bar >= 0.0 ? 1.0 : -1.0;
    // Partial transpose of the spin mode: P_g -> -P_g flips its symplectic block.
    K(2, 3) = -ss;
    K(3, 2) = ss;
    Eigen::EigenSolver<Eigen::Matrix4d> es(K * V);
    double nu = INFINITY;
    for (int i = 0; i < 4; ++i) nu = std::min(nu, std::abs(es.eigenvalues()(i)));
    w.pt_symplectic_min = nu;
    w.pt_entangled = nu < 1.0;
    return w;
}

}  // namespace lai
