// SPDX-License-Identifier: MIT
/**
 * @file propagator.hpp
 * @brief Input/output transfer of the light–atom interface.
 *
 * In the interaction frame the Stokes components Xi_I, Xi_III and alignment
 * components T_I, T_III obey
 *   dXi_I/dz = -a T_I,   dT_I/dt = b Xi_I,   (channel III: a -> -a, b -> -b)
 * with a = 2 eps Xi2_bar, b = cbar13 eps Fz_bar.  The Goursat problem has
 * the exact input/output solution in terms of the Riemann function
 * Phi(w) = J0(2 sqrt w) for A < 0 (memory) or I0(2 sqrt w) for A > 0
 * (entanglement), A = -a b.
 *
 * Discretisation.  Samples are cell averages on a midpoint grid.  Kernel
 * blocks are the exact Galerkin averages of the continuum kernels (no
 * quadrature error): Volterra blocks are second differences of the twice
 * integrated kernel, cross blocks are inclusion–exclusion of the doubly
 * integrated Riemann function over the cell rectangle.  Two further
 * ingredients make the discrete map complete:
 *   - first-moment blocks, used by apply_transfer to act on smooth signals
 *     with a piecewise-linear reconstruction (third-order accuracy);
 *   - subgrid Gram blocks: the contribution of the unresolved (within-cell)
 *     part of delta-correlated inputs to the resolved outputs.  Covariance
 *     propagation adds them so that white-noise statistics, and therefore the
 *     canonical commutators, are transported exactly.
 */
#pragma once

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lai/bessel.hpp"
#include "lai/errors.hpp"
#include "lai/params.hpp"

namespace lai {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/** @brief Sign of the cooperative parameter: J-Bessel (A<0) or I-Bessel (A>0) kernels. */
enum class Branch { memory, entanglement };

inline const char* to_string(Branch b) { return b == Branch::memory ? "memory" : "entanglement"; }

/** @brief Quadrature labels in the interaction frame (lab labels after rotating out). */
enum class Channel { Xi_I, Xi_III, T_I, T_III };

/** @brief Samples of one quadrature component on its grid (time grid for light, space grid for spin). */
struct QuadratureChannel {
    Channel label = Channel::Xi_I;
    Vec samples;
};

/** @brief Conjugate pair (I, III) of field or spin samples. */
struct ChannelPair {
    Vec first;   ///< Xi_I / T_I  (lab frame: Xi_1 / T_xy)
    Vec second;  ///< Xi_III / T_III  (lab frame: Xi_3 / T_xieta)
};

/**
 * @brief Discretised input/output map.
 *
 * Blocks act on channel I: (Xi_I, T_I)_out = [[K_ff, K_fa], [K_af, K_aa]] (Xi_I, T_I)_in.
 * Channel III uses the same diagonal blocks and negated cross blocks.
 */
struct TransferMatrix {
    Branch branch = Branch::memory;
    Grid grid;
    InterfaceParams params;
    Mat K_ff, K_fa, K_af, K_aa;  ///< cell-average (Galerkin) blocks
    Mat S_ff, S_fa, S_af, S_aa;  ///< first-moment blocks (acting on cell slopes)
    Mat E_field;                 ///< subgrid Gram for unit white field input, outputs (Xi_I, T_I)
    Mat E_spin;                  ///< subgrid Gram for unit white spin input, outputs (Xi_I, T_I)
    bool has_moments = false;
    bool has_subgrid = false;

    int n_t() const { return grid.n_t; }
    int n_z() const { return grid.n_z; }

    /** @brief Channel-I block matrix on (Xi_I, T_I). */
    Mat block_I() const {
        Mat M(n_t() + n_z(), n_t() + n_z());
        M << K_ff, K_fa, K_af, K_aa;
        return M;
    }
    /** @brief Full map on the stacked vector (Xi_I, Xi_III, T_I, T_III). */
    Mat stacked() const {
        const int nt = n_t(), nz = n_z();
        Mat M = Mat::Zero(2 * nt + 2 * nz, 2 * nt + 2 * nz);
        M.block(0, 0, nt, nt) = K_ff;
        M.block(nt, nt, nt, nt) = K_ff;
        M.block(0, 2 * nt, nt, nz) = K_fa;
        M.block(nt, 2 * nt + nz, nt, nz) = -K_fa;
        M.block(2 * nt, 0, nz, nt) = K_af;
        M.block(2 * nt + nz, nt, nz, nt) = -K_af;
        M.block(2 * nt, 2 * nt, nz, nz) = K_aa;
        M.block(2 * nt + nz, 2 * nt + nz, nz, nz) = K_aa;
        return M;
    }
};

/** @brief Options for build_transfer. */
struct TransferOptions {
    bool moments = true;   ///< build first-moment blocks (smooth-signal application)
    bool subgrid = true;   ///< build subgrid Gram blocks (covariance propagation)
    int gauss_points = 8;  ///< Gauss–Legendre points per cell for moments/Grams (4, 8 or 12)
};

namespace detail {

/** @brief Gauss–Legendre rule on [-1, 1]. */
inline void gauss_rule(int m, std::vector<double>& x, std::vector<double>& w) {
    auto fill = [&](const auto& absc, const auto& wts, bool odd) {
        x.clear(); w.clear();
        for (std::size_t k = 0; k < absc.size(); ++k) {
            if (odd && k == 0) { x.push_back(0.0); w.push_back(wts[0]); continue; }
            x.push_back(-absc[k]); w.push_back(wts[k]);
            x.push_back(absc[k]); w.push_back(wts[k]);
        }
    };
    using boost::math::quadrature::gauss;
    switch (m) {
        case 4: fill(gauss<double, 4>::abscissa(), gauss<double, 4>::weights(), false); break;
        case 8: fill(gauss<double, 8>::abscissa(), gauss<double, 8>::weights(), false); break;
        case 12: fill(gauss<double, 12>::abscissa(), gauss<double, 12>::weights(), false); break;
        default: throw DomainError("TransferOptions: gauss_points must be 4, 8 or 12");
    }
}

/** @brief Kernel integrals for one branch (eta = sign A) and rate c = |A| * (conjugate extent). */
struct KernelFunctions {
    double eta = -1.0;
    double absA = 0.0;

    /** First integral of the Volterra kernel sqrt(c/s) B1(2 sqrt(cs)): F1(s) = w E11(w), w = c s. */
    double F1(double c, double s) const {
        if (s <= 0.0) return 0.0;
        const double w = c * s;
        return w * kernel::e11(eta, w);
    }
    /** Second integral: F2(s) = s w E12(w). */
    double F2(double c, double s) const {
        if (s <= 0.0) return 0.0;
        const double w = c * s;
        return s * w * kernel::e12(eta, w);
    }
    /** Lambda(t; u) = int_0^t Phi(|A| u t') dt' = t E01(|A| u t). */
    double Lambda(double t, double u) const {
        if (t <= 0.0 || u <= 0.0) return (t > 0.0) ? t : 0.0;
        return t * kernel::e01(eta, absA * u * t);
    }
    /** H(U, V) = int_0^U int_0^V Phi(|A| u v) dv du = U V E11(|A| U V). */
    double H(double U, double V) const {
        if (U <= 0.0 || V <= 0.0) return 0.0;
        return U * V * kernel::e11(eta, absA * U * V);
    }
};

/** @brief Galerkin Volterra block: (1/d) int_cell_i int_cell_j k(s - s') ds' ds, times eta. */
inline Mat volterra_block(const KernelFunctions& kf, double c, int n, double d) {
    std::vector<double> f2(n + 1);
    for (int k = 0; k <= n; ++k) f2[k] = kf.F2(c, k * d);
    std::vector<double> band(n);
    for (int m = 0; m < n; ++m) {
        const double prev = (m >= 1) ? f2[m - 1] : 0.0;
        band[m] = kf.eta * (f2[m + 1] - 2.0 * f2[m] + prev) / d;
    }
    Mat V = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) V(i, j) = band[i - j];
    return V;
}

/**
 * @brief Galerkin cross block between an output grid (n_out cells of width d_out on [0, X_out])
 *        and an input grid (n_in cells of width d_in on [0, X_in]) with kernel Phi(|A| x_out (X_in - x_in)).
 *
 * Entry = coef / d_out * int_cell_i int_cell_j Phi.
 */
inline Mat cross_block(const KernelFunctions& kf, double coef, int n_out, double d_out, int n_in, double d_in,
                       double X_in) {
    Mat Hm(n_out + 1, n_in + 1);
    for (int i = 0; i <= n_out; ++i)
        for (int j = 0; j <= n_in; ++j) Hm(i, j) = kf.H(i * d_out, X_in - j * d_in);
    Mat C(n_out, n_in);
    for (int i = 0; i < n_out; ++i)
        for (int j = 0; j < n_in; ++j)
            C(i, j) = coef / d_out * (Hm(i + 1, j) - Hm(i + 1, j + 1) - Hm(i, j) + Hm(i, j + 1));
    return C;
}

/**
 * @brief Row functions evaluated on Gauss nodes of every input cell.
 *
 * Returns R (n_out x n_in*m) with R(i, j*m+g) = r_i(node), plus node offsets
 * from the cell midpoints and Gauss weights scaled to the cell.
 */
struct RowSamples {
    Mat R;
    std::vector<double> offset;  ///< node - midpoint, per node index g
    std::vector<double> weight;  ///< Gauss weight * d_in / 2, per node index g
};

inline RowSamples volterra_rows(const KernelFunctions& kf, double c, int n, double d, const std::vector<double>& gx,
                                const std::vector<double>& gw) {
    const int m = static_cast<int>(gx.size());
    RowSamples rs;
    rs.R = Mat::Zero(n, n * m);
    for (int g = 0; g < m; ++g) {
        rs.offset.push_back(0.5 * d * gx[g]);
        rs.weight.push_back(0.5 * d * gw[g]);
    }
    // r_i(s) = eta/d [F1(t_{i+1} - s) - F1(t_i - s)] depends on (i - j) and g only.
    for (int g = 0; g < m; ++g) {
        const double frac = 0.5 + 0.5 * gx[g];  // node position inside its cell, in units of d
        std::vector<double> f1(n + 1);
        for (int k = 0; k <= n; ++k) f1[k] = kf.F1(c, (k - frac) * d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                const int k = i - j;
                rs.R(i, j * m + g) = kf.eta / d * (f1[k + 1] - f1[k]);
            }
    }
    return rs;
}

inline RowSamples cross_rows(const KernelFunctions& kf, double coef, int n_out, double d_out, int n_in, double d_in,
                             double X_in, const std::vector<double>& gx, const std::vector<double>& gw) {
    const int m = static_cast<int>(gx.size());
    RowSamples rs;
    rs.R.resize(n_out, n_in * m);
    for (int g = 0; g < m; ++g) {
        rs.offset.push_back(0.5 * d_in * gx[g]);
        rs.weight.push_back(0.5 * d_in * gw[g]);
    }
    std::vector<double> lam(n_out + 1);
    for (int j = 0; j < n_in; ++j)
        for (int g = 0; g < m; ++g) {
            const double u = X_in - ((j + 0.5) * d_in + rs.offset[g]);
            for (int i = 0; i <= n_out; ++i) lam[i] = kf.Lambda(i * d_out, u);
            for (int i = 0; i < n_out; ++i) rs.R(i, j * m + g) = coef / d_out * (lam[i + 1] - lam[i]);
        }
    return rs;
}

/** @brief First moments int_cell r_i(s) (s - s_j) ds of sampled rows. */
inline Mat row_moments(const RowSamples& rs, int n_in) {
    const int m = static_cast<int>(rs.offset.size());
    Mat S(rs.R.rows(), n_in);
    for (int j = 0; j < n_in; ++j) {
        auto col = S.col(j);
        col.setZero();
        for (int g = 0; g < m; ++g) col += rs.R.col(j * m + g) * (rs.weight[g] * rs.offset[g]);
    }
    return S;
}

/** @brief Replace row samples by sqrt(w) * (r - cell mean of r): the subgrid part. */
inline Mat subgrid_part(const RowSamples& rs, int n_in) {
    const int m = static_cast<int>(rs.offset.size());
    double wsum = 0.0;
    for (double w : rs.weight) wsum += w;
    Mat D(rs.R.rows(), rs.R.cols());
    for (int j = 0; j < n_in; ++j) {
        Vec mean = Vec::Zero(rs.R.rows());
        for (int g = 0; g < m; ++g) mean += rs.R.col(j * m + g) * rs.weight[g];
        mean /= wsum;
        for (int g = 0; g < m; ++g) D.col(j * m + g) = (rs.R.col(j * m + g) - mean) * std::sqrt(rs.weight[g]);
    }
    return D;
}

}  // namespace detail

/**
 * @brief Build the discretised transfer for the given parameters and grid.
 *
 * The grid's T and L override params.T and params.L (they must agree to
 * 1e-12 relative).
 * @throws DegenerateCouplingError if A = 0 (use identity_transfer instead).
 */
inline TransferMatrix build_transfer(const InterfaceParams& params, const Grid& grid, const TransferOptions& opt = {}) {
    grid.validate();
    const double A = cooperative_A(params);
    if (A == 0.0) throw DegenerateCouplingError("build_transfer: A = 0, the coupling is degenerate (use identity_transfer)");
    if (std::abs(params.T - grid.T) > 1e-12 * grid.T || std::abs(params.L - grid.L) > 1e-12 * grid.L)
        throw DimensionError("build_transfer: grid extent (T, L) differs from params");

    TransferMatrix tm;
    tm.branch = A < 0 ? Branch::memory : Branch::entanglement;
    tm.grid = grid;
    tm.params = params;
    tm.params.A = A;

    detail::KernelFunctions kf;
    kf.eta = A < 0 ? -1.0 : 1.0;
    kf.absA = std::abs(A);
    const int nt = grid.n_t, nz = grid.n_z;
    const double dt = grid.dt(), dz = grid.dz();
    const double cT = kf.absA * grid.L;  // rate of the temporal Volterra kernel
    const double cZ = kf.absA * grid.T;  // rate of the spatial Volterra kernel
    const double a = params.a_coef(), b = params.b_coef();

    tm.K_ff = Mat::Identity(nt, nt) + detail::volterra_block(kf, cT, nt, dt);
    tm.K_aa = Mat::Identity(nz, nz) + detail::volterra_block(kf, cZ, nz, dz);
    // Field out (time cell i) from spin in (space cell j): -a Phi(|A| t (L - z)).
    tm.K_fa = detail::cross_block(kf, -a, nt, dt, nz, dz, grid.L);
    // Spin out (space cell i) from field in (time cell j): +b Phi(|A| z (T - t)).
    tm.K_af = detail::cross_block(kf, b, nz, dz, nt, dt, grid.T);

    if (opt.moments || opt.subgrid) {
        std::vector<double> gx, gw;
        detail::gauss_rule(opt.gauss_points, gx, gw);
        const auto r_ff = detail::volterra_rows(kf, cT, nt, dt, gx, gw);
        const auto r_aa = detail::volterra_rows(kf, cZ, nz, dz, gx, gw);
        const auto r_fa = detail::cross_rows(kf, -a, nt, dt, nz, dz, grid.L, gx, gw);
        const auto r_af = detail::cross_rows(kf, b, nz, dz, nt, dt, grid.T, gx, gw);
        if (opt.moments) {
            tm.S_ff = detail::row_moments(r_ff, nt);
            tm.S_aa = detail::row_moments(r_aa, nz);
            tm.S_fa = detail::row_moments(r_fa, nz);
            tm.S_af = detail::row_moments(r_af, nt);
            tm.has_moments = true;
        }
        if (opt.subgrid) {
            Mat Rf(nt + nz, static_cast<Eigen::Index>(nt) * gx.size());
            Rf << detail::subgrid_part(r_ff, nt), detail::subgrid_part(r_af, nt);
            Mat Rs(nt + nz, static_cast<Eigen::Index>(nz) * gx.size());
            Rs << detail::subgrid_part(r_fa, nz), detail::subgrid_part(r_aa, nz);
            tm.E_field = Mat(nt + nz, nt + nz);
            tm.E_field.noalias() = Rf * Rf.transpose();
            tm.E_spin = Mat(nt + nz, nt + nz);
            tm.E_spin.noalias() = Rs * Rs.transpose();
            tm.has_subgrid = true;
        }
    }
    return tm;
}

/** @brief The identity transfer (no coupling), used when A = 0. */
inline TransferMatrix identity_transfer(const InterfaceParams& params, const Grid& grid) {
    grid.validate();
    TransferMatrix tm;
    tm.branch = Branch::memory;
    tm.grid = grid;
    tm.params = params;
    const int nt = grid.n_t, nz = grid.n_z;
    tm.K_ff = Mat::Identity(nt, nt);
    tm.K_aa = Mat::Identity(nz, nz);
    tm.K_fa = Mat::Zero(nt, nz);
    tm.K_af = Mat::Zero(nz, nt);
    tm.S_ff = Mat::Zero(nt, nt);
    tm.S_aa = Mat::Zero(nz, nz);
    tm.S_fa = Mat::Zero(nt, nz);
    tm.S_af = Mat::Zero(nz, nt);
    tm.E_field = Mat::Zero(nt + nz, nt + nz);
    tm.E_spin = Mat::Zero(nt + nz, nt + nz);
    tm.has_moments = tm.has_subgrid = true;
    return tm;
}

/**
 * @brief Second-order cell slopes of cell-averaged data (central inside, one-sided at the ends).
 */
inline Vec cell_slopes(const Vec& avg, double d) {
    const Eigen::Index n = avg.size();
    Vec s(n);
    if (n < 3) { s.setZero(); return s; }
    for (Eigen::Index j = 1; j + 1 < n; ++j) s[j] = (avg[j + 1] - avg[j - 1]) / (2.0 * d);
    s[0] = (-3.0 * avg[0] + 4.0 * avg[1] - avg[2]) / (2.0 * d);
    s[n - 1] = (3.0 * avg[n - 1] - 4.0 * avg[n - 2] + avg[n - 3]) / (2.0 * d);
    return s;
}

/** @brief How apply_transfer interprets its cell data. */
enum class ApplyMode {
    smooth,    ///< samples of a smooth signal: piecewise-linear reconstruction (default)
    galerkin,  ///< piecewise-constant reconstruction: exactly the block matrix
};

/**
 * @brief Apply the transfer to deterministic field and spin inputs.
 *
 * Channel I couples only to channel I and III to III, with the cross blocks
 * negated for III.
 * @throws DimensionError on grid mismatch.
 */
inline std::pair<ChannelPair, ChannelPair> apply_transfer(const TransferMatrix& tm, const ChannelPair& field_in,
                                                          const ChannelPair& spin_in,
                                                          ApplyMode mode = ApplyMode::smooth) {
    const int nt = tm.n_t(), nz = tm.n_z();
    if (field_in.first.size() != nt || field_in.second.size() != nt || spin_in.first.size() != nz ||
        spin_in.second.size() != nz)
        throw DimensionError("apply_transfer: input lengths do not match the transfer grid");
    const bool smooth = (mode == ApplyMode::smooth) && tm.has_moments;
    auto run = [&](const Vec& x, const Vec& y, double sign, Vec& xo, Vec& yo) {
        xo = tm.K_ff * x + sign * (tm.K_fa * y);
        yo = sign * (tm.K_af * x) + tm.K_aa * y;
        if (smooth) {
            const Vec sx = cell_slopes(x, tm.grid.dt()), sy = cell_slopes(y, tm.grid.dz());
            xo += tm.S_ff * sx + sign * (tm.S_fa * sy);
            yo += sign * (tm.S_af * sx) + tm.S_aa * sy;
        }
    };
    std::pair<ChannelPair, ChannelPair> out;
    run(field_in.first, spin_in.first, 1.0, out.first.first, out.second.first);
    run(field_in.second, spin_in.second, -1.0, out.first.second, out.second.second);
    return out;
}

/** @brief Diagonal of the preserved form on (Xi_I, T_I): (2 Xi2/dt, cbar13 Fz/dz). */
inline std::pair<double, double> canonical_form(const InterfaceParams& p, const Grid& g) {
    return {2.0 * p.Xi2_bar / g.dt(), p.cbar13 * p.Fz_bar / g.dz()};
}

namespace detail {
inline double commutator_deviation(const TransferMatrix& tm, bool include_subgrid) {
    const int nt = tm.n_t(), nz = tm.n_z();
    const auto [gf, gs] = canonical_form(tm.params, tm.grid);
    // Work in canonical units: x = D^-1 x_phys with D = diag(sqrt|gf|, sqrt|gs|).
    Vec d(nt + nz);
    d.head(nt).setConstant(std::sqrt(std::abs(gf)));
    d.tail(nz).setConstant(std::sqrt(std::abs(gs)));
    const Mat M = d.cwiseInverse().asDiagonal() * tm.block_I() * d.asDiagonal();
    Vec sig(nt + nz);
    sig.head(nt).setConstant(gf > 0 ? 1.0 : -1.0);
    sig.tail(nz).setConstant(gs > 0 ? 1.0 : -1.0);
    Mat R = M * sig.asDiagonal() * M.transpose();
    if (include_subgrid && tm.has_subgrid) {
        const Mat Dinv = d.cwiseInverse().asDiagonal();
        // White levels of the delta-correlated inputs: 2 Xi2 (field) and cbar13 Fz (spin).
        R += (gf * tm.grid.dt()) * (Dinv * tm.E_field * Dinv) + (gs * tm.grid.dz()) * (Dinv * tm.E_spin * Dinv);
    }
    R.diagonal() -= sig;
    return R.cwiseAbs().maxCoeff();
}
}  // namespace detail

/**
 * @brief Deviation of the discrete commutator matrix from the canonical form.
 *
 * Computes max |M G M^T + gf E_field + gs E_spin - G| in canonical units
 * (the input form has unit norm), where G = diag(2 Xi2/dt, cbar13 Fz/dz) and
 * the subgrid Grams E account for the unresolved within-cell modes that the
 * cell-average representation carries as white noise.  Field and spin
 * outputs commute (the window [theta(t-t') - theta(z'-z)] vanishes on the
 * output boundaries), so the target cross block is zero.
 */
inline double symplectic_residual(const TransferMatrix& tm) { return detail::commutator_deviation(tm, true); }

/**
 * @brief Deviation of M G M^T alone from G (resolved modes only), in canonical units.
 *
 * Equals the weight the kernels carry into unresolved modes; it vanishes
 * as O(cell^2) under refinement.
 */
inline double kernel_commutator_defect(const TransferMatrix& tm) { return detail::commutator_deviation(tm, false); }

// ---------------------------------------------------------------------------------------------
// Frame rotation
// ---------------------------------------------------------------------------------------------

/** @brief Rotation direction: lab -> interaction frame ("in") or back ("out"). */
enum class FrameDirection { in, out };

/** @brief Phase parameters of phi(z, t) = kappa1 z + OmegaBar t. */
struct PhaseParams {
    double kappa1 = 0.0;
    double OmegaBar = 0.0;
    double phi(double z, double t) const { return kappa1 * z + OmegaBar * t; }
};

/**
 * @brief Rotate field samples on the time grid at position z.
 *
 * in:  Xi_I = cos(phi) Xi_1 - sin(phi) Xi_3,  Xi_III = sin(phi) Xi_1 + cos(phi) Xi_3.
 * out: the inverse.  phi is evaluated at the cell midpoints.
 */
inline ChannelPair rotate_field(FrameDirection dir, const PhaseParams& ph, const Grid& g, double z, const ChannelPair& f) {
    if (f.first.size() != g.n_t || f.second.size() != g.n_t)
        throw DimensionError("rotate_field: samples do not match the time grid");
    ChannelPair r{Vec(g.n_t), Vec(g.n_t)};
    const double s = (dir == FrameDirection::in) ? 1.0 : -1.0;
    for (int i = 0; i < g.n_t; ++i) {
        const double phi = ph.phi(z, g.t_mid(i));
        const double c = std::cos(phi), sn = s * std::sin(phi);
        r.first[i] = c * f.first[i] - sn * f.second[i];
        r.second[i] = sn * f.first[i] + c * f.second[i];
    }
    return r;
}

/**
 * @brief Rotate spin samples on the space grid at time t.
 *
 * in:  T_I = cos(phi) T_xy + sin(phi) T_xieta,  T_III = -sin(phi) T_xy + cos(phi) T_xieta.
 * out: the inverse.
 */
inline ChannelPair rotate_spin(FrameDirection dir, const PhaseParams& ph, const Grid& g, double t, const ChannelPair& f) {
    if (f.first.size() != g.n_z || f.second.size() != g.n_z)
        throw DimensionError("rotate_spin: samples do not match the space grid");
    ChannelPair r{Vec(g.n_z), Vec(g.n_z)};
    const double s = (dir == FrameDirection::in) ? 1.0 : -1.0;
    for (int i = 0; i < g.n_z; ++i) {
        const double phi = ph.phi(g.z_mid(i), t);
        const double c = std::cos(phi), sn = s * std::sin(phi);
        r.first[i] = c * f.first[i] + sn * f.second[i];
        r.second[i] = -sn * f.first[i] + c * f.second[i];
    }
    return r;
}

/**
 * @brief Rotate the full set of boundary data.
 *
 * in: field at z = 0 and spin at t = 0 (lab -> interaction frame);
 * out: field at z = L and spin at t = T (interaction frame -> lab).
 */
inline std::pair<ChannelPair, ChannelPair> rotate_frame(FrameDirection dir, const PhaseParams& ph, const Grid& g,
                                                        const ChannelPair& field, const ChannelPair& spin) {
    const double z = (dir == FrameDirection::in) ? 0.0 : g.L;
    const double t = (dir == FrameDirection::in) ? 0.0 : g.T;
    return {rotate_field(dir, ph, g, z, field), rotate_spin(dir, ph, g, t, spin)};
}

// ---------------------------------------------------------------------------------------------
// Brute-force PDE oracle
// ---------------------------------------------------------------------------------------------

/** @brief Options of the box-scheme oracle. */
struct OracleOptions {
    int refine = 9;              ///< fine cells per coarse cell in each direction
    bool self_check = false;     ///< also run at refine/3 and require agreement
    double self_check_tol = 1e-2;
};

namespace detail {

/**
 * @brief One trapezoidal box step of the lab-frame equations on a (dz x dt) cell.
 *
 * Unknowns: field (Xi_1, Xi_3) on the right edge and spin (T_xy, T_xieta) on
 * the top edge, from the left-edge field and bottom-edge spin.  Returns the
 * constant 4x4 update matrix Q: [Xr; Tt] = Q [Xl; Tb].
 */
inline Eigen::Matrix4d box_update(const InterfaceParams& p, double dz, double dt) {
    const double a = p.a_coef(), b = p.b_coef(), k1 = p.kappa1, om = p.omega_bar_effective();
    Eigen::Matrix2d Kx, Cx, Kt, Ct;
    Kx << 0, k1, -k1, 0;       // d/dz Xi = kappa1 [[0,1],[-1,0]] Xi ...
    Cx << -a, 0, 0, a;         //          + a [[-1,0],[0,1]] T
    Kt << 0, -om, om, 0;       // d/dt T  = OmegaBar [[0,-1],[1,0]] T ...
    Ct << b, 0, 0, -b;         //          + b [[1,0],[0,-1]] Xi
    Eigen::Matrix4d lhs = Eigen::Matrix4d::Identity(), rhs = Eigen::Matrix4d::Identity();
    lhs.block<2, 2>(0, 0) -= 0.5 * dz * Kx;
    lhs.block<2, 2>(0, 2) = -0.5 * dz * Cx;
    lhs.block<2, 2>(2, 0) = -0.5 * dt * Ct;
    lhs.block<2, 2>(2, 2) -= 0.5 * dt * Kt;
    rhs.block<2, 2>(0, 0) += 0.5 * dz * Kx;
    rhs.block<2, 2>(0, 2) = 0.5 * dz * Cx;
    rhs.block<2, 2>(2, 0) = 0.5 * dt * Ct;
    rhs.block<2, 2>(2, 2) += 0.5 * dt * Kt;
    return lhs.partialPivLu().solve(rhs);
}

/**
 * @brief Sweep the box scheme over an (n_zf x n_tf) fine grid.
 *
 * X1, X3: field at z = 0 per fine time cell (overwritten with the field at z = L);
 * S1, S2: spin at t = 0 per fine space cell (overwritten with the spin at t = T).
 */
inline void box_sweep(const Eigen::Matrix4d& Q, std::vector<double>& X1, std::vector<double>& X3,
                      std::vector<double>& S1, std::vector<double>& S2) {
    const std::size_t ntf = X1.size(), nzf = S1.size();
    for (std::size_t k = 0; k < nzf; ++k) {  // march along z: column k
        double t1 = S1[k], t2 = S2[k];
        for (std::size_t j = 0; j < ntf; ++j) {  // march along t within the column
            const double x1 = X1[j], x3 = X3[j];
            X1[j] = Q(0, 0) * x1 + Q(0, 1) * x3 + Q(0, 2) * t1 + Q(0, 3) * t2;
            X3[j] = Q(1, 0) * x1 + Q(1, 1) * x3 + Q(1, 2) * t1 + Q(1, 3) * t2;
            const double n1 = Q(2, 0) * x1 + Q(2, 1) * x3 + Q(2, 2) * t1 + Q(2, 3) * t2;
            const double n2 = Q(3, 0) * x1 + Q(3, 1) * x3 + Q(3, 2) * t1 + Q(3, 3) * t2;
            t1 = n1;
            t2 = n2;
        }
        S1[k] = t1;
        S2[k] = t2;
    }
}

inline Vec coarsen(const std::vector<double>& fine, int n, int r) {
    Vec out(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < r; ++k) s += fine[static_cast<std::size_t>(i) * r + k];
        out[i] = s / r;
    }
    return out;
}

inline std::pair<ChannelPair, ChannelPair> oracle_run(const InterfaceParams& p, const Grid& g, int r,
                                                      const std::function<double(double)>& xi1,
                                                      const std::function<double(double)>& xi3,
                                                      const std::function<double(double)>& txy,
                                                      const std::function<double(double)>& txe) {
    const int ntf = g.n_t * r, nzf = g.n_z * r;
    const double dtf = g.T / ntf, dzf = g.L / nzf;
    std::vector<double> X1(ntf), X3(ntf), S1(nzf), S2(nzf);
    for (int j = 0; j < ntf; ++j) { X1[j] = xi1((j + 0.5) * dtf); X3[j] = xi3((j + 0.5) * dtf); }
    for (int k = 0; k < nzf; ++k) { S1[k] = txy((k + 0.5) * dzf); S2[k] = txe((k + 0.5) * dzf); }
    box_sweep(box_update(p, dzf, dtf), X1, X3, S1, S2);
    return {{coarsen(X1, g.n_t, r), coarsen(X3, g.n_t, r)}, {coarsen(S1, g.n_z, r), coarsen(S2, g.n_z, r)}};
}

}  // namespace detail

/** @brief A scalar input profile (function of t for light, of z for spin). */
using Profile = std::function<double(double)>;

/**
 * @brief Brute-force integration of the lab-frame wave equations (retardation neglected).
 *
 * Uses the trapezoidal box scheme (second order, exactly conservative for
 * this linear system) on a grid refined @p opt.refine times in both
 * directions.  Inputs are lab-frame profiles: field Xi_1, Xi_3 at z = 0 as
 * functions of t and spin T_xy, T_xieta at t = 0 as functions of z.
 * Outputs are lab-frame cell averages on the coarse grid: field at z = L and
 * spin at t = T.  With kappa1 = OmegaBar = 0 the lab and interaction frames
 * coincide.
 * @throws SolverError if self_check is set and two refinements disagree.
 */
inline std::pair<ChannelPair, ChannelPair> pde_oracle(const InterfaceParams& params, const Grid& grid,
                                                      const Profile& xi1, const Profile& xi3, const Profile& txy,
                                                      const Profile& txe, const OracleOptions& opt = {}) {
    grid.validate();
    if (opt.refine < 1) throw DomainError("pde_oracle: refine must be >= 1");
    auto out = detail::oracle_run(params, grid, opt.refine, xi1, xi3, txy, txe);
    if (opt.self_check) {
        const int r2 = std::max(1, opt.refine / 3);
        const auto coarse = detail::oracle_run(params, grid, r2, xi1, xi3, txy, txe);
        auto rel = [](const Vec& a, const Vec& b) {
            const double s = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
            return (a - b).cwiseAbs().maxCoeff() / s;
        };
        const double d = std::max({rel(out.first.first, coarse.first.first), rel(out.first.second, coarse.first.second),
                                   rel(out.second.first, coarse.second.first),
                                   rel(out.second.second, coarse.second.second)});
        if (d > opt.self_check_tol)
            throw SolverError("pde_oracle: refinement " + std::to_string(opt.refine) + " vs " + std::to_string(r2) +
                              " differs by " + std::to_string(d) + " (relative), above tolerance " +
                              std::to_string(opt.self_check_tol));
    }
    return out;
}

/**
 * @brief Linear map of the interaction-frame box scheme for one channel, as a dense matrix.
 *
 * Inputs: fine field cells (n_t r) then fine spin cells (n_z r); outputs:
 * field at z = L then spin at t = T, each either on the fine grid or averaged
 * to the coarse grid (@p coarse_output).  Used as the covariance oracle.
 * @param channel_sign +1 for channel I, -1 for channel III.
 */
inline Mat oracle_channel_map(const InterfaceParams& params, const Grid& grid, int refine, double channel_sign,
                              bool coarse_output) {
    grid.validate();
    InterfaceParams p = params;
    p.kappa1 = 0.0;
    p.degenerate = true;
    const int ntf = grid.n_t * refine, nzf = grid.n_z * refine;
    const Eigen::Matrix4d Q = detail::box_update(p, grid.L / nzf, grid.T / ntf);
    // In the interaction frame with kappa1 = OmegaBar = 0, Xi_1 / T_xy carry channel I and
    // Xi_3 / T_xieta carry channel III; only one of them is driven.
    const int n_out = coarse_output ? grid.n_t + grid.n_z : ntf + nzf;
    Mat B(n_out, ntf + nzf);
    std::vector<double> X1(ntf), X3(ntf), S1(nzf), S2(nzf);
    for (int col = 0; col < ntf + nzf; ++col) {
        std::fill(X1.begin(), X1.end(), 0.0); std::fill(X3.begin(), X3.end(), 0.0);
        std::fill(S1.begin(), S1.end(), 0.0); std::fill(S2.begin(), S2.end(), 0.0);
        auto& X = channel_sign > 0 ? X1 : X3;
        auto& S = channel_sign > 0 ? S1 : S2;
        if (col < ntf) X[col] = 1.0; else S[col - ntf] = 1.0;
        detail::box_sweep(Q, X1, X3, S1, S2);
        if (coarse_output) {
            B.col(col) << detail::coarsen(X, grid.n_t, refine), detail::coarsen(S, grid.n_z, refine);
        } else {
            for (int j = 0; j < ntf; ++j) B(j, col) = X[j];
            for (int k = 0; k < nzf; ++k) B(ntf + k, col) = S[k];
        }
    }
    return B;
}

}  // namespace lai
