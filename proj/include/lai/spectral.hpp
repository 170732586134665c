// SPDX-License-Identifier: MIT
/**
 * @file spectral.hpp
 * @brief Gaussian-state bookkeeping for the light–atom interface.
 *
 * A GaussianState holds the symmetrised covariance of the cell-averaged
 * quadratures stacked as (Xi_I | Xi_III | T_I | T_III), with the light on the
 * time grid and the spin on the space grid.  Shot noise is delta-correlated,
 * so each state also records the white-noise level of every channel pair
 * (a 2x2 matrix of delta weights): cell averages see only the resolved part,
 * and the transfer's subgrid Grams carry the unresolved part through the
 * interaction.
 *
 * Shot-noise units: light Xi2_bar (per unit time), spin cbar13 |Fz_bar| / 2
 * (per unit length).  A cell average of vacuum light has variance Xi2_bar/dt.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "lai/errors.hpp"
#include "lai/params.hpp"
#include "lai/propagator.hpp"

namespace lai {

/**
 * @brief Squeezed-vacuum statistics of a sub-threshold degenerate parametric amplifier.
 *
 * Correlators: <{dXi_i(t), dXi_i(t+s)}>/2 = (delta(s) + xi_i e^{-|s|/tau_i} / (2 tau_i)) Xi2_bar,
 * spectra 1 + xi_i / (1 + Omega^2 tau_i^2).  The Xi_1 quadrature is squeezed
 * (xi1 < 0), Xi_3 anti-squeezed, (1 + xi1)(1 + xi3) = 1.
 */
struct SqueezedInput {
    double xi1 = 0.0;
    double xi3 = 0.0;
    double tau1 = 0.0;    ///< correlation time of the squeezed quadrature
    double tau3 = 0.0;    ///< correlation time of the anti-squeezed quadrature (= tau_c)
    double gammaC = 0.0;  ///< cavity loss rate through the output mirror (0 for broadband)
    double kappaD = 0.0;  ///< parametric gain rate (0 for broadband)

    double tau_c() const { return tau3; }
    bool is_broadband() const { return tau1 == 0.0 && tau3 == 0.0; }

    /** @brief From the cavity rates: tau1 = 1/(gC/2 + kD), tau3 = 1/(gC/2 - kD). */
    static SqueezedInput from_cavity(double gammaC, double kappaD) {
        const double g = 0.5 * gammaC;
        if (!(gammaC > 0.0) || !(kappaD >= 0.0) || !(kappaD < g))
            throw DomainError("SqueezedInput: need gammaC > 0 and 0 <= kappaD < gammaC/2 (below threshold)");
        SqueezedInput s;
        s.gammaC = gammaC;
        s.kappaD = kappaD;
        s.tau1 = 1.0 / (g + kappaD);
        s.tau3 = 1.0 / (g - kappaD);
        s.xi1 = -4.0 * g * kappaD / ((g + kappaD) * (g + kappaD));
        s.xi3 = 4.0 * g * kappaD / ((g - kappaD) * (g - kappaD));
        return s;
    }

    /** @brief From the anti-squeezed Mandel parameter 1 + xi3 and correlation time tau3 = tau_c. */
    static SqueezedInput from_xi3_tau(double xi3, double tau_c) {
        if (!(xi3 >= 0.0)) throw DomainError("SqueezedInput: xi3 must be >= 0");
        if (!(tau_c > 0.0)) throw DomainError("SqueezedInput: tau_c must be > 0 (use broadband() for tau_c -> 0)");
        const double r = std::sqrt(1.0 + xi3);  // (g + kD) / (g - kD)
        const double g = (r + 1.0) / (2.0 * tau_c);
        const double kD = g * (r - 1.0) / (r + 1.0);
        return from_cavity(2.0 * g, kD);
    }

    /** @brief Broadband limit tau -> 0 with the given anti-squeezed level; xi1 from minimal uncertainty. */
    static SqueezedInput broadband(double xi3) {
        if (!(xi3 >= 0.0)) throw DomainError("SqueezedInput: xi3 must be >= 0");
        SqueezedInput s;
        s.xi3 = xi3;
        s.xi1 = 1.0 / (1.0 + xi3) - 1.0;
        return s;
    }

    /** @brief Vacuum (xi = 0). */
    static SqueezedInput vacuum() { return SqueezedInput{}; }

    /** @throws DomainError if the record is not a minimal-uncertainty squeezed state. */
    void validate() const {
        if (!(1.0 + xi1 > 0.0) || !(1.0 + xi3 > 0.0)) throw DomainError("SqueezedInput: 1 + xi must be positive");
        if (std::abs((1.0 + xi1) * (1.0 + xi3) - 1.0) > 1e-9)
            throw DomainError("SqueezedInput: (1 + xi1)(1 + xi3) must equal 1");
        if (tau1 < 0.0 || tau3 < tau1) throw DomainError("SqueezedInput: need 0 <= tau1 <= tau3");
    }
};

/** @brief Joint Gaussian state of light (time grid) and spin (space grid). */
struct GaussianState {
    Grid grid;
    Mat cov;                  ///< stacked (Xi_I, Xi_III, T_I, T_III) cell-average covariance
    Eigen::Matrix2d white_field = Eigen::Matrix2d::Zero();  ///< delta weights of (Xi_I, Xi_III) noise
    Eigen::Matrix2d white_spin = Eigen::Matrix2d::Zero();   ///< delta weights of (T_I, T_III) noise
    double Xi2_bar = 1.0;
    double Fz_bar = 1.0;
    double cbar13 = 0.5;

    int n_t() const { return grid.n_t; }
    int n_z() const { return grid.n_z; }
    int size() const { return 2 * grid.n_t + 2 * grid.n_z; }
    int offset(Channel c) const {
        switch (c) {
            case Channel::Xi_I: return 0;
            case Channel::Xi_III: return grid.n_t;
            case Channel::T_I: return 2 * grid.n_t;
            case Channel::T_III: return 2 * grid.n_t + grid.n_z;
        }
        return 0;
    }
    static bool is_field(Channel c) { return c == Channel::Xi_I || c == Channel::Xi_III; }
    int length(Channel c) const { return is_field(c) ? grid.n_t : grid.n_z; }
    /** @brief Covariance block between two channels. */
    Mat block(Channel a, Channel b) const { return cov.block(offset(a), offset(b), length(a), length(b)); }
    /** @brief Vacuum (shot-noise) delta weight of a channel. */
    double shot_level(Channel c) const { return is_field(c) ? Xi2_bar : 0.5 * cbar13 * std::abs(Fz_bar); }
    /** @brief Shot-noise variance of a single cell average of a channel. */
    double shot_cell(Channel c) const { return shot_level(c) / (is_field(c) ? grid.dt() : grid.dz()); }

    void validate() const {
        grid.validate();
        if (cov.rows() != size() || cov.cols() != size()) throw DimensionError("GaussianState: covariance size mismatch");
    }
};

inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::Xi_I: return "Xi_I";
        case Channel::Xi_III: return "Xi_III";
        case Channel::T_I: return "T_I";
        case Channel::T_III: return "T_III";
    }
    return "?";
}

/** @brief Covariance blocks of one conjugate pair: auto blocks and the white level. */
struct PairCovariance {
    Mat cov_I;
    Mat cov_III;
    Eigen::Matrix2d white = Eigen::Matrix2d::Zero();
};

namespace detail {
/** @brief Cell-average covariance of the exponential kernel e^{-|s|/tau} / (2 tau) on n cells of width d. */
inline Mat exponential_cell_covariance(int n, double d, double tau) {
    Mat C(n, n);
    const double x = d / tau;
    const double diag = (d - tau * (-std::expm1(-x))) / (d * d);
    const double one_minus = -std::expm1(-x);
    const double off0 = 0.5 * tau * one_minus * one_minus / (d * d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int k = std::abs(i - j);
            C(i, j) = (k == 0) ? diag : off0 * std::exp(-(k - 1) * x);
        }
    return C;
}
}  // namespace detail

/**
 * @brief Input light covariance of the squeezed vacuum on the time grid.
 *
 * With @p broadband (or a broadband record) the correlators are (1 + xi) delta(s)
 * Xi2_bar; otherwise a delta part Xi2_bar plus the cell-averaged exponential
 * part.  The Xi_1/Xi_3 cross-covariance is zero (principal-axis frame).
 */
inline PairCovariance input_field_covariance(const SqueezedInput& sq, const Grid& grid, double Xi2_bar,
                                             bool broadband) {
    sq.validate();
    grid.validate();
    const int n = grid.n_t;
    const double dt = grid.dt();
    PairCovariance pc;
    if (broadband || sq.is_broadband()) {
        pc.cov_I = Mat::Identity(n, n) * ((1.0 + sq.xi1) * Xi2_bar / dt);
        pc.cov_III = Mat::Identity(n, n) * ((1.0 + sq.xi3) * Xi2_bar / dt);
        pc.white << (1.0 + sq.xi1) * Xi2_bar, 0.0, 0.0, (1.0 + sq.xi3) * Xi2_bar;
        return pc;
    }
    pc.cov_I = Mat::Identity(n, n) * (Xi2_bar / dt) +
               sq.xi1 * Xi2_bar * detail::exponential_cell_covariance(n, dt, sq.tau1);
    pc.cov_III = Mat::Identity(n, n) * (Xi2_bar / dt) +
                 sq.xi3 * Xi2_bar * detail::exponential_cell_covariance(n, dt, sq.tau3);
    pc.white << Xi2_bar, 0.0, 0.0, Xi2_bar;
    return pc;
}

/**
 * @brief Coherent spin state: <{T_I, T_I}>/2 = <{T_III, T_III}>/2 = (cbar13 |Fz_bar| / 2) delta(z - z').
 */
inline PairCovariance input_spin_covariance(const Grid& grid, double Fz_bar, double cbar13) {
    grid.validate();
    const int n = grid.n_z;
    const double level = 0.5 * cbar13 * std::abs(Fz_bar);
    PairCovariance pc;
    pc.cov_I = Mat::Identity(n, n) * (level / grid.dz());
    pc.cov_III = pc.cov_I;
    pc.white << level, 0.0, 0.0, level;
    return pc;
}

/** @brief Assemble a product state of the given light and spin blocks. */
inline GaussianState make_state(const Grid& grid, const InterfaceParams& p, const PairCovariance& field,
                                const PairCovariance& spin) {
    GaussianState s;
    s.grid = grid;
    s.Xi2_bar = p.Xi2_bar;
    s.Fz_bar = p.Fz_bar;
    s.cbar13 = p.cbar13;
    s.cov = Mat::Zero(s.size(), s.size());
    const int nt = grid.n_t, nz = grid.n_z;
    if (field.cov_I.rows() != nt || spin.cov_I.rows() != nz) throw DimensionError("make_state: block sizes do not match grid");
    s.cov.block(0, 0, nt, nt) = field.cov_I;
    s.cov.block(nt, nt, nt, nt) = field.cov_III;
    s.cov.block(2 * nt, 2 * nt, nz, nz) = spin.cov_I;
    s.cov.block(2 * nt + nz, 2 * nt + nz, nz, nz) = spin.cov_III;
    s.white_field = field.white;
    s.white_spin = spin.white;
    return s;
}

/** @brief Squeezed (or vacuum) light and coherent spin, the standard protocol input. */
inline GaussianState input_state(const InterfaceParams& p, const Grid& grid, const SqueezedInput& sq, bool broadband) {
    return make_state(grid, p, input_field_covariance(sq, grid, p.Xi2_bar, broadband),
                      input_spin_covariance(grid, p.Fz_bar, p.cbar13));
}

/**
 * @brief Propagate a state through a transfer: cov_out = M cov M^T + subgrid terms.
 *
 * The subgrid terms are the transfer's Gram blocks weighted by the input
 * white levels; the output white levels equal the input ones (the kernels
 * are bounded, so only the identity part transmits delta-correlated noise).
 * @throws DimensionError on grid mismatch.
 */
inline GaussianState propagate(const GaussianState& in, const TransferMatrix& tm) {
    in.validate();
    if (!(in.grid == tm.grid)) throw DimensionError("propagate: state grid does not match transfer grid");
    const int nt = tm.n_t(), nz = tm.n_z();
    GaussianState out = in;
    const Mat M = tm.stacked();
    Mat tmp(in.size(), in.size());
    tmp.noalias() = M * in.cov;
    out.cov.noalias() = tmp * M.transpose();
    if (tm.has_subgrid) {
        // Index maps: channel-I outputs (Xi_I, T_I) and channel-III outputs (Xi_III, T_III) in stacked order.
        std::vector<int> idx_I, idx_III;
        for (int i = 0; i < nt; ++i) { idx_I.push_back(i); idx_III.push_back(nt + i); }
        for (int i = 0; i < nz; ++i) { idx_I.push_back(2 * nt + i); idx_III.push_back(2 * nt + nz + i); }
        Vec S(nt + nz);  // channel-III rows = S * channel-I rows for field input, -S * for spin input
        S.head(nt).setOnes();
        S.tail(nz).setConstant(-1.0);
        auto add = [&](const Mat& E, const Eigen::Matrix2d& W, double spin_sign) {
            const Mat ES = E * S.asDiagonal();
            const Mat SE = S.asDiagonal() * E;
            const Mat SES = SE * S.asDiagonal();
            const int n = nt + nz;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    out.cov(idx_I[r], idx_I[c]) += W(0, 0) * E(r, c);
                    out.cov(idx_III[r], idx_III[c]) += W(1, 1) * SES(r, c);
                    out.cov(idx_I[r], idx_III[c]) += spin_sign * W(0, 1) * ES(r, c);
                    out.cov(idx_III[r], idx_I[c]) += spin_sign * W(1, 0) * SE(r, c);
                }
        };
        add(tm.E_field, in.white_field, 1.0);
        add(tm.E_spin, in.white_spin, -1.0);
    }
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

/**
 * @brief Rotate the light pair at position z (or the spin pair at time t) of a state.
 *
 * Applies the same orthogonal map as rotate_field / rotate_spin to the
 * covariance.  Rotating delta-correlated noise with unequal levels by a
 * cell-dependent angle produces non-stationary white noise, which the state
 * cannot represent; that case is rejected.
 * @throws DomainError for non-representable rotations.
 */
inline GaussianState rotate_state(const GaussianState& s, FrameDirection dir, const PhaseParams& ph, bool field,
                                  double position) {
    s.validate();
    const int n = field ? s.n_t() : s.n_z();
    const int o1 = field ? s.offset(Channel::Xi_I) : s.offset(Channel::T_I);
    const int o2 = field ? s.offset(Channel::Xi_III) : s.offset(Channel::T_III);
    const double sgn = (dir == FrameDirection::in) ? 1.0 : -1.0;
    std::vector<double> ang(n);
    for (int i = 0; i < n; ++i)
        ang[i] = field ? ph.phi(position, s.grid.t_mid(i)) : ph.phi(s.grid.z_mid(i), position);
    // 2x2 map on (first, second) per cell.
    auto rot = [&](double phi) {
        Eigen::Matrix2d R;
        const double c = std::cos(phi), sn = sgn * std::sin(phi);
        if (field) R << c, -sn, sn, c;
        else R << c, sn, -sn, c;
        return R;
    };
    const Eigen::Matrix2d& W = field ? s.white_field : s.white_spin;
    const bool isotropic = std::abs(W(0, 1)) <= 1e-15 * W.norm() && std::abs(W(1, 0)) <= 1e-15 * W.norm() &&
                           std::abs(W(0, 0) - W(1, 1)) <= 1e-12 * W.norm();
    bool constant = true;
    for (int i = 1; i < n; ++i) constant = constant && std::abs(std::remainder(ang[i] - ang[0], 2.0 * M_PI)) < 1e-12;
    if (!isotropic && !constant)
        throw DomainError("rotate_state: cell-dependent rotation of anisotropic white noise is not representable");
    Mat R = Mat::Identity(s.size(), s.size());
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix2d r = rot(ang[i]);
        R(o1 + i, o1 + i) = r(0, 0);
        R(o1 + i, o2 + i) = r(0, 1);
        R(o2 + i, o1 + i) = r(1, 0);
        R(o2 + i, o2 + i) = r(1, 1);
    }
    GaussianState out = s;
    out.cov = R * s.cov * R.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    const Eigen::Matrix2d r0 = rot(ang[0]);
    (field ? out.white_field : out.white_spin) = isotropic ? W : Eigen::Matrix2d(r0 * W * r0.transpose());
    return out;
}

/** @brief Abscissa of a spectrum: light frequency or spin wave number. */
enum class SpectralDomain { frequency, wavenumber };

/** @brief Mode-resolved Mandel parameters 1 + xi, normalised to shot noise. */
struct MandelSpectrum {
    Channel channel = Channel::Xi_I;
    SpectralDomain domain = SpectralDomain::frequency;
    std::vector<double> abscissa;  ///< Omega_k = pi k / T or q_k = pi k / L
    std::vector<double> values;
};

/** @brief Orthonormal cosine (DCT-II) basis vector k on n cells, as a column of a matrix. */
inline Mat cosine_basis(int n) {
    Mat B(n, n);
    for (int k = 0; k < n; ++k) {
        const double c = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i) B(i, k) = c * std::cos(M_PI * k * (i + 0.5) / n);
    }
    return B;
}

/**
 * @brief Standing-wave spectrum of one channel: value_k = v_k^T C v_k / (cell shot noise).
 *
 * Uses the orthonormal cosine basis on [0, T] (light) or [0, L] (spin); k = 0
 * is the integral collective mode.
 */
inline MandelSpectrum mandel_spectrum(const GaussianState& s, Channel ch) {
    s.validate();
    const int n = s.length(ch);
    const Mat B = cosine_basis(n);
    const Mat C = s.block(ch, ch);
    const Mat P = B.transpose() * C * B;
    MandelSpectrum m;
    m.channel = ch;
    const bool light = GaussianState::is_field(ch);
    m.domain = light ? SpectralDomain::frequency : SpectralDomain::wavenumber;
    const double extent = light ? s.grid.T : s.grid.L;
    const double shot = s.shot_cell(ch);
    for (int k = 0; k < n; ++k) {
        m.abscissa.push_back(M_PI * k / extent);
        m.values.push_back(P(k, k) / shot);
    }
    return m;
}

/** @brief Shot-normalised covariance of one channel block: C / (cell shot noise). */
inline Mat normalized_block(const GaussianState& s, Channel ch) { return s.block(ch, ch) / s.shot_cell(ch); }

}  // namespace lai
