// SPDX-License-Identifier: MIT
/**
 * @file oracle.hpp
 * @brief Reference covariance propagation by brute-force PDE integration.
 *
 * Independent of the Bessel-kernel transfer: the interaction-frame wave
 * equations are integrated with the trapezoidal box scheme on a grid refined
 * r times, one sweep per fine input basis vector, giving the dense fine-level
 * map of each quadrature channel.  Input statistics are sampled on the fine
 * cells and outputs are averaged back to the coarse cells.  Intended for
 * validation (it costs O((n r)^3) per channel).
 */
#pragma once

#include "lai/propagator.hpp"
#include "lai/spectral.hpp"

namespace lai {

/** @brief Per-channel covariances over (light cells, spin cells); no I/III cross-correlation. */
struct ChannelCovariance {
    Mat I;
    Mat III;
    int n_t = 0;  ///< light cells in the ordering
    int n_z = 0;  ///< spin cells in the ordering
};

/** @brief Dense box-scheme maps of both channels (fine inputs -> coarse or fine outputs). */
struct OracleMaps {
    Mat B_I;
    Mat B_III;
    Grid grid;
    int refine = 1;
    bool coarse_output = true;
};

inline OracleMaps oracle_maps(const InterfaceParams& p, const Grid& grid, int refine, bool coarse_output) {
    if (refine < 1) throw DomainError("oracle_maps: refine must be >= 1");
    OracleMaps m;
    m.grid = grid;
    m.refine = refine;
    m.coarse_output = coarse_output;
    m.B_I = oracle_channel_map(p, grid, refine, +1.0, coarse_output);
    m.B_III = oracle_channel_map(p, grid, refine, -1.0, coarse_output);
    return m;
}

/** @brief The refined grid used by the oracle. */
inline Grid refined(const Grid& g, int refine) { return Grid{g.n_t * refine, g.n_z * refine, g.T, g.L}; }

/** @brief Stack light and spin pair covariances into per-channel (light, spin) blocks. */
inline ChannelCovariance stack_channels(const PairCovariance& field, const PairCovariance& spin) {
    ChannelCovariance c;
    c.n_t = static_cast<int>(field.cov_I.rows());
    c.n_z = static_cast<int>(spin.cov_I.rows());
    const int n = c.n_t + c.n_z;
    c.I = Mat::Zero(n, n);
    c.III = Mat::Zero(n, n);
    c.I.topLeftCorner(c.n_t, c.n_t) = field.cov_I;
    c.I.bottomRightCorner(c.n_z, c.n_z) = spin.cov_I;
    c.III.topLeftCorner(c.n_t, c.n_t) = field.cov_III;
    c.III.bottomRightCorner(c.n_z, c.n_z) = spin.cov_III;
    return c;
}

/** @brief Fine-level protocol input: squeezed/vacuum light and coherent spins on the refined grid. */
inline ChannelCovariance oracle_input(const InterfaceParams& p, const Grid& grid, int refine, const SqueezedInput& sq,
                                      bool broadband) {
    const Grid f = refined(grid, refine);
    return stack_channels(input_field_covariance(sq, f, p.Xi2_bar, broadband), input_spin_covariance(f, p.Fz_bar, p.cbar13));
}

/** @brief Push fine-level input covariances through the oracle maps. */
inline ChannelCovariance oracle_apply(const OracleMaps& m, const ChannelCovariance& in) {
    if (in.I.rows() != m.B_I.cols()) throw DimensionError("oracle_apply: input size does not match oracle map");
    ChannelCovariance out;
    out.n_t = m.coarse_output ? m.grid.n_t : m.grid.n_t * m.refine;
    out.n_z = m.coarse_output ? m.grid.n_z : m.grid.n_z * m.refine;
    out.I = m.B_I * in.I * m.B_I.transpose();
    out.III = m.B_III * in.III * m.B_III.transpose();
    return out;
}

/** @brief Convert coarse per-channel covariances into a GaussianState (white levels supplied by the caller). */
inline GaussianState oracle_state(const ChannelCovariance& c, const Grid& grid, const InterfaceParams& p,
                                  const Eigen::Matrix2d& white_field, const Eigen::Matrix2d& white_spin) {
    if (c.n_t != grid.n_t || c.n_z != grid.n_z) throw DimensionError("oracle_state: covariance is not on the coarse grid");
    GaussianState s;
    s.grid = grid;
    s.Xi2_bar = p.Xi2_bar;
    s.Fz_bar = p.Fz_bar;
    s.cbar13 = p.cbar13;
    s.cov = Mat::Zero(s.size(), s.size());
    const int nt = grid.n_t, nz = grid.n_z;
    auto place = [&](const Mat& C, int of, int os) {
        s.cov.block(of, of, nt, nt) = C.topLeftCorner(nt, nt);
        s.cov.block(os, os, nz, nz) = C.bottomRightCorner(nz, nz);
        s.cov.block(of, os, nt, nz) = C.topRightCorner(nt, nz);
        s.cov.block(os, of, nz, nt) = C.bottomLeftCorner(nz, nt);
    };
    place(c.I, 0, 2 * nt);
    place(c.III, nt, 2 * nt + nz);
    s.white_field = white_field;
    s.white_spin = white_spin;
    return s;
}

/**
 * @brief Read-stage fine input: fresh vacuum light plus the spin part of a fine write output.
 */
inline ChannelCovariance oracle_read_input(const ChannelCovariance& fine_written, const InterfaceParams& read,
                                           const Grid& fine) {
    if (fine_written.n_z != fine.n_z) throw DimensionError("oracle_read_input: spin grid mismatch");
    const PairCovariance vac = input_field_covariance(SqueezedInput::vacuum(), fine, read.Xi2_bar, true);
    ChannelCovariance c;
    c.n_t = fine.n_t;
    c.n_z = fine.n_z;
    const int n = c.n_t + c.n_z;
    c.I = Mat::Zero(n, n);
    c.III = Mat::Zero(n, n);
    c.I.topLeftCorner(c.n_t, c.n_t) = vac.cov_I;
    c.III.topLeftCorner(c.n_t, c.n_t) = vac.cov_III;
    c.I.bottomRightCorner(c.n_z, c.n_z) = fine_written.I.bottomRightCorner(c.n_z, c.n_z);
    c.III.bottomRightCorner(c.n_z, c.n_z) = fine_written.III.bottomRightCorner(c.n_z, c.n_z);
    return c;
}

}  // namespace lai
