// SPDX-License-Identifier: MIT
/**
 * @file memory.hpp
 * @brief Write / store / retrieve protocol of the light–atom quantum memory.
 *
 * Write-in: squeezed light and coherent spins pass through the A < 0
 * transfer; the stored observables are the interaction-frame alignment waves
 * T_I, T_III at t = T.  Storage is ideal.  Retrieval: a second coherent pulse
 * (A' < 0, duration T') reads the stored spins onto fresh vacuum light.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lai/coupling.hpp"
#include "lai/errors.hpp"
#include "lai/params.hpp"
#include "lai/propagator.hpp"
#include "lai/spectral.hpp"

namespace lai {

/** @brief A full memory scenario. */
struct ProtocolRun {
    InterfaceParams write;     ///< write-in stage (A < 0, duration T)
    InterfaceParams read;      ///< retrieval stage (A' < 0, duration T')
    SqueezedInput input;       ///< light statistics at the write-in stage
    Grid grid;                 ///< write grid: n_t cells on [0, T], n_z cells on [0, L]
    Grid read_grid;            ///< read grid: n_t' cells on [0, T'], the same spin grid
    bool broadband = true;     ///< treat the input as delta-correlated (tau_c -> 0)
    bool optimal_retrieval = true;  ///< snap kappa1 L to a multiple of 2 pi in both stages

    /** @throws DomainError / DimensionError for inconsistent scenarios. */
    void validate() const {
        grid.validate();
        read_grid.validate();
        input.validate();
        if (!(cooperative_A(write) < 0.0) || !(cooperative_A(read) < 0.0))
            throw DomainError("ProtocolRun: both stages need A < 0 (memory branch)");
        if (read_grid.n_z != grid.n_z || read_grid.L != grid.L)
            throw DimensionError("ProtocolRun: write and read stages must share the spin grid");
        if (write.T != grid.T || write.L != grid.L || read.T != read_grid.T || read.L != read_grid.L)
            throw DimensionError("ProtocolRun: stage durations/lengths must match their grids");
    }
};

/**
 * @brief Build a scenario in natural units (T = L = 1 unless given) from the cooperative parameters.
 *
 * @p base supplies eps, Fz_bar > 0, cbar13, kappa1 and the flags; Xi2_bar of
 * each stage is solved from ATL and A'T'L.  The read duration is T' = T.
 */
inline ProtocolRun memory_run(double write_ATL, double read_ATL, const SqueezedInput& sq, bool broadband, int n,
                              InterfaceParams base = {}, bool optimal_retrieval = true) {
    if (!(write_ATL < 0.0) || !(read_ATL < 0.0)) throw DomainError("memory_run: ATL and A'T'L must be negative");
    if (!(base.Fz_bar > 0.0)) throw DomainError("memory_run: the memory scenario needs Fz_bar > 0");
    if (optimal_retrieval) base = snap_optimal_retrieval(base);
    ProtocolRun r;
    r.write = params_for_ATL(write_ATL, base);
    r.read = params_for_ATL(read_ATL, base);
    r.input = sq;
    r.grid = Grid{n, n, base.T, base.L};
    r.read_grid = r.grid;
    r.broadband = broadband;
    r.optimal_retrieval = optimal_retrieval;
    r.validate();
    return r;
}

inline PhaseParams phases(const InterfaceParams& p) { return PhaseParams{p.kappa1, p.omega_bar_effective()}; }

/** @brief Post-write joint state (interaction frame of the write stage). */
inline GaussianState run_write(const ProtocolRun& run) {
    run.validate();
    const TransferMatrix tm = build_transfer(run.write, run.grid);
    return propagate(input_state(run.write, run.grid, run.input, run.broadband), tm);
}

/**
 * @brief Read-stage input: fresh vacuum light and the stored spins, re-expressed in the read frame.
 *
 * The stored waves are taken out of the write frame at t = T and into the read
 * frame at t = 0; with equal kappa1 and OmegaBar = 0 this is the identity.
 */
inline GaussianState read_input(const GaussianState& post_write, const ProtocolRun& run) {
    run.validate();
    if (!(post_write.grid == run.grid)) throw DimensionError("read_input: state is not on the write grid");
    GaussianState lab = rotate_state(post_write, FrameDirection::out, phases(run.write), false, run.grid.T);
    lab = rotate_state(lab, FrameDirection::in, phases(run.read), false, 0.0);
    const int nt = run.grid.n_t, nz = run.grid.n_z;
    PairCovariance spin;
    spin.cov_I = lab.cov.block(2 * nt, 2 * nt, nz, nz);
    spin.cov_III = lab.cov.block(2 * nt + nz, 2 * nt + nz, nz, nz);
    spin.white = lab.white_spin;
    GaussianState in = make_state(run.read_grid, run.read,
                                  input_field_covariance(SqueezedInput::vacuum(), run.read_grid, run.read.Xi2_bar, true), spin);
    // Stored I/III cross-correlations survive storage.
    const int ntr = run.read_grid.n_t;
    in.cov.block(2 * ntr, 2 * ntr + nz, nz, nz) = lab.cov.block(2 * nt, 2 * nt + nz, nz, nz);
    in.cov.block(2 * ntr + nz, 2 * ntr, nz, nz) = lab.cov.block(2 * nt + nz, 2 * nt, nz, nz);
    return in;
}

/** @brief Retrieval: second propagation with the read-stage transfer. */
inline GaussianState run_read(const GaussianState& post_write, const ProtocolRun& run) {
    const GaussianState in = read_input(post_write, run);
    return propagate(in, build_transfer(run.read, run.read_grid));
}

/** @brief One regime inequality: value of LHS/RHS and its status. */
struct RegimeItem {
    std::string name;
    double value;
    Status status;
};

/** @brief Characteristic scales and the storage/retrieval window inequalities. */
struct RegimeReport {
    double q_c = 0.0;      ///< sqrt(|A| T / L)
    double Omega_c = 0.0;  ///< sqrt(|A'| L / T')
    double l_c = 0.0;      ///< 1 / q_c
    std::vector<RegimeItem> items;
    Status overall = Status::pass;
};

/**
 * @brief Write-stage window |A| tau_c << q_c, 1/L << q_c; read-stage window |A'| l_c << Omega_c', 1/T' << Omega_c';
 *        collective-mode window |A| tau_c << 1/L.
 */
inline RegimeReport regime_windows(const ProtocolRun& run) {
    const double A = std::abs(cooperative_A(run.write)), Ap = std::abs(cooperative_A(run.read));
    const double T = run.write.T, L = run.write.L, Tp = run.read.T;
    const double tau_c = run.broadband ? 0.0 : run.input.tau_c();
    RegimeReport r;
    r.q_c = std::sqrt(A * T / L);
    r.l_c = 1.0 / r.q_c;
    r.Omega_c = std::sqrt(Ap * L / Tp);
    const double m1 = A * tau_c / r.q_c;
    const double m2 = 1.0 / (L * r.q_c);
    const double m3 = Ap * r.l_c / r.Omega_c;
    const double m4 = 1.0 / (Tp * r.Omega_c);
    const double m5 = A * tau_c * L;
    r.items = {{"|A| tau_c << q_c", m1, much_less(m1)},
               {"1/L << q_c", m2, much_less(m2)},
               {"|A'| l_c << Omega_c'", m3, much_less(m3)},
               {"1/T' << Omega_c'", m4, much_less(m4)},
               {"|A| tau_c << 1/L (collective modes)", m5, much_less(m5)}};
    for (const auto& it : r.items)
        if (static_cast<int>(it.status) > static_cast<int>(r.overall)) r.overall = it.status;
    return r;
}

/** @brief A readout mode and the Mandel parameters of the squeezed and conjugate quadratures on it. */
struct ReadoutMode {
    Channel channel = Channel::Xi_I;
    Vec mode;                         ///< unit vector over the channel's cells
    double variance = 1.0;            ///< 1 + xi of the squeezed channel on the mode
    double conjugate_variance = 1.0;  ///< 1 + xi of the conjugate channel on the same mode
};

inline Channel conjugate(Channel c) {
    switch (c) {
        case Channel::Xi_I: return Channel::Xi_III;
        case Channel::Xi_III: return Channel::Xi_I;
        case Channel::T_I: return Channel::T_III;
        case Channel::T_III: return Channel::T_I;
    }
    return c;
}

/**
 * @brief Minimum-variance eigenmode of a channel's shot-normalised covariance.
 *
 * Default: the retrieved light Xi_I (best temporal mode); pass T_I for the
 * stored spin wave (best spatial mode).  The sign of the mode is fixed by a
 * positive sum (deterministic output).
 */
inline ReadoutMode optimize_readout_mode(const GaussianState& s, Channel ch = Channel::Xi_I) {
    const Mat C = normalized_block(s, ch);
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    if (es.info() != Eigen::Success) throw SolverError("optimize_readout_mode: eigen-decomposition failed");
    ReadoutMode r;
    r.channel = ch;
    r.mode = es.eigenvectors().col(0);
    if (r.mode.sum() < 0.0) r.mode = -r.mode;
    r.variance = es.eigenvalues()(0);
    r.conjugate_variance = r.mode.dot(normalized_block(s, conjugate(ch)) * r.mode);
    return r;
}

/**
 * @brief Fidelity of a Gaussian squeezed state reproduction in Mandel parameters:
 *        F = 2 / sqrt((2 + xi1_in + xi1_out)(2 + xi3_in + xi3_out)).
 * @throws DomainError if any 1 + xi is not positive.
 */
inline double quantum_fidelity(const SqueezedInput& in, double xi1_out, double xi3_out) {
    if (!(1.0 + in.xi1 > 0.0) || !(1.0 + in.xi3 > 0.0) || !(1.0 + xi1_out > 0.0) || !(1.0 + xi3_out > 0.0))
        throw DomainError("quantum_fidelity: all Mandel parameters 1 + xi must be positive");
    return 2.0 / std::sqrt((2.0 + in.xi1 + xi1_out) * (2.0 + in.xi3 + xi3_out));
}

/** @brief Outcome of the measure-and-prepare benchmark with N attempts. */
struct ClassicalResult {
    double F = 0.0;
    bool constraint_ok = false;
    long N = 0;
    double D3_theta = 0.0;
};

/**
 * @brief Homodyne measure-and-prepare benchmark: F = 1/sqrt(1 + (D3 theta_N)^2),
 *        D3 = (1 + xi3)/2, theta_N = pi/N, T_N = T/N; admissible iff sqrt(tau_c/T_N) < (D3 theta_N)^2 < 1.
 */
inline ClassicalResult classical_benchmark(const SqueezedInput& in, double T, long N) {
    if (N < 1) throw DomainError("classical_benchmark: N must be >= 1");
    if (!(T > 0.0)) throw DomainError("classical_benchmark: T must be positive");
    ClassicalResult r;
    r.N = N;
    const double D3 = 0.5 * (1.0 + in.xi3);
    r.D3_theta = D3 * M_PI / static_cast<double>(N);
    const double x2 = r.D3_theta * r.D3_theta;
    r.F = 1.0 / std::sqrt(1.0 + x2);
    const double TN = T / static_cast<double>(N);
    r.constraint_ok = std::sqrt(in.tau_c() / TN) < x2 && x2 < 1.0;
    return r;
}

/**
 * @brief Best admissible classical benchmark by exhaustive scan N = 1 .. N_max.
 *
 * If no N is admissible the result has constraint_ok = false, N = 0 and F = 0
 * (the benchmark protocol cannot operate).
 */
inline ClassicalResult best_classical(const SqueezedInput& in, double T, long N_max = 1000000) {
    ClassicalResult best;
    for (long N = 1; N <= N_max; ++N) {
        const ClassicalResult r = classical_benchmark(in, T, N);
        if (r.constraint_ok && r.F > best.F) best = r;
    }
    return best;
}

/** @brief Quantum vs classical fidelity of one scenario. */
struct FidelityReport {
    double quantum_F = 0.0;        ///< stored state on the best spatial mode
    double retrieval_F = 0.0;      ///< retrieved light on the best temporal mode
    double classical_F = 0.0;      ///< best admissible classical benchmark (0 if none)
    bool classical_constraint_ok = false;
    long classical_N = 0;
    ReadoutMode stored_mode;       ///< chosen spatial mode (T_I)
    ReadoutMode retrieved_mode;    ///< chosen temporal mode (Xi_I)
};

/** @brief Fidelities of a write (and optional read) result. */
inline FidelityReport fidelity_report(const ProtocolRun& run, const GaussianState& post_write,
                                      const GaussianState* retrieved = nullptr) {
    FidelityReport f;
    f.stored_mode = optimize_readout_mode(post_write, Channel::T_I);
    f.quantum_F = quantum_fidelity(run.input, f.stored_mode.variance - 1.0, f.stored_mode.conjugate_variance - 1.0);
    if (retrieved != nullptr) {
        f.retrieved_mode = optimize_readout_mode(*retrieved, Channel::Xi_I);
        f.retrieval_F =
            quantum_fidelity(run.input, f.retrieved_mode.variance - 1.0, f.retrieved_mode.conjugate_variance - 1.0);
    }
    const SqueezedInput cl = run.broadband ? SqueezedInput::broadband(run.input.xi3) : run.input;
    const ClassicalResult c = best_classical(cl, run.write.T);
    f.classical_F = c.F;
    f.classical_constraint_ok = c.constraint_ok;
    f.classical_N = c.N;
    return f;
}

}  // namespace lai
