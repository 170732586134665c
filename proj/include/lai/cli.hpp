// SPDX-License-Identifier: MIT
/**
 * @file cli.hpp
 * @brief Scenario pipelines behind the command-line front end.
 *
 * Each command reads a validated Config, writes CSV/JSON files into an output
 * directory and returns the list of files written.  All outputs are pure
 * functions of the config (no clocks, no randomness), so reruns produce
 * byte-identical files.  Errors propagate as exceptions; exit_code() maps
 * them to the process exit status (2 config/validation, 3 numeric).
 */
#pragma once

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "lai/angular.hpp"
#include "lai/coupling.hpp"
#include "lai/entangle.hpp"
#include "lai/io.hpp"
#include "lai/memory.hpp"
#include "lai/params.hpp"
#include "lai/propagator.hpp"
#include "lai/spectral.hpp"

namespace lai::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/** @brief Process exit codes. */
enum ExitCode : int { ok = 0, config_error = 2, numeric_error = 3 };

/** @brief Map an exception to an exit code (config/validation problems vs numerical failures). */
inline int exit_code(const std::exception& e) {
    if (dynamic_cast<const NumericError*>(&e) != nullptr) return numeric_error;
    if (dynamic_cast<const ConfigError*>(&e) != nullptr || dynamic_cast<const DomainError*>(&e) != nullptr ||
        dynamic_cast<const DimensionError*>(&e) != nullptr)
        return config_error;
    return numeric_error;
}

/** @brief Run context: output directory and optional progress log. */
struct Context {
    fs::path out = "out";
    std::ostream* log = nullptr;  ///< progress messages (verbose mode)
    std::vector<fs::path> written;

    void note(const std::string& msg) const {
        if (log != nullptr) *log << msg << '\n';
    }
    void csv(const std::string& name, const io::CsvTable& t, const io::OutputHeader& h) {
        io::write_csv(out / name, t, h);
        written.push_back(out / name);
        note("wrote " + (out / name).string());
    }
    void json_file(const std::string& name, const json& j, const io::OutputHeader& h) {
        json doc;
        doc["generator"] = io::header_line(h);
        doc["module_version"] = io::kVersion;
        doc["config_hash"] = h.config_hash;
        for (auto it = j.begin(); it != j.end(); ++it) doc[it.key()] = it.value();
        io::write_text(out / name, doc.dump(2) + "\n");
        written.push_back(out / name);
        note("wrote " + (out / name).string());
    }
};

/** @brief Compact label for a parameter value in file names, e.g. -10 -> "m10", 2.5 -> "2p5". */
inline std::string tag(double v) {
    std::string s = io::fmt17(v);
    for (char& c : s) {
        if (c == '-') c = 'm';
        else if (c == '.') c = 'p';
        else if (c == '+') c = 'P';
    }
    return s;
}

/** @brief Require the config's mode to match the command. */
inline void expect_mode(const io::Config& c, const std::string& mode) {
    if (c.text("mode") != mode)
        throw ConfigError(c.source + ": config is for mode '" + c.text("mode") + "', not '" + mode + "'");
}

/** @brief Interface parameters shared by the protocol commands (Fz sign set by the scenario). */
inline InterfaceParams base_params(const io::Config& c) {
    InterfaceParams p;
    p.F0 = HalfInt::parse(c.text("params.F0"));
    p.cbar13 = alignment_coefficients(p.F0).cbar13;
    p.epsilon = c.number("params.epsilon");
    p.Fz_bar = c.number("params.Fz_abs");
    if (!(p.Fz_bar > 0.0)) throw DomainError(c.source + ": params.Fz_abs must be positive");
    p.kappa1 = c.number("params.kappa1");
    p.OmegaBar = c.number("params.OmegaBar");
    p.degenerate = c.flag("params.degenerate");
    p.T = c.number("grid.T");
    p.L = c.number("grid.L");
    return refresh(p);
}

inline int grid_n(const io::Config& c) {
    const long n = c.integer("grid.n");
    if (n < 4 || n > 4096) throw DomainError(c.source + ": grid.n must lie in [4, 4096]");
    return static_cast<int>(n);
}

/** @brief Light input statistics and the broadband flag. */
inline std::pair<SqueezedInput, bool> input_model(const io::Config& c) {
    const double m3 = c.number("input.squeeze");
    if (!(m3 >= 1.0)) throw DomainError(c.source + ": input.squeeze (1 + xi3) must be >= 1");
    if (c.text("input.bandwidth") == "broadband") return {SqueezedInput::broadband(m3 - 1.0), true};
    const double ratio = c.number("input.T_over_tau_c");
    if (!(ratio > 0.0)) throw DomainError(c.source + ": input.T_over_tau_c must be positive");
    return {SqueezedInput::from_xi3_tau(m3 - 1.0, c.number("grid.T") / ratio), false};
}

inline const Channel kChannels[] = {Channel::Xi_I, Channel::Xi_III, Channel::T_I, Channel::T_III};

/** @brief Spectra table: mode index k plus "channel:label" columns for the given states. */
inline io::CsvTable spectra_table(const std::vector<std::pair<std::string, const GaussianState*>>& states,
                                  const std::vector<Channel>& channels) {
    io::CsvTable t;
    t.columns.push_back("k");
    std::vector<std::vector<double>> cols;
    int n = 0;
    for (Channel ch : channels)
        for (const auto& [label, s] : states) {
            const MandelSpectrum m = mandel_spectrum(*s, ch);
            t.columns.push_back(std::string(to_string(ch)) + ":" + label);
            cols.push_back(m.values);
            n = std::max(n, static_cast<int>(m.values.size()));
        }
    for (int k = 0; k < n; ++k) {
        std::vector<double> r{static_cast<double>(k)};
        for (const auto& c : cols) r.push_back(k < static_cast<int>(c.size()) ? c[k] : 0.0);
        t.add_row(std::move(r));
    }
    return t;
}

inline json status_items(const std::vector<RegimeItem>& items) {
    json a = json::array();
    for (const auto& it : items) a.push_back({{"condition", it.name}, {"ratio", it.value}, {"status", to_string(it.status)}});
    return a;
}

// ---------------------------------------------------------------------------
// coupling
// ---------------------------------------------------------------------------

/** @brief kappa1, Omega1, eps and A versus detuning, plus the kappa1 zero inside the configured bracket. */
inline void cmd_coupling(const io::Config& c, Context& ctx) {
    expect_mode(c, "coupling");
    c.require({"coupling.lines"});
    const io::OutputHeader h{"coupling", c.hash()};
    const LineTable table = load_line_table(c.path("coupling.lines").string());
    if (table.lines.empty()) throw ConfigError(c.path("coupling.lines").string() + ": line file contains no lines");
    const HalfInt F0 = HalfInt::parse(c.text("coupling.F0"));
    const double cbar13 = alignment_coefficients(F0).cbar13;
    const double lo = c.number("coupling.detuning_min_MHz"), hi = c.number("coupling.detuning_max_MHz");
    const long ns = c.integer("coupling.samples");
    if (!(hi > lo) || ns < 2) throw DomainError(c.source + ": need detuning_max > detuning_min and samples >= 2");
    const double S0 = c.number("coupling.S0"), Fz = c.number("coupling.Fz_bar"), Xi2 = c.number("coupling.Xi2_bar");
    io::CsvTable t;
    t.columns = {"detuning_MHz", "kappa1_per_cm", "Omega1_rad_per_s", "epsilon", "A_per_cm_s"};
    t.comments = {"table " + table.name + ", F0 = " + F0.str() + ", S0 = " + io::fmt17(S0) + " cm^2, Fz_bar = " + io::fmt17(Fz) +
                      " /cm, Xi2_bar = " + io::fmt17(Xi2) + " /s",
                  "detuning relative to " + io::fmt17(table.reference_MHz) + " MHz; samples on a line centre are omitted"};
    for (long i = 0; i < ns; ++i) {
        const double det = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(ns - 1);
        const double w = table.omega_at(det);
        try {
            const double k1 = kappa1(table.lines, w, S0, Fz, F0);
            const double o1 = omega1(table.lines, w, S0, Xi2, F0);
            const double e = epsilon(table.lines, w, S0, F0);
            t.add_row({det, k1, o1, e, -2.0 * cbar13 * e * e * Xi2 * Fz});
        } catch (const SingularityError&) {
            ctx.note("skipping detuning " + io::fmt17(det) + " MHz (on resonance)");
        }
    }
    ctx.csv("coupling.csv", t, h);
    json rep;
    rep["table"] = table.name;
    rep["F0"] = F0.str();
    const auto br = c.numbers("coupling.zero_bracket_MHz");
    if (br.size() != 2) throw ConfigError(c.source + ": coupling.zero_bracket_MHz needs two values");
    try {
        rep["kappa1_zero_MHz"] = kappa1_zero_MHz(table, F0, br[0], br[1]);
    } catch (const NumericError& e) {
        rep["kappa1_zero_MHz"] = nullptr;
        rep["kappa1_zero_note"] = e.what();
    }
    ctx.json_file("coupling_summary.json", rep, h);
}

// ---------------------------------------------------------------------------
// memory
// ---------------------------------------------------------------------------

/** @brief Write (and optionally read) stages for each configured ATL pair: spectra, modes, fidelities, windows. */
inline void cmd_memory(const io::Config& c, Context& ctx) {
    expect_mode(c, "memory");
    c.require({"memory.write_ATL"});
    const io::OutputHeader h{"memory", c.hash()};
    const auto w = c.numbers("memory.write_ATL");
    std::vector<double> r;
    if (c.has("memory.read_ATL")) {
        r = c.numbers("memory.read_ATL");
        if (r.size() == 1) r.assign(w.size(), r[0]);
        if (r.size() != w.size()) throw ConfigError(c.source + ": memory.read_ATL must have one entry or one per write_ATL");
    }
    InterfaceParams base = base_params(c);
    const auto [sq, broadband] = input_model(c);
    const int n = grid_n(c);
    io::CsvTable fid;
    fid.columns = {"write_ATL", "read_ATL", "quantum_F", "retrieval_F", "classical_F", "classical_N", "stored_var",
                   "stored_conj_var", "retrieved_var", "retrieved_conj_var"};
    fid.comments = {"input 1+xi3 = " + io::fmt17(1.0 + sq.xi3) + ", 1+xi1 = " + io::fmt17(1.0 + sq.xi1) +
                        (broadband ? ", broadband" : ", tau_c = " + io::fmt17(sq.tau_c())),
                    "read_ATL = 0 and retrieval_F = 0 when no retrieval stage is configured; classical_F = 0 when no N is admissible",
                    "broadband input (tau_c -> 0) leaves the classical timing constraint vacuous; the N scan then stops at its bound"};
    json scenarios = json::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const bool has_read = !r.empty();
        const double ra = has_read ? r[i] : w[i];
        ctx.note("memory: ATL = " + io::fmt17(w[i]) + (has_read ? ", A'T'L = " + io::fmt17(ra) : ""));
        const ProtocolRun run = memory_run(w[i], ra, sq, broadband, n, base, c.flag("memory.optimal_retrieval"));
        const GaussianState in = input_state(run.write, run.grid, run.input, run.broadband);
        const GaussianState post = propagate(in, build_transfer(run.write, run.grid));
        const std::string stem = "memory_ATL" + tag(w[i]);
        io::CsvTable ws = spectra_table({{"in", &in}, {"out", &post}}, {Channel::T_I, Channel::T_III, Channel::Xi_I, Channel::Xi_III});
        ws.comments = {"write stage ATL = " + io::fmt17(w[i]) + ": Mandel parameters 1 + xi of standing modes",
                       "k indexes Omega_k = pi k / T (light) and q_k = pi k / L (spin)"};
        ctx.csv(stem + "_write.csv", ws, h);
        FidelityReport f;
        json sc;
        sc["write_ATL"] = w[i];
        if (has_read) {
            const GaussianState stored = read_input(post, run);
            const GaussianState out = propagate(stored, build_transfer(run.read, run.read_grid));
            io::CsvTable rs = spectra_table({{"stored", &stored}, {"after_read", &out}}, {Channel::T_I, Channel::T_III});
            const io::CsvTable rl = spectra_table({{"retrieved", &out}}, {Channel::Xi_I, Channel::Xi_III});
            for (std::size_t col = 1; col < rl.columns.size(); ++col) rs.columns.push_back(rl.columns[col]);
            for (std::size_t row = 0; row < rs.rows.size(); ++row)
                for (std::size_t col = 1; col < rl.columns.size(); ++col) rs.rows[row].push_back(rl.rows[row][col]);
            rs.comments = {"read stage A'T'L = " + io::fmt17(ra) + " after write ATL = " + io::fmt17(w[i]),
                           "k indexes Omega'_k = pi k / T' (light) and q_k = pi k / L (spin)"};
            ctx.csv(stem + "_read" + tag(ra) + ".csv", rs, h);
            f = fidelity_report(run, post, &out);
            sc["read_ATL"] = ra;
        } else {
            f = fidelity_report(run, post, nullptr);
        }
        fid.add_row({w[i], has_read ? ra : 0.0, f.quantum_F, f.retrieval_F, f.classical_F, static_cast<double>(f.classical_N),
                     f.stored_mode.variance, f.stored_mode.conjugate_variance, has_read ? f.retrieved_mode.variance : 0.0,
                     has_read ? f.retrieved_mode.conjugate_variance : 0.0});
        io::CsvTable mode;
        mode.columns = {"i", "z", "stored_mode"};
        for (int j = 0; j < run.grid.n_z; ++j)
            mode.add_row({static_cast<double>(j), run.grid.z_mid(j), f.stored_mode.mode(j)});
        mode.comments = {"minimum-variance spatial mode of the stored T_I quadrature (unit Euclidean norm over cells)"};
        ctx.csv(stem + "_stored_mode.csv", mode, h);
        const RegimeReport reg = regime_windows(run);
        sc["q_c"] = reg.q_c;
        sc["Omega_c"] = reg.Omega_c;
        sc["windows"] = status_items(reg.items);
        sc["windows_overall"] = to_string(reg.overall);
        sc["quantum_F"] = f.quantum_F;
        sc["retrieval_F"] = f.retrieval_F;
        sc["classical_F"] = f.classical_F;
        sc["classical_admissible"] = f.classical_constraint_ok;
        scenarios.push_back(sc);
    }
    ctx.csv("memory_fidelity.csv", fid, h);
    json rep;
    rep["grid_n"] = n;
    rep["input"] = {{"one_plus_xi1", 1.0 + sq.xi1}, {"one_plus_xi3", 1.0 + sq.xi3}, {"broadband", broadband}, {"tau_c", sq.tau_c()}};
    rep["scenarios"] = scenarios;
    ctx.json_file("memory_report.json", rep, h);
}

// ---------------------------------------------------------------------------
// entangle
// ---------------------------------------------------------------------------

/** @brief Joint spectra, optimal mode pair and EPR witness for each configured ATL > 0. */
inline void cmd_entangle(const io::Config& c, Context& ctx) {
    expect_mode(c, "entangle");
    c.require({"entangle.ATL"});
    const io::OutputHeader h{"entangle", c.hash()};
    const InterfaceParams base = base_params(c);
    const int n = grid_n(c);
    io::CsvTable wit;
    wit.columns = {"ATL", "V1", "V3", "sum", "separable_bound", "entangled", "pt_symplectic_min", "residual", "collective_sum"};
    wit.comments = {"variances of shot-normalised quadratures; two uncorrelated vacua give V1 = V3 = 2 (bound V1 + V3 = 4)"};
    json rows = json::array();
    for (double atl : c.numbers("entangle.ATL")) {
        ctx.note("entangle: ATL = " + io::fmt17(atl));
        const InterfaceParams p = entangle_params(atl, base);  // rejects ATL <= 0
        const Grid g{n, n, p.T, p.L};
        const GaussianState s = run_entangle(p, g);
        const ModePair m = solve_modes(p, g);
        const WitnessReport wr = entanglement_witness(s, m);
        const auto [v1, v3] = epr_variance(s, m);
        const WitnessReport wc = entanglement_witness(s, collective_modes(g));
        wit.add_row({atl, v1, v3, wr.sum, wr.separable_bound, wr.entangled ? 1.0 : 0.0, wr.pt_symplectic_min, m.residual, wc.sum});
        const std::string stem = "entangle_ATL" + tag(atl);
        io::CsvTable sp = spectra_table({{"out", &s}}, {Channel::Xi_I, Channel::Xi_III, Channel::T_I, Channel::T_III});
        sp.comments = {"output Mandel parameters for vacuum light and coherent spins, ATL = " + io::fmt17(atl)};
        ctx.csv(stem + "_spectra.csv", sp, h);
        io::CsvTable mh, mg;
        mh.columns = {"i", "t", "h"};
        mg.columns = {"i", "z", "g"};
        for (int i = 0; i < g.n_t; ++i) mh.add_row({static_cast<double>(i), g.t_mid(i), m.h(i)});
        for (int i = 0; i < g.n_z; ++i) mg.add_row({static_cast<double>(i), g.z_mid(i), m.g(i)});
        mh.comments = mg.comments = {"optimal mode pair, unit norm in the discrete L2 norm (sum v^2 d = 1)"};
        ctx.csv(stem + "_mode_h.csv", mh, h);
        ctx.csv(stem + "_mode_g.csv", mg, h);
        rows.push_back({{"ATL", atl}, {"V1", v1}, {"V3", v3}, {"sum", wr.sum}, {"entangled", wr.entangled},
                        {"pt_symplectic_min", wr.pt_symplectic_min}, {"pt_entangled", wr.pt_entangled},
                        {"residual", m.residual}});
    }
    ctx.csv("entangle_witness.csv", wit, h);
    json rep;
    rep["grid_n"] = n;
    rep["variance_convention"] = "two-vacua: shot-normalised quadratures, Var = 2 per uncorrelated vacuum pair, separable bound 4";
    rep["witness"] = rows;
    ctx.json_file("entangle_report.json", rep, h);
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/** @brief Input and output spectra of a single propagation for each ATL (either sign). */
inline void cmd_spectra(const io::Config& c, Context& ctx) {
    expect_mode(c, "spectra");
    c.require({"spectra.ATL"});
    const io::OutputHeader h{"spectra", c.hash()};
    InterfaceParams base = base_params(c);
    const auto [sq, broadband] = input_model(c);
    const int n = grid_n(c);
    for (double atl : c.numbers("spectra.ATL")) {
        InterfaceParams b = base;
        b.Fz_bar = atl < 0.0 ? std::abs(b.Fz_bar) : -std::abs(b.Fz_bar);
        const InterfaceParams p = params_for_ATL(atl, b);
        const Grid g{n, n, p.T, p.L};
        const GaussianState in = input_state(p, g, sq, broadband);
        const GaussianState out = propagate(in, build_transfer(p, g));
        io::CsvTable t = spectra_table({{"in", &in}, {"out", &out}}, {Channel::Xi_I, Channel::Xi_III, Channel::T_I, Channel::T_III});
        t.comments = {"single propagation, ATL = " + io::fmt17(atl)};
        ctx.csv("spectra_ATL" + tag(atl) + ".csv", t, h);
    }
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

/** @brief SVG for each CSV (written next to the output directory under the CSV's stem). */
inline void cmd_plot(const std::vector<fs::path>& csvs, Context& ctx) {
    if (csvs.empty()) throw ConfigError("plot: no CSV files given");
    for (const auto& p : csvs) {
        const io::CsvTable t = io::load_csv(p);
        const std::string title = t.comments.size() > 1 ? t.comments[1] : p.stem().string();
        const fs::path out = ctx.out / (p.stem().string() + ".svg");
        io::write_text(out, io::plot_csv(t, title));
        ctx.written.push_back(out);
        ctx.note("wrote " + out.string());
    }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

/** @brief Small deterministic end-to-end checks; returns true when all pass. */
inline bool cmd_selftest(Context& ctx) {
    io::CsvTable t;
    t.columns = {"check", "value", "threshold", "pass"};
    std::vector<std::string> names;
    bool all = true;
    auto add = [&](const std::string& name, double v, double thr, bool pass) {
        names.push_back(name);
        t.add_row({static_cast<double>(names.size()), v, thr, pass ? 1.0 : 0.0});
        all = all && pass;
        ctx.note(std::string(pass ? "PASS " : "FAIL ") + name + " = " + io::fmt17(v));
    };
    const auto cc = alignment_coefficients(HalfInt::integer(2));
    add("cbar13(F0=2) - 1/14", std::abs(cc.cbar13 - 1.0 / 14.0), 1e-15, std::abs(cc.cbar13 - 1.0 / 14.0) < 1e-15);
    InterfaceParams b;
    const Grid g{32, 32, 1.0, 1.0};
    const InterfaceParams pm = params_for_ATL(-10.0, b);
    const double res = symplectic_residual(build_transfer(pm, g));
    add("symplectic residual ATL=-10 n=32", res, 1e-6, res < 1e-6);
    const ProtocolRun run = memory_run(-10.0, -2.0, SqueezedInput::broadband(9.0), true, 32);
    const GaussianState post = run_write(run);
    const double k0 = mandel_spectrum(post, Channel::T_I).values[0];
    add("stored T_I k=0 Mandel parameter (squeezed)", k0, 1.0, k0 < 1.0);
    const InterfaceParams pe = entangle_params(5.0);
    const ModePair m = solve_modes(pe, g);
    const WitnessReport wr = entanglement_witness(run_entangle(pe, g), m);
    add("EPR sum ATL=+5 n=32", wr.sum, 4.0, wr.sum < 4.0);
    std::istringstream cfg("mode = memory\nmemory.write_ATL = -10\n");
    const std::string h1 = io::parse_config(cfg, "selftest").hash();
    std::istringstream cfg2("memory.write_ATL=-10 # same content\nmode=memory\n");
    const std::string h2 = io::parse_config(cfg2, "selftest").hash();
    add("config hash independent of order and comments", h1 == h2 ? 0.0 : 1.0, 0.0, h1 == h2);
    for (std::size_t i = 0; i < names.size(); ++i) t.comments.push_back("check " + std::to_string(i + 1) + ": " + names[i]);
    ctx.csv("selftest.csv", t, io::OutputHeader{"selftest", io::hex64(io::fnv1a("selftest"))});
    return all;
}

}  // namespace lai::cli
