// SPDX-License-Identifier: MIT
// lai: command-line front end of the light-atom interface simulator.
//
//   lai coupling --config configs/coupling_rb87.cfg --out out/coupling
//   lai memory   --config configs/fig3_broadband.cfg --out out/fig3 [--grid 128]
//   lai entangle --config configs/entangle_sweep.cfg --out out/ent
//   lai plot out/fig3/*.csv --out out/fig3
//   lai selftest --out out/selftest
//
// Exit codes: 0 ok, 2 config/validation error, 3 numeric/solver error.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "lai/cli.hpp"

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    int grid = 0;
    bool verbose = false;
    std::vector<std::string> csvs;
};

lai::io::Config load(const Options& o) {
    lai::io::Config c = lai::io::load_config(o.config);
    if (o.grid > 0) c.set("grid.n", std::to_string(o.grid), "--grid");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum light-atom interface simulator: memory and entanglement protocols as Gaussian covariance propagation"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s, bool config) {
        if (config) s->add_option("--config", o.config, "scenario config (flat dotted key = value)")->required()->check(CLI::ExistingFile);
        s->add_option("--out", o.out, "output directory")->capture_default_str();
        s->add_option("--grid", o.grid, "override grid.n (cells per axis)")->check(CLI::Range(4, 4096));
        s->add_flag("--verbose,-v", o.verbose, "progress messages on stderr");
    };
    CLI::App* coupling = app.add_subcommand("coupling", "kappa1, Omega1, eps, A versus detuning");
    CLI::App* memory = app.add_subcommand("memory", "write/read protocol: spectra, stored mode, fidelities");
    CLI::App* entangle = app.add_subcommand("entangle", "entanglement protocol: spectra, mode pair, EPR witness");
    CLI::App* spectra = app.add_subcommand("spectra", "input/output spectra of a single propagation");
    CLI::App* plot = app.add_subcommand("plot", "SVG plots (log ordinate, one panel per channel) from CSV files");
    CLI::App* selftest = app.add_subcommand("selftest", "small deterministic end-to-end checks");
    CLI::App* schema = app.add_subcommand("schema", "print the config schema");
    for (CLI::App* s : {coupling, memory, entangle, spectra}) common(s, true);
    common(plot, false);
    plot->add_option("csv", o.csvs, "CSV files")->required()->check(CLI::ExistingFile);
    common(selftest, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : lai::cli::config_error;
    }

    lai::cli::Context ctx;
    ctx.out = o.out;
    ctx.log = o.verbose ? &std::cerr : nullptr;
    try {
        if (schema->parsed()) {
            std::cout << lai::io::schema_text();
        } else if (coupling->parsed()) {
            lai::cli::cmd_coupling(load(o), ctx);
        } else if (memory->parsed()) {
            lai::cli::cmd_memory(load(o), ctx);
        } else if (entangle->parsed()) {
            lai::cli::cmd_entangle(load(o), ctx);
        } else if (spectra->parsed()) {
            lai::cli::cmd_spectra(load(o), ctx);
        } else if (plot->parsed()) {
            std::vector<std::filesystem::path> paths(o.csvs.begin(), o.csvs.end());
            lai::cli::cmd_plot(paths, ctx);
        } else if (selftest->parsed()) {
            const bool okay = lai::cli::cmd_selftest(ctx);
            std::cout << (okay ? "selftest: all checks passed" : "selftest: FAILED") << '\n';
            if (!okay) return lai::cli::numeric_error;
        }
    } catch (const std::exception& e) {
        std::cerr << "lai: error: " << e.what() << '\n';
        return lai::cli::exit_code(e);
    }
    for (const auto& p : ctx.written) std::cout << p.string() << '\n';
    return lai::cli::ok;
}
