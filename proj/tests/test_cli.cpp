// SPDX-License-Identifier: MIT
// Config parsing, CSV/SVG output and the command functions behind the CLI.

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>

#include "lai/cli.hpp"

using namespace lai;
namespace fs = std::filesystem;

namespace {

io::Config parse(const std::string& text) {
    std::istringstream in(text);
    return io::parse_config(in, "t.cfg");
}

std::string config_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lai_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("Config errors name the file and line") {
    CHECK(config_error("mode = memory\nmemory.wirte_ATL = -10\n").find("t.cfg:2: unknown key 'memory.wirte_ATL'") !=
          std::string::npos);
    CHECK(config_error("mode = memory\nmode = entangle\n").find("duplicate key") != std::string::npos);
    CHECK(config_error("mode = memory\ngrid.n = twelve\n").find("t.cfg:2") != std::string::npos);
    CHECK(config_error("mode = teleport\n").find("t.cfg:1") != std::string::npos);
    CHECK(config_error("grid.n = 12\n").find("missing required key 'mode'") != std::string::npos);
    CHECK(config_error("mode memory\n").find("expected 'key = value'") != std::string::npos);
    CHECK(config_error("mode = memory\nparams.degenerate = maybe\n") != "");
}

TEST_CASE("Defaults, overrides and the config hash") {
    io::Config c = parse("mode = memory  # trailing comment\nmemory.write_ATL = -10, -40\n");
    CHECK(c.integer("grid.n") == 128);
    CHECK(c.numbers("memory.write_ATL") == std::vector<double>{-10.0, -40.0});
    const std::string h = c.hash();
    CHECK(h.size() == 16);
    CHECK(parse("\nmemory.write_ATL = -10, -40\n# comment\nmode = memory\n").hash() == h);
    c.set("grid.n", "64");
    CHECK(c.hash() != h);
    CHECK_THROWS_AS(c.set("grid.nn", "64"), ConfigError);
    CHECK_THROWS_AS(c.set("grid.n", "6.5"), ConfigError);
    CHECK_THROWS_AS(c.require({"memory.read_ATL"}), ConfigError);
    CHECK_THROWS_AS(io::load_config(LAI_SOURCE_DIR "/tests/data/unknown_key.cfg"), ConfigError);
    CHECK_THROWS_AS(io::load_config(LAI_SOURCE_DIR "/tests/data/missing.cfg"), ConfigError);
}

TEST_CASE("Numbers are written with 17 significant digits and round-trip exactly") {
    CHECK(io::fmt17(0.1) == "0.10000000000000001");
    CHECK(io::fmt17(0.0) == "0");
    io::CsvTable t;
    t.columns = {"k", "a:x", "a:y"};
    t.comments = {"note"};
    t.add_row({0.0, 1.0 / 3.0, 1e-300});
    t.add_row({1.0, M_PI, -2.5e17});
    CHECK_THROWS_AS(t.add_row({1.0}), DimensionError);
    const std::string text = io::to_csv(t, io::OutputHeader{"unit", "0123456789abcdef"});
    CHECK(text.rfind("# lai 1.0.0 module=unit config_hash=0123456789abcdef\n# note\nk,a:x,a:y\n", 0) == 0);
    std::istringstream in(text);
    const io::CsvTable back = io::parse_csv(in, "x.csv");
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    std::istringstream bad("k,a\n1,2,3\n");
    CHECK_THROWS_AS(io::parse_csv(bad, "bad.csv"), ConfigError);
}

TEST_CASE("SVG plots: panels, margins, determinism and empty input") {
    io::CsvTable t;
    t.columns = {"k", "Xi_I:in", "Xi_I:out", "T_I:out"};
    for (int k = 0; k < 5; ++k) t.add_row({double(k), 0.1 * (k + 1), 1.0 + k, 0.5});
    const auto panels = io::panels_from_csv(t);
    REQUIRE(panels.size() == 2);
    CHECK(panels[0].series.size() == 2);
    const std::string svg = io::plot_csv(t, "title");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count(svg, "<polyline") == 3);
    CHECK(io::plot_csv(t, "title") == svg);
    const io::AxisRange r = io::fit_range(1.0, 3.0, false);
    CHECK(r.lo == Catch::Approx(0.9));
    CHECK(r.hi == Catch::Approx(3.1));
    const io::AxisRange lr = io::fit_range(0.1, 1000.0, true);
    CHECK(lr.lo == Catch::Approx(-1.2));
    CHECK(lr.hi == Catch::Approx(3.2));
    io::CsvTable empty;
    empty.columns = {"k", "a"};
    CHECK_THROWS_AS(io::plot_csv(empty, "x"), ConfigError);
}

TEST_CASE("Exceptions map to exit codes") {
    CHECK(cli::exit_code(ConfigError("x")) == 2);
    CHECK(cli::exit_code(DomainError("x")) == 2);
    CHECK(cli::exit_code(DimensionError("x")) == 2);
    CHECK(cli::exit_code(SolverError("x")) == 3);
    CHECK(cli::exit_code(SingularityError("x")) == 3);
    CHECK(cli::exit_code(std::runtime_error("x")) == 3);
    CHECK(cli::tag(-10.0) == "m10");
}

TEST_CASE("The entangle command writes mode files on the configured grid") {
    io::Config c = parse("mode = entangle\ngrid.n = 24\nentangle.ATL = 5\n");
    cli::Context ctx;
    ctx.out = scratch("entangle");
    cli::cmd_entangle(c, ctx);
    const io::CsvTable h = io::load_csv(ctx.out / "entangle_ATL5_mode_h.csv");
    CHECK(h.rows.size() == 24);
    CHECK(h.comments.front().find("config_hash=" + c.hash()) != std::string::npos);
    const io::CsvTable w = io::load_csv(ctx.out / "entangle_witness.csv");
    REQUIRE(w.rows.size() == 1);
    CHECK(fs::exists(ctx.out / "entangle_report.json"));
    fs::remove_all(ctx.out);
    io::Config neg = parse("mode = entangle\ngrid.n = 16\nentangle.ATL = -5\n");
    CHECK_THROWS_AS(cli::cmd_entangle(neg, ctx), DomainError);
    CHECK_THROWS_AS(cli::cmd_memory(neg, ctx), ConfigError);  // wrong mode
}

TEST_CASE("The memory command is deterministic") {
    io::Config c = parse("mode = memory\ngrid.n = 16\nmemory.write_ATL = -10\nmemory.read_ATL = -2\n");
    auto run = [&](const std::string& name) {
        cli::Context ctx;
        ctx.out = scratch(name);
        cli::cmd_memory(c, ctx);
        std::string all;
        for (const auto& p : ctx.written) {
            std::ifstream f(p, std::ios::binary);
            std::ostringstream ss;
            ss << f.rdbuf();
            all += p.filename().string() + "\n" + ss.str();
        }
        fs::remove_all(ctx.out);
        return all;
    };
    const std::string a = run("mem1"), b = run("mem2");
    CHECK(!a.empty());
    CHECK(a == b);
}
