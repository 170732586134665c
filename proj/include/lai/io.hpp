// SPDX-License-Identifier: MIT
/**
 * @file io.hpp
 * @brief Scenario configs, deterministic CSV files and static SVG plots.
 *
 * Configs are flat "dotted.key = value" text with '#' comments.  Every key is
 * declared in a schema (type, default, allowed values); unknown, duplicate or
 * malformed entries are rejected with the file and line number.  Output CSV
 * files start with '#' comment lines carrying the module version and a hash
 * of the canonical (defaults-filled, sorted) config; numbers are written with
 * 17 significant digits so reruns are byte-identical.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lai/errors.hpp"

namespace lai::io {

inline constexpr const char* kVersion = "1.0.0";

/** @brief 64-bit FNV-1a hash. */
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/** @brief Full-precision decimal rendering (17 significant digits). */
inline std::string fmt17(double v) {
    if (v == 0.0) return "0";  // also folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

enum class ValueKind { number, integer, boolean, text, number_list, choice };

/** @brief One schema entry.  An empty default with required = false means "absent unless given". */
struct KeySpec {
    std::string key;
    ValueKind kind;
    std::string default_value;
    bool required = false;
    std::vector<std::string> choices;
    std::string help;
};

/** @brief The published config schema. */
inline const std::vector<KeySpec>& schema() {
    using K = ValueKind;
    static const std::vector<KeySpec> s = {
        {"mode", K::choice, "", true, {"coupling", "memory", "entangle", "spectra"}, "subcommand the config is meant for"},
        {"seed", K::integer, "0", false, {}, "seed for randomised checks (unused by deterministic pipelines)"},
        {"grid.n", K::integer, "128", false, {}, "cells per axis (n_t = n_z)"},
        {"grid.T", K::number, "1", false, {}, "interaction time"},
        {"grid.L", K::number, "1", false, {}, "sample length"},
        {"params.F0", K::text, "1", false, {}, "ground hyperfine level (integer or half-integer)"},
        {"params.epsilon", K::number, "1", false, {}, "alignment coupling constant"},
        {"params.Fz_abs", K::number, "1", false, {}, "|Fz_bar| (the sign follows from the scenario)"},
        {"params.kappa1", K::number, "0", false, {}, "gyrotropy constant"},
        {"params.OmegaBar", K::number, "0", false, {}, "2 Omega0 + Omega1"},
        {"params.degenerate", K::boolean, "true", false, {}, "force OmegaBar = 0 during the interaction"},
        {"input.squeeze", K::number, "10", false, {}, "anti-squeezed Mandel parameter 1 + xi3"},
        {"input.bandwidth", K::choice, "broadband", false, {"broadband", "finite"}, "input correlation model"},
        {"input.T_over_tau_c", K::number, "10", false, {}, "T / tau_c for finite bandwidth"},
        {"memory.write_ATL", K::number_list, "", false, {}, "write-stage ATL values (negative)"},
        {"memory.read_ATL", K::number_list, "", false, {}, "read-stage A'T'L values, paired with write_ATL"},
        {"memory.optimal_retrieval", K::boolean, "true", false, {}, "snap kappa1 L to a multiple of 2 pi"},
        {"entangle.ATL", K::number_list, "", false, {}, "ATL values (positive)"},
        {"spectra.ATL", K::number_list, "", false, {}, "ATL values for a single propagation (either sign)"},
        {"coupling.lines", K::text, "", false, {}, "line-data file (relative paths resolve against the config)"},
        {"coupling.F0", K::text, "1", false, {}, "ground level of the sweep"},
        {"coupling.detuning_min_MHz", K::number, "-3000", false, {}, "sweep start"},
        {"coupling.detuning_max_MHz", K::number, "3000", false, {}, "sweep end"},
        {"coupling.samples", K::integer, "601", false, {}, "number of detuning samples"},
        {"coupling.S0", K::number, "0.01", false, {}, "beam cross section [cm^2]"},
        {"coupling.Fz_bar", K::number, "1e10", false, {}, "spin density [1/cm]"},
        {"coupling.Xi2_bar", K::number, "1e12", false, {}, "circular Stokes flux [1/s]"},
        {"coupling.zero_bracket_MHz", K::number_list, "-700,-10", false, {}, "bracket searched for the kappa1 zero (must not contain a line)"},
    };
    return s;
}

inline const KeySpec* find_key(const std::string& key) {
    for (const auto& k : schema())
        if (k.key == key) return &k;
    return nullptr;
}

namespace detail {

inline bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        v = std::stod(s, &used);
    } catch (...) {
        return false;
    }
    return used == s.size() && std::isfinite(v);
}

inline void check_value(const KeySpec& k, const std::string& v, const std::string& where) {
    auto bad = [&](const std::string& what) { throw ConfigError(where + ": key '" + k.key + "' " + what + " (got '" + v + "')"); };
    double d = 0.0;
    switch (k.kind) {
        case ValueKind::number:
            if (!parse_double(v, d)) bad("expects a number");
            break;
        case ValueKind::integer: {
            if (!parse_double(v, d) || d != std::floor(d) || v.find_first_of(".eE") != std::string::npos) bad("expects an integer");
            break;
        }
        case ValueKind::boolean:
            if (v != "true" && v != "false") bad("expects true or false");
            break;
        case ValueKind::text:
            if (v.empty()) bad("expects a non-empty value");
            break;
        case ValueKind::number_list:
            if (v.empty()) bad("expects a comma-separated list of numbers");
            for (const auto& item : split(v, ','))
                if (!parse_double(item, d)) bad("expects a comma-separated list of numbers");
            break;
        case ValueKind::choice:
            if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
                std::string all;
                for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
                bad("must be one of {" + all + "}");
            }
            break;
    }
}

}  // namespace detail

/** @brief A validated scenario config (defaults filled in). */
class Config {
public:
    std::string source = "<config>";
    std::filesystem::path base_dir;  ///< directory of the config file, for relative paths

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& text(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(source + ": missing required key '" + key + "'");
        return it->second;
    }
    double number(const std::string& key) const { return std::stod(text(key)); }
    long integer(const std::string& key) const { return std::stol(text(key)); }
    bool flag(const std::string& key) const { return text(key) == "true"; }
    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : split(text(key), ',')) out.push_back(std::stod(s));
        return out;
    }
    /** @brief Resolve a path-valued key against the config directory. */
    std::filesystem::path path(const std::string& key) const {
        std::filesystem::path p(text(key));
        return p.is_absolute() ? p : base_dir / p;
    }

    /** @brief Set a key (validated against the schema); used for command-line overrides. */
    void set(const std::string& key, const std::string& value, const std::string& where = "override") {
        const KeySpec* k = find_key(key);
        if (k == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
        detail::check_value(*k, value, where);
        values_[key] = value;
    }

    /** @brief Sorted "key=value" lines of every present key (the hashed form). */
    std::string canonical() const {
        std::string s;
        for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
        return s;
    }
    std::string hash() const { return hex64(fnv1a(canonical())); }

    /** @brief Require keys for the given mode. */
    void require(std::initializer_list<const char*> keys) const {
        for (const char* k : keys)
            if (!has(k)) throw ConfigError(source + ": mode '" + text("mode") + "' requires key '" + k + "'");
    }

private:
    std::map<std::string, std::string> values_;
    friend Config parse_config(std::istream& in, const std::string& source);
};

/**
 * @brief Parse and validate a config.
 * @throws ConfigError naming the source and line for syntax errors, unknown or duplicate keys,
 *         bad values and missing required keys.
 */
inline Config parse_config(std::istream& in, const std::string& source) {
    Config c;
    c.source = source;
    std::map<std::string, int> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
        const KeySpec* k = find_key(key);
        if (k == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
        if (seen.count(key))
            throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
        seen[key] = lineno;
        detail::check_value(*k, value, where);
        c.values_[key] = value;
    }
    for (const auto& k : schema()) {
        if (c.values_.count(k.key)) continue;
        if (k.required) throw ConfigError(source + ": missing required key '" + k.key + "'");
        if (!k.default_value.empty()) c.values_[k.key] = k.default_value;
    }
    return c;
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path.string() + "'");
    Config c = parse_config(f, path.string());
    c.base_dir = path.parent_path();
    return c;
}

/** @brief Human-readable schema listing (one key per line). */
inline std::string schema_text() {
    static const char* kinds[] = {"number", "integer", "bool", "text", "number list", "choice"};
    std::string s;
    for (const auto& k : schema()) {
        s += k.key + " (" + kinds[static_cast<int>(k.kind)] + (k.required ? ", required" : "") + ")";
        if (!k.default_value.empty()) s += " [default " + k.default_value + "]";
        s += ": " + k.help + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/** @brief A numeric table with comment lines. */
struct CsvTable {
    std::vector<std::string> comments;  ///< written as "# ..." lines after the provenance header
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> r) {
        if (r.size() != columns.size()) throw DimensionError("CsvTable: row width does not match the header");
        rows.push_back(std::move(r));
    }
};

/** @brief Provenance header shared by every output file. */
struct OutputHeader {
    std::string module;
    std::string config_hash;
};

inline std::string header_line(const OutputHeader& h) {
    return "lai " + std::string(kVersion) + " module=" + h.module + " config_hash=" + h.config_hash;
}

inline std::string to_csv(const CsvTable& t, const OutputHeader& h) {
    std::string s = "# " + header_line(h) + "\n";
    for (const auto& c : t.comments) s += "# " + c + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + fmt17(r[i]);
        s += "\n";
    }
    return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw ConfigError("write failed for '" + path.string() + "'");
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t, const OutputHeader& h) {
    write_text(path, to_csv(t, h));
}

/** @brief Parse CSV text produced by write_csv (comments kept, values numeric). */
inline CsvTable parse_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(trim(line.substr(1)));
            continue;
        }
        const auto cells = split(line, ',');
        if (t.columns.empty()) {
            t.columns = cells;
            continue;
        }
        if (cells.size() != t.columns.size())
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                              " fields, got " + std::to_string(cells.size()));
        std::vector<double> r;
        for (const auto& c : cells) {
            double v = 0.0;
            if (!detail::parse_double(c, v))
                throw ConfigError(source + ":" + std::to_string(lineno) + ": non-numeric field '" + c + "'");
            r.push_back(v);
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline CsvTable load_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open '" + path.string() + "'");
    return parse_csv(f, path.string());
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

/** @brief Axis range with a 5% margin on each side (in log10 space when @p log). */
struct AxisRange {
    double lo = 0.0, hi = 1.0;
};

inline AxisRange fit_range(double mn, double mx, bool log) {
    if (log) {
        mn = std::log10(mn);
        mx = std::log10(mx);
    }
    if (mx == mn) {
        const double pad = mn == 0.0 ? 1.0 : 0.5 * std::abs(mn);
        mn -= pad;
        mx += pad;
    }
    const double m = 0.05 * (mx - mn);
    return {mn - m, mx + m};
}

/** @brief A polyline series of one panel. */
struct Series {
    std::string label;
    std::vector<double> x, y;
};

/** @brief One panel: shared abscissa label and its series. */
struct Panel {
    std::string title;
    std::vector<Series> series;
};

/**
 * @brief Group the columns of a table into panels.
 *
 * Column 0 is the abscissa.  A column named "panel:label" joins the panel
 * "panel"; columns without ':' share the panel "values".  Non-positive values
 * are skipped (log ordinate).
 * @throws ConfigError for a table without data rows or series columns.
 */
inline std::vector<Panel> panels_from_csv(const CsvTable& t) {
    if (t.rows.empty() || t.columns.size() < 2) throw ConfigError("plot: empty CSV, nothing to plot");
    std::vector<Panel> panels;
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
        const auto colon = t.columns[c].find(':');
        const std::string pname = colon == std::string::npos ? "values" : t.columns[c].substr(0, colon);
        const std::string label = colon == std::string::npos ? t.columns[c] : t.columns[c].substr(colon + 1);
        auto it = std::find_if(panels.begin(), panels.end(), [&](const Panel& p) { return p.title == pname; });
        if (it == panels.end()) {
            panels.push_back(Panel{pname, {}});
            it = panels.end() - 1;
        }
        Series s;
        s.label = label;
        for (const auto& r : t.rows)
            if (r[c] > 0.0) {
                s.x.push_back(r[0]);
                s.y.push_back(r[c]);
            }
        it->series.push_back(std::move(s));
    }
    return panels;
}

namespace detail {
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
inline std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}
}  // namespace detail

/**
 * @brief Render panels side by side: linear abscissa, log10 ordinate, one polyline per series.
 *
 * A pure function of its input, so identical CSV content yields identical bytes.
 */
inline std::string render_svg(const std::vector<Panel>& panels, const std::string& xlabel, const std::string& title) {
    if (panels.empty()) throw ConfigError("plot: empty CSV, nothing to plot");
    const double pw = 360, ph = 280, ml = 60, mr = 20, mt = 40, mb = 50;
    const double W = panels.size() * pw, H = ph;
    static const char* colors[] = {"#1f3b73", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#2e4053"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(W) << "\" height=\"" << detail::num(H)
      << "\" viewBox=\"0 0 " << detail::num(W) << ' ' << detail::num(H) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<title>" << detail::escape(title) << "</title>\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& pan = panels[p];
        double xmn = INFINITY, xmx = -INFINITY, ymn = INFINITY, ymx = -INFINITY;
        std::size_t points = 0;
        for (const auto& s : pan.series)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                xmn = std::min(xmn, s.x[i]);
                xmx = std::max(xmx, s.x[i]);
                ymn = std::min(ymn, s.y[i]);
                ymx = std::max(ymx, s.y[i]);
                ++points;
            }
        if (points == 0) throw ConfigError("plot: panel '" + pan.title + "' has no positive values");
        const AxisRange xr = fit_range(xmn, xmx, false), yr = fit_range(ymn, ymx, true);
        const double x0 = p * pw + ml, x1 = (p + 1) * pw - mr, y0 = ph - mb, y1 = mt;
        auto X = [&](double x) { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
        auto Y = [&](double y) { return y0 + (std::log10(y) - yr.lo) / (yr.hi - yr.lo) * (y1 - y0); };
        o << "<g>\n<rect x=\"" << detail::num(x0) << "\" y=\"" << detail::num(y1) << "\" width=\"" << detail::num(x1 - x0)
          << "\" height=\"" << detail::num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
        o << "<text x=\"" << detail::num(0.5 * (x0 + x1)) << "\" y=\"" << detail::num(y1 - 12)
          << "\" text-anchor=\"middle\" font-size=\"13\">" << detail::escape(pan.title) << "</text>\n";
        o << "<text x=\"" << detail::num(0.5 * (x0 + x1)) << "\" y=\"" << detail::num(ph - 12)
          << "\" text-anchor=\"middle\">" << detail::escape(xlabel) << "</text>\n";
        // Decade ticks on the log ordinate.
        for (int d = static_cast<int>(std::ceil(yr.lo)); d <= static_cast<int>(std::floor(yr.hi)); ++d) {
            const double yy = Y(std::pow(10.0, d));
            o << "<line x1=\"" << detail::num(x0) << "\" y1=\"" << detail::num(yy) << "\" x2=\"" << detail::num(x0 + 5)
              << "\" y2=\"" << detail::num(yy) << "\" stroke=\"black\"/>";
            o << "<text x=\"" << detail::num(x0 - 4) << "\" y=\"" << detail::num(yy + 4) << "\" text-anchor=\"end\">1e"
              << d << "</text>\n";
        }
        for (int k = 0; k <= 4; ++k) {
            const double xv = xmn + (xmx - xmn) * k / 4.0;
            o << "<text x=\"" << detail::num(X(xv)) << "\" y=\"" << detail::num(y0 + 14) << "\" text-anchor=\"middle\">"
              << detail::num(xv) << "</text>\n";
        }
        for (std::size_t si = 0; si < pan.series.size(); ++si) {
            const Series& s = pan.series[si];
            const char* col = colors[si % 6];
            o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << detail::num(X(s.x[i])) << ',' << detail::num(Y(s.y[i]));
            o << "\"/>\n";
            o << "<text x=\"" << detail::num(x1 - 4) << "\" y=\"" << detail::num(y1 + 14 + 13 * si) << "\" text-anchor=\"end\" fill=\""
              << col << "\">" << detail::escape(s.label) << "</text>\n";
        }
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/** @brief Plot a CSV table (column 0 as abscissa) to SVG text. */
inline std::string plot_csv(const CsvTable& t, const std::string& title) {
    if (t.columns.empty()) throw ConfigError("plot: empty CSV, nothing to plot");
    return render_svg(panels_from_csv(t), t.columns[0], title);
}

}  // namespace lai::io
