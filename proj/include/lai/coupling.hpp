// SPDX-License-Identifier: MIT
/**
 * @file coupling.hpp
 * @brief Spectrally dependent coupling constants (gyrotropy kappa1, light
 *        shift Omega1, alignment coupling eps) built from hyperfine line data,
 *        and the feasibility inequalities of the memory protocol.
 *
 * Polarizabilities are evaluated in CGS units:
 *   alpha = phase * 6j * (4 pi w / (S0 c)) * |d|^2 / (-hbar (w - w_line)).
 */
#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lai/angular.hpp"
#include "lai/errors.hpp"
#include "lai/halfint.hpp"
#include "lai/params.hpp"

namespace lai {

namespace cgs {
inline constexpr double c = 2.99792458e10;        ///< speed of light [cm/s]
inline constexpr double hbar = 1.054571817e-27;   ///< reduced Planck constant [erg s]
}  // namespace cgs

/** @brief One ground -> excited hyperfine transition. */
struct HyperfineLine {
    HalfInt F0;              ///< ground level
    HalfInt F;               ///< excited level
    double omega_FF0 = 0.0;  ///< transition angular frequency [rad/s]
    double d_F0F_sq = 0.0;   ///< |reduced dipole|^2 [esu^2 cm^2]
};

/** @brief A parsed line-data table with its declared frequency reference. */
struct LineTable {
    std::string name;
    double reference_MHz = 0.0;  ///< absolute frequency of the detuning origin
    double dipole_sq_scale = 1.0;
    std::vector<HyperfineLine> lines;

    /** @brief Angular frequency for a detuning in MHz from the reference. */
    double omega_at(double detuning_MHz) const { return 2.0 * M_PI * (reference_MHz + detuning_MHz) * 1e6; }
};

namespace detail {

inline double parse_number(const std::string& tok, const std::string& where) {
    const auto slash = tok.find('/');
    try {
        if (slash != std::string::npos) {
            std::size_t u1 = 0, u2 = 0;
            const std::string a = tok.substr(0, slash), b = tok.substr(slash + 1);
            const double num = std::stod(a, &u1), den = std::stod(b, &u2);
            if (u1 != a.size() || u2 != b.size() || den == 0.0) throw ConfigError(where + ": bad number '" + tok + "'");
            return num / den;
        }
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw ConfigError(where + ": bad number '" + tok + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError(where + ": bad number '" + tok + "'");
    }
}

inline void check_line(const HyperfineLine& l, const std::string& where) {
    if (std::abs(l.F.twice_value - l.F0.twice_value) > 2)
        throw ConfigError(where + ": |F - F0| > 1 is not a dipole transition");
    if (!(l.omega_FF0 > 0.0)) throw ConfigError(where + ": transition frequency must be positive");
    if (!(l.d_F0F_sq >= 0.0)) throw ConfigError(where + ": dipole weight must be non-negative");
}

}  // namespace detail

/**
 * @brief Parse a line-data table.
 *
 * Grammar (one directive per line, '#' starts a comment):
 * @code
 *   name              <word>
 *   reference_MHz     <number>      absolute frequency of the detuning origin
 *   dipole_sq_scale   <number>      |d|^2 = weight * scale  [esu^2 cm^2]
 *   line <F0> <F> <detuning_MHz> <weight>
 * @endcode
 * F0 and F accept "1", "3/2"; numbers accept "5/6".  reference_MHz must
 * precede the first line record.
 * @throws ConfigError with "source:line" location on any malformed record.
 */
inline LineTable parse_line_table(std::istream& in, const std::string& source = "<lines>") {
    LineTable t;
    bool have_ref = false;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto hash = raw.find('#');
        std::istringstream ls(hash == std::string::npos ? raw : raw.substr(0, hash));
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        const std::string& key = tok[0];
        if (key == "name") {
            if (tok.size() != 2) throw ConfigError(where + ": expected 'name <word>'");
            t.name = tok[1];
        } else if (key == "reference_MHz") {
            if (tok.size() != 2) throw ConfigError(where + ": expected 'reference_MHz <number>'");
            t.reference_MHz = detail::parse_number(tok[1], where);
            have_ref = true;
        } else if (key == "dipole_sq_scale") {
            if (tok.size() != 2) throw ConfigError(where + ": expected 'dipole_sq_scale <number>'");
            t.dipole_sq_scale = detail::parse_number(tok[1], where);
        } else if (key == "line") {
            if (tok.size() != 5) throw ConfigError(where + ": expected 'line <F0> <F> <detuning_MHz> <weight>'");
            if (!have_ref) throw ConfigError(where + ": 'reference_MHz' must precede line records");
            HyperfineLine l;
            try {
                l.F0 = HalfInt::parse(tok[1]);
                l.F = HalfInt::parse(tok[2]);
            } catch (const DomainError& e) {
                throw ConfigError(where + ": " + e.what());
            }
            l.omega_FF0 = t.omega_at(detail::parse_number(tok[3], where));
            l.d_F0F_sq = detail::parse_number(tok[4], where) * t.dipole_sq_scale;
            detail::check_line(l, where);
            t.lines.push_back(l);
        } else {
            throw ConfigError(where + ": unknown directive '" + key + "'");
        }
    }
    if (t.lines.empty()) throw ConfigError(source + ": no line records");
    return t;
}

/** @brief Load a line-data table from a file. */
inline LineTable load_line_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("line data: cannot open '" + path + "'");
    return parse_line_table(f, path);
}

namespace detail {

/** @brief Common factor (4 pi w / (S0 c)) |d|^2 / (-hbar (w - w_line)). */
inline double polarizability_scale(const HyperfineLine& line, double omega_bar, double S0) {
    if (!(S0 > 0.0)) throw DomainError("polarizability: S0 must be positive");
    const double det = omega_bar - line.omega_FF0;
    if (det == 0.0)
        throw SingularityError("polarizability: evaluation exactly on resonance F0=" + line.F0.str() + " -> F=" +
                               line.F.str());
    return 4.0 * M_PI * omega_bar / (S0 * cgs::c) * line.d_F0F_sq / (-cgs::hbar * det);
}

inline int parity_sign(int twice_sum) {  // (-1)^(twice_sum / 2) for an integer exponent
    return ((twice_sum / 2) % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/** @brief Orientation (rank-1) polarizability of one transition. */
inline double alpha1(const HyperfineLine& line, double omega_bar, double S0) {
    const auto one = HalfInt::integer(1);
    const double sixj = wigner6j(one, one, one, line.F0, line.F0, line.F);
    const int ph = detail::parity_sign(line.F.twice_value + line.F0.twice_value);
    return ph * sixj / std::sqrt(2.0) * detail::polarizability_scale(line, omega_bar, S0);
}

/** @brief Alignment (rank-2) polarizability of one transition. */
inline double alpha2(const HyperfineLine& line, double omega_bar, double S0) {
    const auto one = HalfInt::integer(1), two = HalfInt::integer(2);
    const double sixj = wigner6j(one, one, two, line.F0, line.F0, line.F);
    const int ph = detail::parity_sign(2 + line.F.twice_value + line.F0.twice_value);
    return ph * sixj * detail::polarizability_scale(line, omega_bar, S0);
}

namespace detail {
inline double orientation_sum(const std::vector<HyperfineLine>& lines, double omega_bar, double S0, HalfInt F0) {
    double s = 0.0;
    for (const auto& l : lines)
        if (l.F0 == F0) s += alpha1(l, omega_bar, S0);
    const double f = F0.value();
    return s * std::sqrt(3.0) / std::sqrt(f * (f + 1) * (2 * f + 1));
}
}  // namespace detail

/** @brief Gyrotropy constant kappa1 [1/cm] for lines starting at ground level F0. */
inline double kappa1(const std::vector<HyperfineLine>& lines, double omega_bar, double S0, double Fz_bar, HalfInt F0) {
    return detail::orientation_sum(lines, omega_bar, S0, F0) * Fz_bar;
}

/** @brief Light shift Omega1 [rad/s]; same structure as kappa1 with Xi2_bar. */
inline double omega1(const std::vector<HyperfineLine>& lines, double omega_bar, double S0, double Xi2_bar, HalfInt F0) {
    return detail::orientation_sum(lines, omega_bar, S0, F0) * Xi2_bar;
}

/** @brief Alignment coupling eps = (1/2) sum_F alpha2. */
inline double epsilon(const std::vector<HyperfineLine>& lines, double omega_bar, double S0, HalfInt F0) {
    double s = 0.0;
    for (const auto& l : lines)
        if (l.F0 == F0) s += alpha2(l, omega_bar, S0);
    return 0.5 * s;
}

/** @brief Distance [rad/s] from omega_bar to the nearest line of ground level F0. */
inline double nearest_pole_distance(const std::vector<HyperfineLine>& lines, double omega_bar, HalfInt F0) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& l : lines)
        if (l.F0 == F0) d = std::min(d, std::abs(omega_bar - l.omega_FF0));
    return d;
}

/**
 * @brief Locate the zero of kappa1 between two detunings (MHz) by bisection.
 * @throws NumericError if kappa1 has no sign change (or a pole) inside the bracket.
 */
inline double kappa1_zero_MHz(const LineTable& table, HalfInt F0, double lo_MHz, double hi_MHz) {
    auto f = [&](double det) { return kappa1(table.lines, table.omega_at(det), 1.0, 1.0, F0); };
    double flo = f(lo_MHz), fhi = f(hi_MHz);
    if (flo * fhi > 0.0) throw NumericError("kappa1_zero: no sign change in bracket");
    for (int it = 0; it < 200 && hi_MHz - lo_MHz > 1e-9; ++it) {
        const double mid = 0.5 * (lo_MHz + hi_MHz);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) { lo_MHz = mid; flo = fm; } else { hi_MHz = mid; }
    }
    const double root = 0.5 * (lo_MHz + hi_MHz);
    for (const auto& l : table.lines)  // a sign change across a pole is not a zero
        if (l.F0 == F0 && std::abs(table.omega_at(root) - l.omega_FF0) < 2.0 * M_PI * 1e3)
            throw NumericError("kappa1_zero: bracket converged onto a pole");
    return root;
}

/** @brief User-supplied incoherent-scattering data for the feasibility report. */
struct CrossSections {
    double sigma_minus_F0 = 0.0;   ///< scattering of the quantum light from M = F0 atoms
    double sigma_plus_F0m2 = 0.0;  ///< scattering of the probe from M = F0-2 atoms
    double lambda_bar = 0.0;       ///< reduced resonance wavelength
};

/** @brief Outcome of one inequality check. */
enum class Status { pass, warn, fail };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::warn: return "warn";
        case Status::fail: return "fail";
    }
    return "?";
}

/** @brief Operational "a << b" for a ratio a/b: pass below 0.1, warn up to 1, fail above. */
inline Status much_less(double ratio) {
    return ratio < 0.1 ? Status::pass : (ratio <= 1.0 ? Status::warn : Status::fail);
}

/** @brief Operational "a >> b" for a ratio a/b: pass above 10, warn down to 1, fail below. */
inline Status much_greater(double ratio) {
    return ratio > 10.0 ? Status::pass : (ratio >= 1.0 ? Status::warn : Status::fail);
}

struct FeasibilityItem {
    std::string name;  ///< which inequality
    double margin;     ///< LHS / RHS
    Status status;
};

struct FeasibilityReport {
    std::vector<FeasibilityItem> items;
    Status overall = Status::pass;
};

/**
 * @brief Check the atom/photon-number and loss inequalities of the memory protocol.
 *
 * "a << b" passes when a/b < 0.1 and warns when a/b <= 1; "a >> b" passes
 * when a/b > 10 and warns when a/b >= 1.
 * @throws DomainError for non-positive inputs.
 */
inline FeasibilityReport feasibility_check(const InterfaceParams& write, const InterfaceParams& read,
                                           const CrossSections& cs) {
    for (double v : {write.N_A, write.N_P, read.N_P, write.S0, cs.sigma_minus_F0, cs.sigma_plus_F0m2, cs.lambda_bar})
        if (!(v > 0.0)) throw DomainError("feasibility_check: all counts, areas and cross sections must be positive");
    FeasibilityReport r;
    const double e2w = write.epsilon * write.epsilon, e2r = read.epsilon * read.epsilon;
    const double m1 = e2w * write.N_A * write.N_P;
    const double m2 = e2r * write.N_A * read.N_P;
    const double m3 = read.N_P / write.N_P;
    const double m4 = write.N_A * cs.sigma_minus_F0 / write.S0;
    const double m5 = write.N_P * cs.sigma_plus_F0m2 / write.S0;
    const double m6 = read.N_P * cs.sigma_plus_F0m2 / write.S0;
    const double od = write.N_A * cs.lambda_bar * cs.lambda_bar / write.S0;  // n0 lambdabar^2 L
    r.items = {{"eps^2 N_A N_P >> 1", m1, much_greater(m1)},
               {"eps^2 N_A N_P' >> 1", m2, much_greater(m2)},
               {"N_P' << N_P", m3, much_less(m3)},
               {"N_A sigma-_F0 << S0", m4, much_less(m4)},
               {"N_P sigma+_F0-2 << S0", m5, much_less(m5)},
               {"N_P' sigma+_F0-2 << S0", m6, much_less(m6)},
               {"optical depth n0 lambdabar^2 L >> 1", od, much_greater(od)}};
    for (const auto& it : r.items)
        if (static_cast<int>(it.status) > static_cast<int>(r.overall)) r.overall = it.status;
    return r;
}

}  // namespace lai
