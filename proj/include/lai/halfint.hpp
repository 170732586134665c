// SPDX-License-Identifier: MIT
/**
 * @file halfint.hpp
 * @brief Exact half-integer quantum numbers stored as doubled integers.
 */
#pragma once

#include <cstdlib>
#include <string>

#include "lai/errors.hpp"

namespace lai {

/**
 * @brief Angular-momentum quantum number j (or projection m) stored as 2j.
 *
 * Storing the doubled value keeps half-integers exact, so selection rules
 * are integer comparisons.
 */
struct HalfInt {
    int twice_value = 0;

    constexpr HalfInt() = default;
    /** @brief Construct from the doubled value, e.g. HalfInt::twice(3) == 3/2. */
    static constexpr HalfInt twice(int tv) { HalfInt h; h.twice_value = tv; return h; }
    /** @brief Construct from an integer value. */
    static constexpr HalfInt integer(int v) { return twice(2 * v); }
    /** @brief Parse "1", "3/2", "-1/2" or a decimal "1.5". */
    static HalfInt parse(const std::string& s);

    constexpr double value() const { return 0.5 * twice_value; }
    constexpr bool is_integer() const { return twice_value % 2 == 0; }

    friend constexpr bool operator==(HalfInt a, HalfInt b) { return a.twice_value == b.twice_value; }
    friend constexpr auto operator<=>(HalfInt a, HalfInt b) { return a.twice_value <=> b.twice_value; }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return twice(a.twice_value + b.twice_value); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return twice(a.twice_value - b.twice_value); }
    friend constexpr HalfInt operator-(HalfInt a) { return twice(-a.twice_value); }

    std::string str() const {
        if (is_integer()) return std::to_string(twice_value / 2);
        return std::to_string(twice_value) + "/2";
    }
};

inline HalfInt HalfInt::parse(const std::string& s) {
    auto bad = [&] { return DomainError("HalfInt: cannot parse '" + s + "' as a half-integer"); };
    if (s.empty()) throw bad();
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            std::size_t used = 0;
            const int num = std::stoi(s.substr(0, slash), &used);
            if (used != slash || s.substr(slash + 1) != "2") throw bad();
            return twice(num);
        }
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw bad();
        const double tv = 2.0 * v;
        const int itv = static_cast<int>(tv >= 0 ? tv + 0.5 : tv - 0.5);
        if (std::abs(tv - itv) > 1e-9) throw bad();
        return twice(itv);
    } catch (const std::logic_error&) {
        throw bad();
    }
}

}  // namespace lai
