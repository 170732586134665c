// SPDX-License-Identifier: MIT
/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by all modules.
 *
 * Every error carries a short "Context: message" string.  The command-line
 * front end maps ConfigError to exit code 2 and every NumericError to exit
 * code 3.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace lai {

/** @brief Invalid argument outside the mathematical domain of an operation. */
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/** @brief Grid or block sizes that do not fit together. */
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/** @brief Malformed or incomplete scenario configuration / data file. */
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** @brief Base class for failures of a numerical procedure. */
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** @brief Evaluation exactly on a pole (e.g. on-resonance polarizability). */
class SingularityError : public NumericError {
public:
    using NumericError::NumericError;
};

/** @brief Coupling constant A vanishes; the Bessel transfer is undefined. */
class DegenerateCouplingError : public NumericError {
public:
    using NumericError::NumericError;
};

/** @brief Iterative solver or oracle did not reach its tolerance. */
class SolverError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace lai
