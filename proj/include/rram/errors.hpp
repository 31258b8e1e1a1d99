#pragma once

#include <stdexcept>
#include <string>

namespace rram {

/// Base class of every error raised by the simulator. `kind()` is a short,
/// stable identifier used in machine-readable error records.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    [[nodiscard]] virtual const char* kind() const noexcept = 0;
};

/// Non-finite or otherwise unusable numeric input (NaN voltage, dt <= 0, ...).
class NumericInputError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "numeric_input"; }
};

/// A documented precondition of an operation was violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "contract_violation"; }
};

/// Invalid configuration: bad parameter set, unsatisfiable distribution, bad file.
class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "config"; }
};

/// Netlist is floating, contains a voltage-source loop, or references unknown nodes.
class TopologyError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "topology"; }
};

/// A metric is undefined for the given data (division by a zero reference value).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "undefined_metric"; }
};

}  // namespace rram
