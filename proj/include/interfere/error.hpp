#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace interfere {

/// Error classes surfaced by the toolkit. The CLI maps each to a distinct exit code.
enum class ErrorKind {
    MalformedProfile,
    Calibration,
    UnitMismatch,
    Domain,
    InsufficientData,
    DegreesOfFreedom,
    Collinearity,
    UndefinedCorrelation,
    Config,
    Communication,
    CoExecution,
    EmptyPlan,
    UnknownLabel,
    Load,
};

[[nodiscard]] std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Process exit code used by the CLI for an error class (always >= 2).
[[nodiscard]] int error_exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace interfere
