#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace presched {

/// Failure categories raised by the library. Every throwing entry point
/// reports one of these through SchedError::code().
enum class Errc {
    InfeasibleJob,
    PolicyAssignedUnknownJob,
    NonterminatingPolicy,
    InvalidInstance,
    InvalidTrace,
    InvalidParameter,
    WrongEnvironment,
    NonpositiveRate,
    NoFeasibleMachine,
    Infeasible,
    TooLarge,
    CapacityExceeded,
    InvalidSpeedup,
    NegativeArgument,
    InvalidConfig,
    ParseError,
};

std::string_view to_string(Errc code) noexcept;

class SchedError : public std::runtime_error {
public:
    SchedError(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace presched
