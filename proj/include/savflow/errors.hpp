#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace savflow {

enum class ErrorKind {
    DomainError,
    DimensionMismatch,
    SingularOperator,
    SingularMatrix,
    MissingHistory,
    SplittingUnavailable,
    ConvergenceFailure,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind is what callers branch on;
/// the step index is attached by the run drivers when a step fails.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<long> step() const noexcept { return step_; }

    [[nodiscard]] Error at_step(long step) const {
        Error copy = *this;
        copy.step_ = step;
        return copy;
    }

private:
    ErrorKind kind_;
    std::optional<long> step_;
};

}  // namespace savflow
