#include "savflow/errors.hpp"

namespace savflow {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::SingularOperator: return "SingularOperator";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::MissingHistory: return "MissingHistory";
        case ErrorKind::SplittingUnavailable: return "SplittingUnavailable";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace savflow
