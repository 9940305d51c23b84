#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynregret {

enum class ErrorKind {
    NotPositiveDefinite,
    NonFiniteValue,
    UnboundedSet,
    DimensionMismatch,
    NoConvergence,
    EmptyMinimizerSet,
    Unbounded,
    DomainViolation,
    NegativeGap,
    MissingConstant,
    PathEscapesSet,
    MinimumNotAttained,
    ConditionUnsatisfiable,
    InvalidArgument,
    ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::UnboundedSet: return "UnboundedSet";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EmptyMinimizerSet: return "EmptyMinimizerSet";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NegativeGap: return "NegativeGap";
    case ErrorKind::MissingConstant: return "MissingConstant";
    case ErrorKind::PathEscapesSet: return "PathEscapesSet";
    case ErrorKind::MinimumNotAttained: return "MinimumNotAttained";
    case ErrorKind::ConditionUnsatisfiable: return "ConditionUnsatisfiable";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

} // namespace dynregret
