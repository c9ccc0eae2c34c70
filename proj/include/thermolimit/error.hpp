// error.hpp: error kinds shared by every module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermolimit {

enum class ErrorKind {
    DimensionTooLarge,
    DimensionMismatch,
    NotHermitian,
    NonFinite,
    InvalidArgument,
    ZeroMeanEnergy,
    InsufficientPoints,
    TruncationLeakage,
    InvalidSector,
    QuadratureUnderResolved,
    QuadratureError,
    InvalidWindow,
    InvalidEpsilon,
    InvalidSchedule,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroMeanEnergy: return "ZeroMeanEnergy";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::TruncationLeakage: return "TruncationLeakage";
    case ErrorKind::InvalidSector: return "InvalidSector";
    case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorKind::QuadratureError: return "QuadratureError";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::InvalidSchedule: return "InvalidSchedule";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

// Numerical failures (exit code 1 in the CLI) as opposed to bad input (exit code 2).
constexpr bool is_numerical_failure(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::TruncationLeakage:
    case ErrorKind::QuadratureUnderResolved:
    case ErrorKind::QuadratureError:
    case ErrorKind::ZeroMeanEnergy:
    case ErrorKind::NotHermitian:
    case ErrorKind::NonFinite:
        return true;
    default:
        return false;
    }
}

} // namespace thermolimit
