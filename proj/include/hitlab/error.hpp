#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hitlab {

enum class ErrorKind {
    NonpositiveTau,
    NonpositiveTime,
    NegativeLevel,
    HorizonViolation,
    UnsortedGrid,
    QuadratureFailure,
    NonpositiveField,
    ZeroDenominator,
    GridTooSmall,
    DegenerateInterval,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonpositiveTau: return "NonpositiveTau";
    case ErrorKind::NonpositiveTime: return "NonpositiveTime";
    case ErrorKind::NegativeLevel: return "NegativeLevel";
    case ErrorKind::HorizonViolation: return "HorizonViolation";
    case ErrorKind::UnsortedGrid: return "UnsortedGrid";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NonpositiveField: return "NonpositiveField";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::DegenerateInterval: return "DegenerateInterval";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace hitlab
