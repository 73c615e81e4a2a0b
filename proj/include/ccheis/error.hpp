#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccheis {

enum class ErrorCode {
    DimensionConstraint,
    NonIncreasingSpectrum,
    NegativeWeight,
    InvalidSpec,
    MissingU,
    WrongCenterDim,
    DomainError,
    BeyondRStar,
    DegenerateX,
    OutsideDomainG,
    NoConvergence,
    BudgetExceeded,
    QuadratureFailure,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Numerical failures (as opposed to bad input).
    bool is_numerical() const noexcept {
        return code_ == ErrorCode::NoConvergence || code_ == ErrorCode::QuadratureFailure ||
               code_ == ErrorCode::BudgetExceeded;
    }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionConstraint: return "DimensionConstraint";
    case ErrorCode::NonIncreasingSpectrum: return "NonIncreasingSpectrum";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::MissingU: return "MissingU";
    case ErrorCode::WrongCenterDim: return "WrongCenterDim";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BeyondRStar: return "BeyondRStar";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::OutsideDomainG: return "OutsideDomainG";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace ccheis
