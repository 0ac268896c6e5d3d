#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmlpca {

enum class ErrorCode {
    InvalidData,
    NumericalFailure,
    InvalidParameter,
    InvalidRank,
    NoValidRoot,
    DegenerateSpectrum,
    IllConditionedPolynomial,
    DomainError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidData: return "InvalidData";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::InvalidRank: return "InvalidRank";
        case ErrorCode::NoValidRoot: return "NoValidRoot";
        case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorCode::IllConditionedPolynomial: return "IllConditionedPolynomial";
        case ErrorCode::DomainError: return "DomainError";
    }
    return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mmlpca
