#pragma once

#include <stdexcept>
#include <string>

namespace pisotnorm {

enum class ErrorCode {
    NotMonic,
    Reducible,
    NotPisot,
    NoRealRootAboveOne,
    MixedBases,
    DivisionByZero,
    OutOfUnitInterval,
    OrbitBudgetExceeded,
    Inadmissible,
    EmptyInterval,
    EmptyWord,
    EnumerationBudgetExceeded,
    InsufficientDigits,
    NoCandidateAccepted,
    CandidateBudgetExceeded,
    FeasibilityViolated,
    BudgetExhausted,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pisotnorm
