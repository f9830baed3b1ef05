#include "pisotnorm/error.hpp"

namespace pisotnorm {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotMonic: return "NotMonic";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::NotPisot: return "NotPisot";
        case ErrorCode::NoRealRootAboveOne: return "NoRealRootAboveOne";
        case ErrorCode::MixedBases: return "MixedBases";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::OutOfUnitInterval: return "OutOfUnitInterval";
        case ErrorCode::OrbitBudgetExceeded: return "OrbitBudgetExceeded";
        case ErrorCode::Inadmissible: return "Inadmissible";
        case ErrorCode::EmptyInterval: return "EmptyInterval";
        case ErrorCode::EmptyWord: return "EmptyWord";
        case ErrorCode::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
        case ErrorCode::InsufficientDigits: return "InsufficientDigits";
        case ErrorCode::NoCandidateAccepted: return "NoCandidateAccepted";
        case ErrorCode::CandidateBudgetExceeded: return "CandidateBudgetExceeded";
        case ErrorCode::FeasibilityViolated: return "FeasibilityViolated";
        case ErrorCode::BudgetExhausted: return "BudgetExhausted";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace pisotnorm
