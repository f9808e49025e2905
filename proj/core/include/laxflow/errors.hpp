#pragma once

#include <stdexcept>
#include <string>

namespace laxflow {

enum class Errc {
    NonSquarefree,
    DivisionByZero,
    CurveMismatch,
    UnsupportedRegime,
    InvalidArgument,
    NonGenericParameters,
    RenormalizationFailure,
    NonReduced,
    BranchProximity,
    IllConditioned,
    NonSimpleRamification,
    AnsatzInfeasible,
    NonGenericPoint,
    StepRejected,
    StepTooLarge,
    QuadratureFailure,
    PreconditionViolation,
    SupportMismatch,
    Configuration,
};

const char* errc_name(Errc e);

/// All library failures surface as this exception; `code()` identifies the contract clause.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace laxflow
