#include "laxflow/errors.hpp"

namespace laxflow {

const char* errc_name(Errc e) {
    switch (e) {
        case Errc::NonSquarefree: return "non_squarefree";
        case Errc::DivisionByZero: return "division_by_zero";
        case Errc::CurveMismatch: return "curve_mismatch";
        case Errc::UnsupportedRegime: return "unsupported_regime";
        case Errc::InvalidArgument: return "invalid_argument";
        case Errc::NonGenericParameters: return "non_generic_parameters";
        case Errc::RenormalizationFailure: return "renormalization_failure";
        case Errc::NonReduced: return "non_reduced";
        case Errc::BranchProximity: return "branch_proximity";
        case Errc::IllConditioned: return "ill_conditioned";
        case Errc::NonSimpleRamification: return "non_simple_ramification";
        case Errc::AnsatzInfeasible: return "ansatz_infeasible";
        case Errc::NonGenericPoint: return "non_generic_point";
        case Errc::StepRejected: return "step_rejected";
        case Errc::StepTooLarge: return "step_too_large";
        case Errc::QuadratureFailure: return "quadrature_failure";
        case Errc::PreconditionViolation: return "precondition_violation";
        case Errc::SupportMismatch: return "support_mismatch";
        case Errc::Configuration: return "configuration";
    }
    return "unknown";
}

}  // namespace laxflow
