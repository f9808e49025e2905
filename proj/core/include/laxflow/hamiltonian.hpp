#pragma once

// Residue Hamiltonians H_a(L) = -(1/n) res_p tr(w^-m L^n) dz, conservation, commutation of flows.

#include "laxflow/flow.hpp"

#include <vector>

namespace laxflow {

using HamiltonianSpec = AnsatzEntry;

/// dz is the base coordinate differential expressed in the local coordinate w at p
/// (dz = -w^-2 dw at infinity on the rational line).
cplx hamiltonian_value(const KricheverLax& L, const HamiltonianSpec& h);

struct ConservationReport {
    std::vector<std::vector<cplx>> values;  // [spec][sample]
    std::vector<double> drift;              // max |H(t) - H(0)| per spec
};

ConservationReport conservation_check(const Trajectory& tr, const std::vector<HamiltonianSpec>& hs);

/// || Phi_1^t(Phi_2^t(L0)) - Phi_2^t(Phi_1^t(L0)) || in the max coefficient norm, RK4 with step dt.
double commuting_flows_check(const KricheverLax& L0, const MProvider& M1, const MProvider& M2, double t, double dt);
double commuting_flows_check(const KricheverLax& L0, const AnsatzSpec& a1, const AnsatzSpec& a2, double t, double dt);

}  // namespace laxflow
