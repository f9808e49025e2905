#pragma once

// Scenario configuration and the analysis pipeline behind the laxflow CLI.

#include "io.hpp"

#include "laxflow/hamiltonian.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace laxflow::app {

using io::json;

struct Tolerances {
    double validate = 1e-8;
    double h_tail = 1e-9;
    double eigen = 1e-8;
    double drift = 1e-8;
    double defect = 1e-6;
    double moving_drift = 1e-4;  // second-order moving-pole scheme: truncation error, not defect
    double constancy = 1e-9;
    double linearity = 1e-8;
    double gauge = 1e-9;
    double second_difference = 1e-5;
    double velocity_agreement = 1e-5;
    double hamiltonian = 1e-8;
    double commuting = 1e-6;
    double tangency = 1e-8;
};

/// The M driving the flow: an ansatz, a polynomial in L, or an ansatz with a time-dependent
/// admixture M_a + s t M_b (curvature injection, a negative control).
struct Generator {
    enum class Kind { Ansatz, PolynomialInL, Curvature };
    Kind kind = Kind::Ansatz;
    AnsatzSpec ansatz;
    std::vector<cplx> coeffs;  // PolynomialInL
    AnsatzSpec injected;       // Curvature
    double strength = 1.0;

    MProvider provider() const;
    MatrixFunc at(const KricheverLax& L, double t) const;
    json to_json() const;
    static Generator from_json(const json& j);
};

struct Scenario {
    std::string name = "scenario";
    json lax_source;
    std::filesystem::path base_dir = ".";
    Generator generator;
    double tEnd = 1.0;
    double dt = 1e-3;
    std::optional<Scheme> scheme;
    int stride = 100;
    std::set<std::string> analyses;
    Tolerances tol;
    std::vector<HamiltonianSpec> hamiltonians;  // empty: defaults
    std::vector<AnsatzSpec> commuting_with;
    double commuting_t = 0.5;
    std::uint64_t seed = 0;
};

inline const std::vector<std::string> kAnalyses = {"validate", "spectral", "flow", "linearity", "abel", "hamiltonian"};

/// Throws Error(Configuration) on malformed input, unknown analyses or missing dependencies.
Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir);
Scenario builtin_scenario(const std::string& name);

/// Applies --tol to the verdict tolerance of each listed analysis.
void override_tolerance(Scenario& s, double tol);

KricheverLax load_lax(const Scenario& s);

struct Section {
    json report;
    std::map<std::string, io::Table> tables;
    bool pass = true;
};

Section analyze_validate(const json& lax_json, const Tolerances& tol);
Section analyze_spectral(const KricheverLax& L, const Tolerances& tol);
Section analyze_flow(const KricheverLax& L, const Scenario& s, Trajectory& out);
Section analyze_linearity(const Trajectory& tr, const Generator& g, const Tolerances& tol, std::uint64_t seed);
Section analyze_abel(const Trajectory& tr, const Generator& g, const Tolerances& tol);
Section analyze_hamiltonian(const KricheverLax& L0, const Trajectory* tr, const Scenario& s);

json trajectory_json(const Trajectory& tr, const Generator& g);

struct Outcome {
    int exit_code = 0;
    json report;
};

/// Runs the requested analyses in pipeline order and writes report.json, trajectory.json and
/// tables/* (csv or json) under out_dir.
Outcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir, const std::string& format = "csv");

/// Writes the section's tables in the requested format.
void write_tables(const std::map<std::string, io::Table>& tables, const std::filesystem::path& dir, const std::string& format);

json error_json(const std::string& code, const std::string& message);

}  // namespace laxflow::app
