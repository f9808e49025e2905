#pragma once

// JSON and CSV serialization of curves, places, divisors, function-field elements, Lax matrices
// and trajectories. Complex numbers are [re, im]; floats are written at 17 significant digits.

#include "laxflow/flow.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace laxflow::io {

using json = nlohmann::ordered_json;

json to_json(cplx z);
cplx cplx_from(const json& j);
json to_json(const Poly& p);
Poly poly_from(const json& j);
json to_json(const CMat& A);
CMat cmat_from(const json& j);
json to_json(const CVec& v);
CVec cvec_from(const json& j);

json curve_to_json(const BaseCurve& c);
CurvePtr curve_from(const json& j);
json to_json(const Place& p);
Place place_from(const json& j);
json to_json(const Divisor& D);
Divisor divisor_from(const json& j);
json to_json(const FFElement& e);
FFElement element_from(const CurvePtr& c, const json& j);

json lax_to_json(const KricheverLax& L);
/// Validates the stored matrix against its Tyurin data; throws InvalidArgument on violations.
KricheverLax lax_from(const json& j);

json to_json(const AnsatzSpec& a);
AnsatzSpec ansatz_from(const json& j);

json trajectory_to_json(const Trajectory& tr);
Trajectory trajectory_from(const json& j);

/// Deterministic text: object keys in insertion order, floats via %.17g.
std::string dump(const json& j, int indent = 2);
void write_text(const std::filesystem::path& p, const std::string& s);
json read_json(const std::filesystem::path& p);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string csv() const;
    json as_json() const;
};

}  // namespace laxflow::io
