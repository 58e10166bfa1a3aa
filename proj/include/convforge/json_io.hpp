#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "convforge/approx.hpp"
#include "convforge/factorize.hpp"
#include "convforge/network.hpp"
#include "convforge/ridge.hpp"
#include "convforge/sequence.hpp"

namespace convforge::io {

using nlohmann::json;

inline constexpr const char* kSchema = "convforge/v1";

// Sequences are {"coeffs": [...], "support_hint": n}.
json to_json(const FiniteSequence& seq);
FiniteSequence sequence_from_json(const json& j);

json to_json(const FactorizationResult& result, int s);

json to_json(const RidgeExpansion& ridge);
RidgeExpansion ridge_from_json(const json& j);

json to_json(const DeepCnn& net);
DeepCnn network_from_json(const json& j);

json to_json(const std::vector<ErrorReport>& rows);
std::string to_csv(const std::vector<ErrorReport>& rows);

/// Accepts {"points": [[...], ...]} or a bare array of arrays.
std::vector<Eigen::VectorXd> points_from_json(const json& j);

/// Adds "schema" and "kind" to a top-level document.
json document(const std::string& kind, json body);

/// Throws InvalidArgument unless j carries the expected schema and kind.
void expect_document(const json& j, const std::string& kind);

}  // namespace convforge::io
