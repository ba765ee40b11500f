#pragma once

#include <string>

#include <json.hpp>

#include "seqtest/lattice.hpp"
#include "seqtest/report.hpp"

namespace seqtest {

using nlohmann::json;

// TestSpec document: exactly the keys thetas, evals, gammas, lambdas
// (row-major k*k with zero diagonal entries), horizon (positive integer or
// the string "unbounded"), and model.  Field order is irrelevant; unknown
// keys are rejected.
json spec_to_json(const TestSpec& spec);
TestSpec spec_from_json(const json& j);

json model_to_json(const Model& model);
Model model_from_json(const json& j);

// Run-length encoded policy: per row a list of [s_start, action] segments,
// action -1 = continue, j >= 1 = stop accepting H_j (1-based in files).
json policy_to_json(const LatticePolicy& policy);
LatticePolicy policy_from_json(const json& j);

json report_to_json(const TestReport& report);
TestReport report_from_json(const json& j);

// CSV: one row per (true theta, accepted j) for the acceptance
// probabilities, one row per parameter for ESS and cap mass, estimates
// paired with standard errors, 17 significant digits.
std::string report_to_csv(const TestReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string format_full(double v);  // %.17g

}  // namespace seqtest
