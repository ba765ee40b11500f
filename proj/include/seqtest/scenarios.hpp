#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "seqtest/fit.hpp"
#include "seqtest/parallel.hpp"

namespace seqtest {

// One comparison line of a scenario run: achieved vs expected at a
// tolerance.  Informational rows (gate = false) are reported but do not
// affect the overall verdict.
struct CheckRow {
    std::string name;
    double achieved = 0.0;
    double expected = 0.0;
    double tol = 0.0;
    bool relative = false;
    bool gate = true;
    bool pass = true;
};

struct ScenarioResult {
    std::string id;
    std::vector<CheckRow> checks;
    std::vector<std::string> table_header;
    std::vector<std::vector<double>> table_rows;
    // Calibrated specs by label, e.g. "dbc@0.1"; reused by downstream
    // analyses such as the stopping-tail diagnostics.
    std::vector<std::pair<std::string, TestSpec>> fitted_specs;

    bool all_pass() const {
        for (const CheckRow& c : checks)
            if (c.gate && !c.pass) return false;
        return true;
    }
};

struct ScenarioOverrides {
    std::optional<std::vector<double>> alphas;  // table1 / table2 columns
    std::optional<long> reps;                   // Monte Carlo scenarios
    std::optional<uint64_t> seed;
    std::optional<int> horizon;
};

std::vector<std::string> scenario_ids();

// Runs one of the paper-study scenarios end to end (calibrate, evaluate,
// compare) and returns the comparison table.  progress, when given, receives
// one line per milestone.
ScenarioResult run_scenario(const std::string& id, const ScenarioOverrides& overrides = {},
                            Par par = {}, std::ostream* progress = nullptr);

}  // namespace seqtest
