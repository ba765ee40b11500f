#pragma once

#include <functional>
#include <optional>

#include "seqtest/report.hpp"

namespace seqtest {

// max over constrained entries of |achieved - target| / target.
double relative_distance(std::span<const double> achieved, std::span<const double> targets);

// One calibration constraint: the sum of the named error-matrix entries
// (0-based (true i, accepted j)) should match target.  Per-hypothesis
// constraints use all entries of one row; two-sided constructions aggregate
// pairs of entries.
struct ErrorTarget {
    std::vector<std::pair<int, int>> entries;
    double target = 0.0;
};

double achieved_error(const TestReport& report, const TestSpec& spec, const ErrorTarget& t);
double relative_distance(const TestReport& report, const TestSpec& spec,
                         std::span<const ErrorTarget> targets);

// Parameter sharing for the loss matrix: each group lists the (i, j) entries
// bound to one free multiplier.  Entries not covered keep the template value.
struct LambdaTies {
    std::vector<std::vector<std::pair<int, int>>> groups;

    // One free multiplier per row (lambda_ij = lambda_i for all j != i).
    static LambdaTies row_constant(int k);
    // Row-constant with whole rows sharing a multiplier, e.g. {{0,2},{1}}
    // ties rows 1 and 3 together (lambda_1 = lambda_3).
    static LambdaTies rows_tied(int k, const std::vector<std::vector<int>>& row_groups);

    Matrix apply(const Matrix& base, std::span<const double> values) const;
};

struct CalibrationTarget {
    std::vector<ErrorTarget> targets;
    double tolerance = 0.002;
    LambdaTies ties;

    // alpha_i(test) ~ alphas[i] for every hypothesis, row-constant ties.
    static CalibrationTarget per_hypothesis(int k, std::span<const double> alphas);
};

struct NmOptions {
    int max_evals = 500;
    double xtol = 1e-8;
    double ftol = 1e-12;
    double target = kNegInf;          // stop early once the best value reaches this
    std::vector<double> init_step;    // per-coordinate initial simplex offsets
};

struct NmResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
    bool reached_target = false;
};

// Nelder-Mead simplex search (reflection / expansion / contraction / shrink
// with the standard coefficients).  Terminates when the simplex diameter
// falls under xtol, the objective spread under ftol, the best value reaches
// target, or max_evals is exhausted.  Throws if f(x0) is not finite.
NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0, const NmOptions& opts = {});

using Evaluator = std::function<TestReport(const TestSpec&)>;

struct CalibrationResult {
    TestSpec spec;
    TestReport report;
    double achieved_distance = 0.0;
    bool met = false;
    int evals = 0;
    std::vector<double> multipliers;  // fitted free multipliers, one per tie group
};

// Fits the free loss multipliers so the achieved error probabilities match
// the targets under the relative-distance criterion.  The search runs in
// log(lambda) space (positivity by construction); probes violating
// non-triviality score +inf and the search continues.  Returns the best spec
// found even when the tolerance is not met (met = false then).
// Restarts rebuild the simplex around the incumbent with a fresh spread,
// which un-sticks the search on the staircase objectives produced by
// discrete stopping regions.
CalibrationResult calibrate(const TestSpec& spec_template, const CalibrationTarget& target,
                            const Evaluator& evaluator, NmOptions opts = {}, int restarts = 2);

}  // namespace seqtest
