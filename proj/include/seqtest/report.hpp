#pragma once

#include <optional>
#include <vector>

#include "seqtest/math_util.hpp"
#include "seqtest/test_spec.hpp"

namespace seqtest {

// Operating characteristics of one rule evaluated (exactly or by simulation)
// under one true parameter value.
struct ParamResult {
    double param = 0.0;
    std::vector<double> accept;          // P(accept H_j), j = 0..k-1
    double ess = 0.0;                    // E tau (in steps)
    double capped = 0.0;                 // mass that hit the horizon before the rule stopped
    std::vector<double> stop_dist;       // P(tau = n), n = 1..N (may be empty)
    std::vector<double> accept_se;       // standard errors (Monte Carlo only)
    double ess_se = 0.0;
};

// Full report for a test: one ParamResult per evaluated parameter, beginning
// with the k hypothesis points in order, followed by the evaluation points
// not already among them, then any extra requested parameters.
struct TestReport {
    std::vector<ParamResult> results;
    double weighted_ess = 0.0;           // sum_i gamma_i * E_{vartheta_i} tau
    long reps = 0;                       // Monte Carlo replications (0 = exact)
    bool monte_carlo = false;

    const ParamResult* find(double param) const {
        for (const auto& r : results)
            if (r.param == param) return &r;
        return nullptr;
    }

    // alpha_ij = P_{theta_i}(accept H_j); rows follow spec.thetas order.
    Matrix alpha_matrix(const TestSpec& spec) const;
    // Per-hypothesis error alpha_i = 1 - alpha_ii.
    std::vector<double> alpha_i(const TestSpec& spec) const;
};

}  // namespace seqtest
