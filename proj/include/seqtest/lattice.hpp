#pragma once

#include <cstdint>
#include <functional>

#include "seqtest/parallel.hpp"
#include "seqtest/policy.hpp"
#include "seqtest/report.hpp"

namespace seqtest {

// A deterministic stopping/decision rule for the Bernoulli model tabulated
// over the sufficient-statistic lattice (n, s), 1 <= n <= N, 0 <= s <= n.
// Every state holds either "continue" or "stop and accept H_j"; the horizon
// row is all stop actions.  States the truncation forced to stop (the
// untruncated rule would have continued) are flagged so evaluation can
// report the residual continuation mass.
class LatticePolicy {
  public:
    static constexpr int8_t kContinue = -1;

    LatticePolicy() = default;
    explicit LatticePolicy(int horizon);

    int horizon() const { return horizon_; }

    int8_t action(int n, int s) const { return actions_[index(n, s)]; }
    void set_action(int n, int s, int8_t a) { actions_[index(n, s)] = a; }

    bool forced(int s) const { return forced_[static_cast<size_t>(s)] != 0; }
    void set_forced(int s, bool f) { forced_[static_cast<size_t>(s)] = f ? 1 : 0; }

    // Throws std::invalid_argument unless the horizon row is all stop.
    void validate() const;

    size_t index(int n, int s) const {
        return static_cast<size_t>(n - 1) * (n + 2) / 2 + static_cast<size_t>(s);
    }
    size_t size() const { return actions_.size(); }

    bool operator==(const LatticePolicy&) const = default;

  private:
    int horizon_ = 0;
    std::vector<int8_t> actions_;   // rows 1..N concatenated, row n has n+1 entries
    std::vector<uint8_t> forced_;   // horizon row only, N+1 entries
};

struct EvalOptions {
    bool want_stop_dist = false;
};

// Tabulates any state rule over the lattice by exact reconstruction of the
// log-likelihoods from (n, s).  Row N is forced to stop with the rule's
// truncation decision.  Bernoulli model required.
LatticePolicy tabulate_policy(const TestSpec& spec, const StopPolicy& rule, int horizon,
                              Par par = {});

// The closed-form rule tabulated at the spec's horizon (or safety cap).
LatticePolicy dbc_lattice(const TestSpec& spec, Par par = {}, int horizon_override = 0);

// Exact operating characteristics of a lattice policy by forward recursion
// over reachable masses: acceptance probabilities, ESS, stopping-time
// distribution, and the truncation-forced residual mass, for the hypothesis
// points, the evaluation points, and any extra parameters.
TestReport evaluate(const LatticePolicy& policy, const TestSpec& spec,
                    std::span<const double> extra_params = {}, Par par = {},
                    const EvalOptions& opts = {});

// Fused tabulation + forward evaluation of the closed-form rule, streaming
// the lattice row by row without materializing a policy.  Only states the
// mass recursion can actually reach are classified, and the pass ends once
// the total alive mass across all parameters falls under exit_mass (the
// dropped tail biases every acceptance probability by less than exit_mass
// and the ESS by less than exit_mass * N).  This is the evaluator behind
// calibration probes; reported results come from the exact pipeline.
TestReport dbc_streamed_report(const TestSpec& spec, int horizon, Par par = {},
                               double exit_mass = 1e-13);

struct BackwardResult {
    LatticePolicy policy;
    double minimal_lagrangian = 0.0;
};

// Optimal truncated test by backward induction on the lattice, carried out
// on log values with log-sum-exp.  Returns the policy together with the
// minimal attainable Lagrangian 1 + I_1 V_1^N.
BackwardResult backward_optimal(const TestSpec& spec, int horizon, Par par = {});

// Exhaustive path enumeration (2^N sequences, N <= 12): the independent
// oracle for the forward recursion.  The rule is applied path by path on the
// raw LogLikState built from per-step density increments, never through the
// lattice reconstruction.
TestReport brute_force_oracle(const StopPolicy& rule, const TestSpec& spec, int horizon,
                              std::span<const double> extra_params = {});

// Adapter: play a tabulated lattice policy back as a path rule (Bernoulli).
class LatticePathPolicy final : public StopPolicy {
  public:
    LatticePathPolicy(const LatticePolicy& policy, const TestSpec& spec);
    Verdict check(const LogLikState& state) const override;
    int decide_at_cap(const LogLikState& state) const override;
    std::string name() const override { return "lattice"; }

  private:
    const LatticePolicy& policy_;
    std::vector<double> log_theta_, log_1m_theta_;
};

struct OcEssPoint {
    double theta = 0.0;
    double oc = 0.0;   // probability of accepting the designated null
    double ess = 0.0;
};

// Operating characteristic and ESS over a parameter grid; accepting any
// hypothesis in accept_null counts towards the OC.
std::vector<OcEssPoint> oc_ess_curve(const LatticePolicy& policy, const TestSpec& spec,
                                     std::span<const double> grid,
                                     std::span<const int> accept_null, Par par = {});

}  // namespace seqtest
