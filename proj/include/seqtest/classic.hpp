#pragma once

#include "seqtest/policy.hpp"
#include "seqtest/report.hpp"

namespace seqtest {

// Wald's SPRT on the likelihood ratio f_{theta_2}/f_{theta_1}: continue
// while the ratio stays inside (A, B), accept H_2 at stopping when the ratio
// is at least the decision threshold, H_1 otherwise.  Equality at the
// decision threshold goes to H_2, which matches the classical form; the
// risk-argmin convention of the closed-form rule picks H_1 there, so the two
// coincide away from exact ties.
struct SprtRule {
    double A = 0.0;
    double B = 0.0;
    double decision_threshold = 1.0;
    double log_A = 0.0, log_B = 0.0, log_decision = 0.0;

    static SprtRule make(double A, double B, double decision_threshold);
};

// The SPRT the two-hypothesis Bayesian rule reduces to:
// A = gamma_1 / (lambda_2 - gamma_2), B = (lambda_1 - gamma_1) / gamma_2,
// with decision threshold lambda_1 / lambda_2 strictly between them.
// Preconditions: lambda_i > 1, gammas positive summing to one.
SprtRule sprt_from_lagrange(double lambda1, double lambda2, double gamma1, double gamma2);

Verdict sprt_verdict(const LogLikState& state, const SprtRule& rule);

// Lorden's 2-SPRT shape the single-evaluation-point rule reduces to: stop
// when min(lambda_1 f_{theta_1}, lambda_2 f_{theta_2}) <= f_vartheta and
// accept H_1 iff lambda_1 f_{theta_1} >= lambda_2 f_{theta_2}.
// The state must carry the two hypothesis densities and the single
// evaluation-point density.
struct TwoSprtRule {
    double theta1 = 0.0, theta2 = 0.0, vartheta = 0.0;  // descriptive only
    double log_lambda1 = 0.0, log_lambda2 = 0.0;
};

TwoSprtRule two_sprt(double lambda1, double lambda2, double theta1, double theta2,
                     double vartheta);

Verdict two_sprt_verdict(const LogLikState& state, const TwoSprtRule& rule);

// Armitage's matrix SPRT.  log_thresholds(i, j) is the evidence hurdle the
// log-likelihood ratio of H_j over H_i must clear for H_j to be accepted:
// accept H_j (stop) iff log f_j - log f_i >= log_thresholds(i, j) for every
// i != j; the smallest qualifying j wins.  Diagonal entries are ignored.
// Row i therefore collects the hurdles protecting against errors committed
// while H_i is true, which is the natural knob for calibrating alpha_i.
struct MsprtRule {
    Matrix log_thresholds;

    static MsprtRule uniform(int k, double log_threshold);
    // Row-constant thresholds: log_thresholds(i, j) = row_logs[i] for j != i.
    static MsprtRule row_constant(std::span<const double> row_logs);
};

Verdict msprt_verdict(const LogLikState& state, const MsprtRule& rule);

// Truncation decision: the hypothesis with the largest worst-case margin
// over its hurdles (the one closest to qualifying).
int msprt_decide_at_cap(const LogLikState& state, const MsprtRule& rule);

// StopPolicy adapters for simulation and lattice tabulation.
class SprtPolicy final : public StopPolicy {
  public:
    explicit SprtPolicy(const SprtRule& rule) : rule_(rule) {}
    Verdict check(const LogLikState& state) const override {
        if (state.n < 1) return {};
        return sprt_verdict(state, rule_);
    }
    int decide_at_cap(const LogLikState& state) const override {
        const double llr = state.logf_theta[1] - state.logf_theta[0];
        return llr >= rule_.log_decision ? 1 : 0;
    }
    std::string name() const override { return "sprt"; }

  private:
    SprtRule rule_;
};

class TwoSprtPolicy final : public StopPolicy {
  public:
    explicit TwoSprtPolicy(const TwoSprtRule& rule) : rule_(rule) {}
    Verdict check(const LogLikState& state) const override {
        if (state.n < 1) return {};
        return two_sprt_verdict(state, rule_);
    }
    int decide_at_cap(const LogLikState& state) const override {
        return rule_.log_lambda1 + state.logf_theta[0] >=
                       rule_.log_lambda2 + state.logf_theta[1]
                   ? 0
                   : 1;
    }
    std::string name() const override { return "2-sprt"; }

  private:
    TwoSprtRule rule_;
};

class MsprtPolicy final : public StopPolicy {
  public:
    explicit MsprtPolicy(MsprtRule rule) : rule_(std::move(rule)) {}
    Verdict check(const LogLikState& state) const override {
        if (state.n < 1) return {};
        return msprt_verdict(state, rule_);
    }
    int decide_at_cap(const LogLikState& state) const override {
        return msprt_decide_at_cap(state, rule_);
    }
    std::string name() const override { return "msprt"; }

  private:
    MsprtRule rule_;
};

// Two-decision summary of a three-hypothesis test with H_{null} playing the
// simple null: accepting any other hypothesis rejects it.
struct TwoSidedSummary {
    double alpha = 0.0;                 // P_null(reject null)
    std::vector<double> beta;           // per alternative: P(not accepting it when true)
    std::vector<int> alternative_index; // hypothesis index for each beta entry
};

TwoSidedSummary two_sided_wrap(const TestReport& report, const TestSpec& spec,
                               int null_index);

}  // namespace seqtest
