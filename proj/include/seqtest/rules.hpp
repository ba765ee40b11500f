#pragma once

#include <span>
#include <utility>
#include <vector>

#include "seqtest/test_spec.hpp"

namespace seqtest {

struct TestReport;

// Outcome of querying a stop/decide rule at one state.  accepted is the
// 0-based hypothesis index, valid only when stopped; ties go to the smallest
// index, and equality at the stopping boundary stops.
struct Verdict {
    bool stopped = false;
    int accepted = -1;

    bool operator==(const Verdict&) const = default;
};

// log sum_i gamma_i exp(logf_eval_i), the weighted mixture density used on
// the continuation side of the stopping inequality.  -inf iff all densities
// are zero.
double log_weighted_density(const LogLikState& state, std::span<const double> gammas);

// Entry j is log sum_{i != j} lambda_ij exp(logf_theta_i); the minimum entry
// is the log of the pointwise minimal posterior-risk candidate v_n.
std::vector<double> log_risk_candidates(const LogLikState& state, const Matrix& lambdas);

// The closed-form stopping/decision rule: stop as soon as the minimal risk
// candidate no longer exceeds the weighted mixture density, accept the
// hypothesis attaining the minimum.  n = 0 never stops.
Verdict dbc_verdict(const LogLikState& state, const TestSpec& spec);

// Posterior probabilities pi_i = gamma_i f_i / sum_j gamma_j f_j in the
// Bayesian setting (evals == thetas).  At n = 0 this is gamma itself.
// Throws std::domain_error when every density is zero.
std::vector<double> posterior(const LogLikState& state, std::span<const double> gammas);

// Weighted ESS plus loss-weighted error probabilities: the quantity every
// test in this library is graded on.
double lagrangian(const TestReport& report, const TestSpec& spec);

// Precomputed log-space form of the rule, shared by the exact lattice
// kernels, the Monte Carlo policies, and the reference implementations so
// that every code path classifies a state with bit-identical arithmetic.
class DbcKernel {
  public:
    DbcKernel(const Matrix& lambdas, std::span<const double> gammas);
    explicit DbcKernel(const TestSpec& spec) : DbcKernel(spec.lambdas(), spec.gammas()) {}

    int k() const { return k_; }
    int num_evals() const { return static_cast<int>(log_gamma_.size()); }

    // log risk candidate for accepting j.
    double log_risk(std::span<const double> logf_theta, int j) const;
    // (min_j log risk, argmin with smallest-index ties).
    std::pair<double, int> min_log_risk(std::span<const double> logf_theta) const;
    double log_weighted(std::span<const double> logf_eval) const;

    Verdict verdict(std::span<const double> logf_theta, std::span<const double> logf_eval) const {
        auto [v, j] = min_log_risk(logf_theta);
        return v <= log_weighted(logf_eval) ? Verdict{true, j} : Verdict{false, -1};
    }
    // Decision when stopping is forced (truncation): the risk argmin.
    int decide(std::span<const double> logf_theta) const { return min_log_risk(logf_theta).second; }

  private:
    int k_;
    Matrix log_lambda_;             // -inf on the diagonal
    std::vector<double> log_gamma_;
};

}  // namespace seqtest
