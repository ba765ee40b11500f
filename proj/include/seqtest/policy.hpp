#pragma once

#include <memory>
#include <string>

#include "seqtest/rules.hpp"

namespace seqtest {

// Abstract stop/decide rule queried state by state.  check() reports whether
// the rule stops at the current state and which hypothesis it accepts;
// decide_at_cap() supplies the terminal decision when a truncation horizon
// forces a stop the rule itself did not call for.
class StopPolicy {
  public:
    virtual ~StopPolicy() = default;
    virtual Verdict check(const LogLikState& state) const = 0;
    virtual int decide_at_cap(const LogLikState& state) const = 0;
    virtual std::string name() const = 0;
};

// The closed-form rule evaluated directly from the log-likelihood state.
// Truncation decisions use the same risk argmin as the untruncated rule.
class DbcPolicy final : public StopPolicy {
  public:
    explicit DbcPolicy(const TestSpec& spec) : kernel_(spec) {}

    Verdict check(const LogLikState& state) const override {
        if (state.n < 1) return {};
        return kernel_.verdict(state.logf_theta, state.logf_eval);
    }
    int decide_at_cap(const LogLikState& state) const override {
        return kernel_.decide(state.logf_theta);
    }
    std::string name() const override { return "dbc"; }

    const DbcKernel& kernel() const { return kernel_; }

  private:
    DbcKernel kernel_;
};

}  // namespace seqtest
