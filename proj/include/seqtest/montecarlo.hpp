#pragma once

#include "seqtest/parallel.hpp"
#include "seqtest/policy.hpp"
#include "seqtest/report.hpp"

namespace seqtest {

// Seeded Monte Carlo run of one rule under one true parameter value.  The
// per-replication RNG stream is keyed by (seed, parameter, replication
// index), so reports are bit-identical across runs and thread counts, and
// calibration probes sharing a seed see common random numbers.
struct SimConfig {
    long reps = 0;
    uint64_t seed = 0;
    int cap = Horizon::kDefaultSafetyCap;
    double true_param = 0.0;
    const StopPolicy* rule = nullptr;
    bool want_stop_dist = false;
};

// One true parameter.  Replications that reach the cap without the rule
// stopping are decided by the rule's truncation decision and tallied in
// capped, never discarded.
TestReport simulate(const TestSpec& spec, const SimConfig& config, Par par = {});

// Full report: simulates under every hypothesis point, every evaluation
// point, and any extras, and assembles the error matrix and weighted ESS.
TestReport mc_report(const TestSpec& spec, const StopPolicy& rule,
                     std::span<const double> extra_params, long reps, uint64_t seed, int cap,
                     Par par = {}, bool want_stop_dist = false);

// Empirical survival function (n, P(tau > n)) for n = 0..cap.
std::vector<std::pair<int, double>> tail_curve(const TestSpec& spec, const SimConfig& config,
                                               Par par = {});

}  // namespace seqtest
