#include "seqtest/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "seqtest/rng.hpp"

namespace seqtest {

namespace {

uint64_t param_stream(double param) { return std::bit_cast<uint64_t>(param); }

ParamResult run_one_param(const TestSpec& spec, const SimConfig& config, Par par) {
    if (config.reps < 1) throw std::invalid_argument("simulate: reps must be >= 1");
    if (config.cap < 1) throw std::invalid_argument("simulate: cap must be >= 1");
    if (!config.rule) throw std::invalid_argument("simulate: no rule given");
    if (!valid_parameter(spec.model(), config.true_param))
        throw std::invalid_argument("simulate: true_param invalid for the model");

    const long R = config.reps;
    const int k = spec.k();
    const uint64_t stream = param_stream(config.true_param);

    std::vector<int32_t> tau(static_cast<size_t>(R));
    std::vector<int8_t> decision(static_cast<size_t>(R));
    std::vector<uint8_t> capped(static_cast<size_t>(R));

#pragma omp parallel num_threads(par.threads) if (par.enabled())
    {
        LogLikState state(spec);
        // Chunked dynamic scheduling absorbs the random per-replication
        // runtimes; results stay deterministic because every replication
        // writes its own slot and owns its own RNG stream.
#pragma omp for schedule(dynamic, 1024)
        for (long r = 0; r < R; ++r) {
            SplitMix64 rng = replication_rng(config.seed, stream, static_cast<uint64_t>(r));
            state.reset();
            int32_t t = 0;
            int8_t dec = -1;
            uint8_t cap_hit = 0;
            for (t = 1; t <= config.cap; ++t) {
                const double x =
                    sample_observation(spec.model(), config.true_param, t, rng);
                state.append(spec, x);
                const Verdict v = config.rule->check(state);
                if (v.stopped) {
                    dec = static_cast<int8_t>(v.accepted);
                    break;
                }
                if (t == config.cap) {
                    dec = static_cast<int8_t>(config.rule->decide_at_cap(state));
                    cap_hit = 1;
                    break;
                }
            }
            tau[r] = std::min<int32_t>(t, config.cap);
            decision[r] = dec;
            capped[r] = cap_hit;
        }
    }

    // Reduce in replication order: the merge is deterministic by construction.
    ParamResult res;
    res.param = config.true_param;
    res.accept.assign(k, 0.0);
    res.accept_se.assign(k, 0.0);
    if (config.want_stop_dist) res.stop_dist.assign(config.cap, 0.0);
    double sum_tau = 0.0, sum_tau2 = 0.0;
    long n_capped = 0;
    std::vector<long> counts(k, 0);
    for (long r = 0; r < R; ++r) {
        ++counts[decision[r]];
        sum_tau += tau[r];
        sum_tau2 += static_cast<double>(tau[r]) * tau[r];
        n_capped += capped[r];
        if (config.want_stop_dist) res.stop_dist[tau[r] - 1] += 1.0;
    }
    const double dR = static_cast<double>(R);
    for (int j = 0; j < k; ++j) {
        const double p = counts[j] / dR;
        res.accept[j] = p;
        res.accept_se[j] = std::sqrt(p * (1.0 - p) / dR);
    }
    res.ess = sum_tau / dR;
    res.capped = n_capped / dR;
    if (R > 1) {
        const double var = std::max(0.0, (sum_tau2 - sum_tau * sum_tau / dR) / (dR - 1.0));
        res.ess_se = std::sqrt(var / dR);
    }
    if (config.want_stop_dist)
        for (double& m : res.stop_dist) m /= dR;
    return res;
}

}  // namespace

TestReport simulate(const TestSpec& spec, const SimConfig& config, Par par) {
    TestReport report;
    report.monte_carlo = true;
    report.reps = config.reps;
    report.results.push_back(run_one_param(spec, config, par));
    return report;
}

TestReport mc_report(const TestSpec& spec, const StopPolicy& rule,
                     std::span<const double> extra_params, long reps, uint64_t seed, int cap,
                     Par par, bool want_stop_dist) {
    std::vector<double> params(spec.thetas());
    auto push_unique = [&params](double p) {
        if (std::find(params.begin(), params.end(), p) == params.end()) params.push_back(p);
    };
    for (double p : spec.evals()) push_unique(p);
    for (double p : extra_params) push_unique(p);

    TestReport report;
    report.monte_carlo = true;
    report.reps = reps;
    for (double p : params) {
        SimConfig config{reps, seed, cap, p, &rule, want_stop_dist};
        report.results.push_back(run_one_param(spec, config, par));
    }
    for (int i = 0; i < spec.num_evals(); ++i)
        report.weighted_ess += spec.gammas()[i] * report.find(spec.evals()[i])->ess;
    return report;
}

std::vector<std::pair<int, double>> tail_curve(const TestSpec& spec, const SimConfig& config,
                                               Par par) {
    SimConfig c = config;
    c.want_stop_dist = true;
    const TestReport report = simulate(spec, c, par);
    const ParamResult& res = report.results.front();

    std::vector<std::pair<int, double>> out;
    double survival = 1.0;
    out.emplace_back(0, survival);
    for (int n = 1; n <= config.cap; ++n) {
        survival -= res.stop_dist[n - 1];
        out.emplace_back(n, std::max(0.0, survival));
    }
    return out;
}

}  // namespace seqtest
