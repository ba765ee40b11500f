#include "seqtest/reference.hpp"

#include <algorithm>
#include <cmath>

namespace seqtest::ref {

namespace {

LogLikState state_at(const TestSpec& spec, int n, int s) {
    LogLikState state(spec);
    state.n = n;
    for (int i = 0; i < spec.k(); ++i)
        state.logf_theta[i] = bernoulli_loglik(n, s, spec.thetas()[i]);
    for (int i = 0; i < spec.num_evals(); ++i)
        state.logf_eval[i] = bernoulli_loglik(n, s, spec.evals()[i]);
    return state;
}

}  // namespace

LatticePolicy dbc_lattice(const TestSpec& spec, int horizon_override) {
    if (spec.model().kind != ModelKind::BernoulliIID)
        throw std::invalid_argument("ref::dbc_lattice: Bernoulli model required");
    const int N = horizon_override > 0 ? horizon_override : spec.horizon().cap;
    const DbcKernel kernel(spec);

    LatticePolicy policy(N);
    for (int n = 1; n <= N; ++n) {
        for (int s = 0; s <= n; ++s) {
            const LogLikState state = state_at(spec, n, s);
            const Verdict v = dbc_verdict(state, spec);
            if (n < N) {
                policy.set_action(n, s, v.stopped ? static_cast<int8_t>(v.accepted)
                                                  : LatticePolicy::kContinue);
            } else {
                policy.set_action(
                    n, s, static_cast<int8_t>(v.stopped ? v.accepted
                                                        : kernel.decide(state.logf_theta)));
                policy.set_forced(s, !v.stopped);
            }
        }
    }
    return policy;
}

TestReport evaluate(const LatticePolicy& policy, const TestSpec& spec,
                    std::span<const double> extra_params, const EvalOptions& opts) {
    if (spec.model().kind != ModelKind::BernoulliIID)
        throw std::invalid_argument("ref::evaluate: Bernoulli model required");
    policy.validate();
    const int N = policy.horizon();
    const int k = spec.k();

    std::vector<double> params(spec.thetas());
    for (double p : spec.evals())
        if (std::find(params.begin(), params.end(), p) == params.end()) params.push_back(p);
    for (double p : extra_params)
        if (std::find(params.begin(), params.end(), p) == params.end()) params.push_back(p);

    TestReport report;
    for (double p : params) {
        const double q = 1.0 - p;

        // mass[n][s] = P(not stopped before n, S_n = s), full table.
        std::vector<std::vector<double>> mass(static_cast<size_t>(N) + 1);
        for (int n = 0; n <= N; ++n) mass[n].assign(static_cast<size_t>(n) + 1, 0.0);
        mass[1][0] = q;
        mass[1][1] = p;

        ParamResult res;
        res.param = p;
        res.accept.assign(k, 0.0);
        if (opts.want_stop_dist) res.stop_dist.assign(N, 0.0);

        for (int n = 1; n <= N; ++n) {
            double stop_mass = 0.0;
            for (int s = 0; s <= n; ++s) {
                const double c = mass[n][s];
                if (c == 0.0) continue;
                const int8_t a = policy.action(n, s);
                if (a >= 0) {
                    res.accept[a] += c;
                    stop_mass += c;
                    if (n == N && policy.forced(s)) res.capped += c;
                } else {
                    // validate() guarantees n < N here
                    mass[n + 1][s] += c * q;
                    mass[n + 1][s + 1] += c * p;
                }
            }
            res.ess += static_cast<double>(n) * stop_mass;
            if (opts.want_stop_dist) res.stop_dist[n - 1] = stop_mass;
        }
        report.results.push_back(std::move(res));
    }

    for (int i = 0; i < spec.num_evals(); ++i)
        report.weighted_ess += spec.gammas()[i] * report.find(spec.evals()[i])->ess;
    return report;
}

BackwardResult backward_optimal(const TestSpec& spec, int horizon) {
    if (spec.model().kind != ModelKind::BernoulliIID)
        throw std::invalid_argument("ref::backward_optimal: Bernoulli model required");
    const int N = horizon;
    const DbcKernel kernel(spec);

    LatticePolicy policy(N);
    std::vector<std::vector<double>> logV(static_cast<size_t>(N) + 1);
    for (int n = 1; n <= N; ++n) logV[n].assign(static_cast<size_t>(n) + 1, 0.0);

    for (int s = 0; s <= N; ++s) {
        const LogLikState state = state_at(spec, N, s);
        const auto [v, j] = kernel.min_log_risk(state.logf_theta);
        logV[N][s] = v;
        policy.set_action(N, s, static_cast<int8_t>(j));
        policy.set_forced(s, !(v <= kernel.log_weighted(state.logf_eval)));
    }
    for (int n = N - 1; n >= 1; --n) {
        for (int s = 0; s <= n; ++s) {
            const LogLikState state = state_at(spec, n, s);
            const auto [v, j] = kernel.min_log_risk(state.logf_theta);
            const double w = kernel.log_weighted(state.logf_eval);
            const double cont = log_add(w, log_add(logV[n + 1][s], logV[n + 1][s + 1]));
            if (v <= cont) {
                policy.set_action(n, s, static_cast<int8_t>(j));
                logV[n][s] = v;
            } else {
                policy.set_action(n, s, LatticePolicy::kContinue);
                logV[n][s] = cont;
            }
        }
    }
    const double value = 1.0 + std::exp(log_add(logV[1][0], logV[1][1]));
    return {std::move(policy), value};
}

}  // namespace seqtest::ref
