#include "seqtest/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace seqtest {

namespace {

// Masses below this are dropped during the forward pass: they are orders of
// magnitude under every reported tolerance and would otherwise drag the
// recursion through denormals.
constexpr double kFlush = 1e-300;

void require_bernoulli(const TestSpec& spec, const char* who) {
    if (spec.model().kind != ModelKind::BernoulliIID)
        throw std::invalid_argument(std::string(who) + ": Bernoulli model required");
}

// Exact reconstruction of all log-densities at lattice state (n, s).
struct LatticeBasis {
    std::vector<double> lt_theta, lq_theta, lt_eval, lq_eval;

    explicit LatticeBasis(const TestSpec& spec) {
        for (double t : spec.thetas()) {
            lt_theta.push_back(std::log(t));
            lq_theta.push_back(std::log1p(-t));
        }
        for (double t : spec.evals()) {
            lt_eval.push_back(std::log(t));
            lq_eval.push_back(std::log1p(-t));
        }
    }

    void fill(int n, int s, LogLikState& state) const {
        const double ds = static_cast<double>(s);
        const double dq = static_cast<double>(n - s);
        state.n = n;
        for (size_t i = 0; i < lt_theta.size(); ++i)
            state.logf_theta[i] = ds * lt_theta[i] + dq * lq_theta[i];
        for (size_t i = 0; i < lt_eval.size(); ++i)
            state.logf_eval[i] = ds * lt_eval[i] + dq * lq_eval[i];
    }
};

std::vector<double> evaluation_params(const TestSpec& spec, std::span<const double> extra) {
    std::vector<double> params(spec.thetas());
    auto push_unique = [&params](double p) {
        if (std::find(params.begin(), params.end(), p) == params.end()) params.push_back(p);
    };
    for (double p : spec.evals()) push_unique(p);
    for (double p : extra) push_unique(p);
    return params;
}

}  // namespace

LatticePolicy::LatticePolicy(int horizon) : horizon_(horizon) {
    if (horizon < 1) throw std::invalid_argument("LatticePolicy: horizon must be >= 1");
    if (horizon > 200000) throw std::invalid_argument("LatticePolicy: horizon too large");
    actions_.assign(index(horizon, horizon) + 1, kContinue);
    forced_.assign(static_cast<size_t>(horizon) + 1, 0);
}

void LatticePolicy::validate() const {
    if (horizon_ < 1) throw std::invalid_argument("LatticePolicy: empty policy");
    for (int s = 0; s <= horizon_; ++s)
        if (action(horizon_, s) == kContinue)
            throw std::invalid_argument("LatticePolicy: horizon row must be all stop actions");
}

LatticePolicy tabulate_policy(const TestSpec& spec, const StopPolicy& rule, int horizon,
                              Par par) {
    require_bernoulli(spec, "tabulate_policy");
    if (horizon < 1) throw std::invalid_argument("tabulate_policy: horizon must be >= 1");

    LatticePolicy policy(horizon);
    const LatticeBasis basis(spec);
    const int N = horizon;

#pragma omp parallel num_threads(par.threads) if (par.enabled())
    {
        LogLikState state(spec);
#pragma omp for schedule(dynamic, 16)
        for (int n = 1; n <= N; ++n) {
            for (int s = 0; s <= n; ++s) {
                basis.fill(n, s, state);
                if (n < N) {
                    const Verdict v = rule.check(state);
                    policy.set_action(n, s, v.stopped ? static_cast<int8_t>(v.accepted)
                                                      : LatticePolicy::kContinue);
                } else {
                    const Verdict v = rule.check(state);
                    const int j = v.stopped ? v.accepted : rule.decide_at_cap(state);
                    policy.set_action(n, s, static_cast<int8_t>(j));
                    policy.set_forced(s, !v.stopped);
                }
            }
        }
    }
    return policy;
}

LatticePolicy dbc_lattice(const TestSpec& spec, Par par, int horizon_override) {
    const int N = horizon_override > 0 ? horizon_override : spec.horizon().cap;
    return tabulate_policy(spec, DbcPolicy(spec), N, par);
}

TestReport evaluate(const LatticePolicy& policy, const TestSpec& spec,
                    std::span<const double> extra_params, Par par, const EvalOptions& opts) {
    require_bernoulli(spec, "evaluate");
    policy.validate();
    if (policy.horizon() > spec.horizon().cap)
        throw std::invalid_argument("evaluate: policy horizon exceeds the spec horizon");

    const int N = policy.horizon();
    const int k = spec.k();
    const std::vector<double> params = evaluation_params(spec, extra_params);
    const int P = static_cast<int>(params.size());

    TestReport report;
    report.results.resize(params.size());

#pragma omp parallel for schedule(dynamic) num_threads(par.threads) if (par.enabled())
    for (int pi = 0; pi < P; ++pi) {
        const double p = params[pi];
        const double q = 1.0 - p;

        ParamResult res;
        res.param = p;
        res.accept.assign(k, 0.0);
        if (opts.want_stop_dist) res.stop_dist.assign(N, 0.0);

        std::vector<double> cur(static_cast<size_t>(N) + 2, 0.0);
        std::vector<double> nxt(static_cast<size_t>(N) + 2, 0.0);
        cur[0] = q;
        cur[1] = p;

        for (int n = 1; n <= N; ++n) {
            double stop_mass = 0.0;
            if (n < N) std::fill(nxt.begin(), nxt.begin() + n + 2, 0.0);
            for (int s = 0; s <= n; ++s) {
                const double c = cur[s];
                if (c < kFlush) continue;
                const int8_t a = policy.action(n, s);
                if (a >= 0) {
                    res.accept[a] += c;
                    stop_mass += c;
                    if (n == N && policy.forced(s)) res.capped += c;
                } else {
                    nxt[s] += c * q;
                    nxt[s + 1] += c * p;
                }
            }
            res.ess += static_cast<double>(n) * stop_mass;
            if (opts.want_stop_dist) res.stop_dist[n - 1] = stop_mass;
            std::swap(cur, nxt);
        }
        report.results[pi] = std::move(res);
    }

    for (int i = 0; i < spec.num_evals(); ++i) {
        const ParamResult* r = report.find(spec.evals()[i]);
        report.weighted_ess += spec.gammas()[i] * r->ess;
    }
    return report;
}

TestReport dbc_streamed_report(const TestSpec& spec, int horizon, Par par, double exit_mass) {
    require_bernoulli(spec, "dbc_streamed_report");
    if (horizon < 1) throw std::invalid_argument("dbc_streamed_report: horizon must be >= 1");

    const int N = horizon;
    const int k = spec.k();
    const DbcKernel kernel(spec);
    const LatticeBasis basis(spec);
    const std::vector<double> params = evaluation_params(spec, {});
    const int P = static_cast<int>(params.size());

    TestReport report;
    report.results.resize(params.size());
    std::vector<std::vector<double>> cur(P), nxt(P);
    for (int pi = 0; pi < P; ++pi) {
        report.results[pi].param = params[pi];
        report.results[pi].accept.assign(k, 0.0);
        cur[pi].assign(static_cast<size_t>(N) + 2, 0.0);
        nxt[pi].assign(static_cast<size_t>(N) + 2, 0.0);
        cur[pi][0] = 1.0 - params[pi];
        cur[pi][1] = params[pi];
    }

    // Alive window in s, shared across parameters; actions are classified in
    // blocks of rows so the parallel loop has enough states per barrier.
    int lo = 0, hi = 1;
    constexpr int kBlock = 48;
    std::vector<int8_t> actions;                  // block rows, concatenated
    std::vector<size_t> row_offset(kBlock + 1);

    for (int n0 = 1; n0 <= N; n0 += kBlock) {
        const int n1 = std::min(N, n0 + kBlock - 1);
        // Widest possible window for rows n0..n1 given the current one.
        const int wlo = lo, whi = std::min(hi + (n1 - n0 + 1), n1);
        row_offset[0] = 0;
        for (int n = n0; n <= n1; ++n)
            row_offset[n - n0 + 1] =
                row_offset[n - n0] + static_cast<size_t>(std::min(n, whi) - wlo + 1);
        actions.assign(row_offset[n1 - n0 + 1], LatticePolicy::kContinue);

#pragma omp parallel num_threads(par.threads) if (par.enabled())
        {
            LogLikState state(spec);
#pragma omp for schedule(static)
            for (long idx = 0; idx < static_cast<long>(actions.size()); ++idx) {
                int row = 0;
                while (row_offset[row + 1] <= static_cast<size_t>(idx)) ++row;
                const int n = n0 + row;
                const int s = wlo + static_cast<int>(idx - row_offset[row]);
                basis.fill(n, s, state);
                const Verdict v = kernel.verdict(state.logf_theta, state.logf_eval);
                actions[idx] = v.stopped ? static_cast<int8_t>(v.accepted)
                               : n == N  ? static_cast<int8_t>(kernel.decide(state.logf_theta))
                                         : LatticePolicy::kContinue;
            }
        }

        for (int n = n0; n <= n1; ++n) {
            const int8_t* row = actions.data() + row_offset[n - n0];
            const int smax = std::min(n, whi);
            int new_lo = smax + 1, new_hi = wlo - 1;
            for (int pi = 0; pi < P; ++pi) {
                const double p = params[pi];
                const double q = 1.0 - p;
                ParamResult& res = report.results[pi];
                std::vector<double>& c = cur[pi];
                std::vector<double>& x = nxt[pi];
                std::fill(x.begin() + wlo, x.begin() + smax + 2, 0.0);
                double stop_mass = 0.0;
                for (int s = wlo; s <= smax; ++s) {
                    const double m = c[s];
                    if (m < kFlush) continue;
                    const int8_t a = row[s - wlo];
                    if (a >= 0 || n == N) {
                        res.accept[a] += m;
                        stop_mass += m;
                    } else {
                        x[s] += m * q;
                        x[s + 1] += m * p;
                        new_lo = std::min(new_lo, s);
                        new_hi = std::max(new_hi, s + 1);
                    }
                }
                res.ess += static_cast<double>(n) * stop_mass;
                std::swap(cur[pi], nxt[pi]);
            }
            lo = std::max(0, new_lo);
            hi = std::max(new_lo, new_hi);
            if (new_hi < new_lo) {  // nothing alive anywhere
                n0 = N + 1;
                break;
            }
            if (n % 32 == 0) {
                double alive = 0.0;
                for (int pi = 0; pi < P; ++pi)
                    for (int s = lo; s <= std::min(hi, n + 1); ++s) alive += cur[pi][s];
                if (alive < exit_mass) {
                    n0 = N + 1;
                    break;
                }
            }
        }
        if (n0 > N) break;
    }

    for (int i = 0; i < spec.num_evals(); ++i)
        report.weighted_ess += spec.gammas()[i] * report.find(spec.evals()[i])->ess;
    return report;
}

BackwardResult backward_optimal(const TestSpec& spec, int horizon, Par par) {
    require_bernoulli(spec, "backward_optimal");
    if (horizon < 1) throw std::invalid_argument("backward_optimal: horizon must be >= 1");

    const int N = horizon;
    const DbcKernel kernel(spec);
    const LatticeBasis basis(spec);
    LatticePolicy policy(N);

    // V in per-sequence density scale, stored as logs; two rolling rows.
    std::vector<double> v_next(static_cast<size_t>(N) + 2, 0.0);
    std::vector<double> v_cur(static_cast<size_t>(N) + 2, 0.0);

#pragma omp parallel num_threads(par.threads) if (par.enabled())
    {
        LogLikState state(spec);

        // Horizon row: V_N = v_N, stop everywhere, decide by the risk argmin.
#pragma omp for schedule(static)
        for (int s = 0; s <= N; ++s) {
            basis.fill(N, s, state);
            const auto [v, j] = kernel.min_log_risk(state.logf_theta);
            v_next[s] = v;
            policy.set_action(N, s, static_cast<int8_t>(j));
            policy.set_forced(s, !(v <= kernel.log_weighted(state.logf_eval)));
        }

        for (int n = N - 1; n >= 1; --n) {
#pragma omp for schedule(static)
            for (int s = 0; s <= n; ++s) {
                basis.fill(n, s, state);
                const auto [v, j] = kernel.min_log_risk(state.logf_theta);
                const double w = kernel.log_weighted(state.logf_eval);
                const double cont = log_add(w, log_add(v_next[s], v_next[s + 1]));
                if (v <= cont) {
                    policy.set_action(n, s, static_cast<int8_t>(j));
                    v_cur[s] = v;
                } else {
                    policy.set_action(n, s, LatticePolicy::kContinue);
                    v_cur[s] = cont;
                }
            }
#pragma omp single
            std::swap(v_cur, v_next);
        }
    }

    // After the loop v_next holds V_1 (or V_N when N == 1).
    const double value = 1.0 + std::exp(log_add(v_next[0], v_next[1]));
    return {std::move(policy), value};
}

LatticePathPolicy::LatticePathPolicy(const LatticePolicy& policy, const TestSpec& spec)
    : policy_(policy) {
    require_bernoulli(spec, "LatticePathPolicy");
    for (double t : spec.thetas()) {
        log_theta_.push_back(std::log(t));
        log_1m_theta_.push_back(std::log1p(-t));
    }
}

Verdict LatticePathPolicy::check(const LogLikState& state) const {
    // Recover the success count from the first hypothesis log-density.
    const int n = state.n;
    if (n < 1 || n > policy_.horizon()) return {};
    const double s_real =
        (state.logf_theta[0] - n * log_1m_theta_[0]) / (log_theta_[0] - log_1m_theta_[0]);
    const int s = std::clamp(static_cast<int>(std::lround(s_real)), 0, n);
    const int8_t a = policy_.action(n, s);
    if (a < 0) return {};
    if (n == policy_.horizon() && policy_.forced(s)) return {};  // stop only via the cap
    return {true, a};
}

int LatticePathPolicy::decide_at_cap(const LogLikState& state) const {
    const int n = policy_.horizon();
    const double s_real =
        (state.logf_theta[0] - n * log_1m_theta_[0]) / (log_theta_[0] - log_1m_theta_[0]);
    const int s = std::clamp(static_cast<int>(std::lround(s_real)), 0, n);
    return policy_.action(n, s);
}

TestReport brute_force_oracle(const StopPolicy& rule, const TestSpec& spec, int horizon,
                              std::span<const double> extra_params) {
    if (horizon > 12) throw std::invalid_argument("brute_force_oracle: horizon must be <= 12");
    if (horizon < 1) throw std::invalid_argument("brute_force_oracle: horizon must be >= 1");
    require_bernoulli(spec, "brute_force_oracle");

    const std::vector<double> params = evaluation_params(spec, extra_params);
    const int P = static_cast<int>(params.size());
    const int k = spec.k();

    TestReport report;
    report.results.resize(params.size());
    for (int pi = 0; pi < P; ++pi) {
        report.results[pi].param = params[pi];
        report.results[pi].accept.assign(k, 0.0);
        report.results[pi].stop_dist.assign(horizon, 0.0);
    }

    // Depth-first walk over all binary sequences; one LogLikState per depth.
    std::vector<LogLikState> states(static_cast<size_t>(horizon) + 1, LogLikState(spec));
    std::vector<int> successes(static_cast<size_t>(horizon) + 1, 0);

    auto settle = [&](int n, int s, int accepted, bool capped) {
        for (int pi = 0; pi < P; ++pi) {
            const double p = params[pi];
            const double mass = std::exp(bernoulli_loglik(n, s, p));
            ParamResult& r = report.results[pi];
            r.accept[accepted] += mass;
            r.ess += n * mass;
            r.stop_dist[n - 1] += mass;
            if (capped) r.capped += mass;
        }
    };

    auto walk = [&](auto&& self, int n) -> void {
        for (int x = 0; x <= 1; ++x) {
            states[n + 1] = states[n];
            states[n + 1].append(spec, x);
            successes[n + 1] = successes[n] + x;
            const Verdict v = rule.check(states[n + 1]);
            if (v.stopped)
                settle(n + 1, successes[n + 1], v.accepted, false);
            else if (n + 1 == horizon)
                settle(horizon, successes[n + 1], rule.decide_at_cap(states[horizon]), true);
            else
                self(self, n + 1);
        }
    };
    walk(walk, 0);

    for (int i = 0; i < spec.num_evals(); ++i)
        report.weighted_ess += spec.gammas()[i] * report.find(spec.evals()[i])->ess;
    return report;
}

std::vector<OcEssPoint> oc_ess_curve(const LatticePolicy& policy, const TestSpec& spec,
                                     std::span<const double> grid,
                                     std::span<const int> accept_null, Par par) {
    const TestReport report = evaluate(policy, spec, grid, par);
    std::vector<OcEssPoint> out;
    out.reserve(grid.size());
    for (double theta : grid) {
        const ParamResult* r = report.find(theta);
        OcEssPoint pt;
        pt.theta = theta;
        pt.ess = r->ess;
        for (int j : accept_null) pt.oc += r->accept[j];
        out.push_back(pt);
    }
    return out;
}

}  // namespace seqtest
