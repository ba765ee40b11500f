// Command-line front end: spec validation, exact evaluation, optimal-test
// construction, calibration, simulation, Kiefer-Weiss design, and scenario
// reproduction.
//
// Exit codes: 0 success (all tolerances pass), 1 scenario tolerance failure,
// 2 usage error, 3 configuration validation error.
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seqtest/classic.hpp"
#include "seqtest/json_io.hpp"
#include "seqtest/kiefer_weiss.hpp"
#include "seqtest/montecarlo.hpp"
#include "seqtest/reference.hpp"
#include "seqtest/scenarios.hpp"

using namespace seqtest;

namespace {

struct GlobalOptions {
    std::string config;
    std::string out;
    std::string format = "json";
    int threads = 0;  // 0 = all available
    uint64_t seed = 1;

    Par par() const { return threads > 0 ? Par{threads} : Par::max(); }
};

TestSpec load_spec(const std::string& path) {
    return spec_from_json(json::parse(read_text_file(path)));
}

void emit(const GlobalOptions& g, const json& machine, const std::string& csv) {
    if (g.out.empty()) return;
    write_text_file(g.out, g.format == "csv" ? csv : machine.dump(2) + "\n");
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

void print_report(const TestReport& report, const TestSpec* spec) {
    std::printf("%-12s", "param");
    const int k = static_cast<int>(report.results.front().accept.size());
    for (int j = 0; j < k; ++j) std::printf("  accept H%-4d", j + 1);
    std::printf("  %-10s  %-8s\n", "ESS", "capped");
    for (const ParamResult& r : report.results) {
        std::printf("%-12.6g", r.param);
        for (int j = 0; j < k; ++j) std::printf("  %-11.4g", r.accept[j]);
        std::printf("  %-10.4f  %-8.3g\n", r.ess, r.capped);
    }
    std::printf("weighted ESS: %.4f", report.weighted_ess);
    if (spec && spec->model().kind == ModelKind::GroupedNormal)
        std::printf("  (%.4f observations)",
                    report.weighted_ess * spec->model().group_size);
    std::printf("\n");
    if (report.monte_carlo) std::printf("replications: %ld\n", report.reps);
}

int cmd_validate(const GlobalOptions& g) {
    const TestSpec spec = load_spec(g.config);
    std::printf("OK: %d hypotheses, %d evaluation points, model %s, horizon %s%d\n", spec.k(),
                spec.num_evals(), to_string(spec.model().kind).c_str(),
                spec.horizon().bounded ? "" : "unbounded, cap ", spec.horizon().cap);
    return 0;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& rule, const std::string& params_csv,
                 const std::string& policy_out, bool stop_dist) {
    const TestSpec spec = load_spec(g.config);
    const std::vector<double> extras = parse_csv_doubles(params_csv);

    LatticePolicy policy;
    if (rule == "dbc") {
        policy = dbc_lattice(spec, g.par());
    } else if (rule == "optimal") {
        policy = backward_optimal(spec, spec.horizon().cap, g.par()).policy;
    } else {
        throw CLI::ValidationError("--rule must be dbc or optimal");
    }
    EvalOptions opts;
    opts.want_stop_dist = stop_dist;
    const TestReport report = evaluate(policy, spec, extras, g.par(), opts);
    print_report(report, &spec);
    if (!policy_out.empty()) write_text_file(policy_out, policy_to_json(policy).dump() + "\n");
    emit(g, report_to_json(report), report_to_csv(report));
    return 0;
}

int cmd_optimal(const GlobalOptions& g, const std::string& policy_out) {
    const TestSpec spec = load_spec(g.config);
    const BackwardResult result = backward_optimal(spec, spec.horizon().cap, g.par());
    const TestReport report = evaluate(result.policy, spec, {}, g.par());
    std::printf("minimal Lagrangian: %.10g\n", result.minimal_lagrangian);
    std::printf("Lagrangian of the evaluated policy: %.10g\n", lagrangian(report, spec));
    print_report(report, &spec);
    if (!policy_out.empty())
        write_text_file(policy_out, policy_to_json(result.policy).dump() + "\n");
    json machine = report_to_json(report);
    machine["minimal_lagrangian"] = result.minimal_lagrangian;
    emit(g, machine, report_to_csv(report));
    return 0;
}

int cmd_calibrate(const GlobalOptions& g, const std::string& target_alpha,
                  const std::string& tie, double tol, int max_evals,
                  const std::string& evaluator, const std::string& rule, long reps) {
    const TestSpec templ = load_spec(g.config);
    std::vector<double> alphas = parse_csv_doubles(target_alpha);
    if (alphas.size() == 1) alphas.assign(templ.k(), alphas.front());
    if (static_cast<int>(alphas.size()) != templ.k())
        throw CLI::ValidationError("--target-alpha needs 1 or k values");

    CalibrationTarget target = CalibrationTarget::per_hypothesis(templ.k(), alphas);
    target.tolerance = tol;
    if (tie == "rows") {
        target.ties = LambdaTies::row_constant(templ.k());
    } else if (tie == "rows-sym") {
        std::vector<std::vector<int>> groups;
        for (int i = 0; i < (templ.k() + 1) / 2; ++i) {
            if (i == templ.k() - 1 - i)
                groups.push_back({i});
            else
                groups.push_back({i, templ.k() - 1 - i});
        }
        target.ties = LambdaTies::rows_tied(templ.k(), groups);
    } else if (tie == "all") {
        std::vector<std::vector<int>> groups(1);
        for (int i = 0; i < templ.k(); ++i) groups[0].push_back(i);
        target.ties = LambdaTies::rows_tied(templ.k(), groups);
    } else {
        throw CLI::ValidationError("--tie must be rows, rows-sym or all");
    }

    Evaluator ev;
    if (evaluator == "exact") {
        if (templ.model().kind != ModelKind::BernoulliIID)
            throw std::invalid_argument("exact evaluator requires the Bernoulli model");
        const int N = templ.horizon().cap;
        const Par par = g.par();
        if (rule == "optimal")
            ev = [N, par](const TestSpec& probe) {
                return evaluate(backward_optimal(probe, N, par).policy, probe, {}, par);
            };
        else
            ev = [N, par](const TestSpec& probe) { return dbc_streamed_report(probe, N, par); };
    } else if (evaluator == "mc") {
        if (rule == "optimal")
            throw std::invalid_argument("the optimal rule needs the exact evaluator");
        const Par par = g.par();
        const uint64_t seed = g.seed;
        ev = [reps, seed, par](const TestSpec& probe) {
            DbcPolicy p(probe);
            return mc_report(probe, p, {}, reps, seed, probe.horizon().cap, par);
        };
    } else {
        throw CLI::ValidationError("--evaluator must be exact or mc");
    }

    NmOptions nm;
    nm.max_evals = max_evals;
    CalibrationResult fit = calibrate(templ, target, ev, nm, 2);
    std::printf("fit %s (relative distance %.5g after %d evaluations)\n",
                fit.met ? "met tolerance" : "did NOT meet tolerance", fit.achieved_distance,
                fit.evals);
    std::printf("multipliers:");
    for (double l : fit.multipliers) std::printf(" %.6g", l);
    std::printf("\n");
    print_report(fit.report, &fit.spec);

    json machine{{"schema", 1},
                 {"spec", spec_to_json(fit.spec)},
                 {"achieved_distance", fit.achieved_distance},
                 {"met", fit.met},
                 {"evals", fit.evals},
                 {"report", report_to_json(fit.report)}};
    emit(g, machine, report_to_csv(fit.report));
    return 0;
}

int cmd_simulate(const GlobalOptions& g, long reps, int cap, double true_theta,
                 const std::string& rule, double msprt_log_threshold, bool stop_dist) {
    const TestSpec spec = load_spec(g.config);

    std::unique_ptr<StopPolicy> policy;
    if (rule == "dbc")
        policy = std::make_unique<DbcPolicy>(spec);
    else if (rule == "msprt")
        policy = std::make_unique<MsprtPolicy>(MsprtRule::uniform(spec.k(), msprt_log_threshold));
    else
        throw CLI::ValidationError("--rule must be dbc or msprt");

    SimConfig config{reps, g.seed, cap > 0 ? cap : spec.horizon().cap, true_theta,
                     policy.get(), stop_dist};
    const TestReport report = simulate(spec, config, g.par());
    const ParamResult& r = report.results.front();
    std::printf("ESS %.6g (se %.3g), capped fraction %.3g\n", r.ess, r.ess_se, r.capped);
    print_report(report, &spec);
    emit(g, report_to_json(report), report_to_csv(report));
    return 0;
}

int cmd_kw(const GlobalOptions& g, const std::string& thetas_csv, const std::string& targets_csv,
           bool symmetric, const std::string& lambda_csv, int horizon, double grid_step,
           double refine_tol, int max_rounds) {
    const std::vector<double> thetas = parse_csv_doubles(thetas_csv);
    const std::vector<double> alpha_targets = parse_csv_doubles(targets_csv);
    const int k = static_cast<int>(thetas.size());
    if (static_cast<int>(alpha_targets.size()) != k)
        throw std::invalid_argument("kw: one alpha target per hypothesis");

    CalibrationTarget target = CalibrationTarget::per_hypothesis(k, alpha_targets);
    target.tolerance = 0.02;

    KwOptions options;
    options.horizon = horizon;
    options.grid_step = grid_step;
    options.refine_tol = refine_tol;
    options.max_rounds = max_rounds;

    std::vector<double> lambda_init = parse_csv_doubles(lambda_csv);
    const size_t groups = symmetric && k >= 3 ? (k + 1) / 2 : k;
    if (lambda_init.empty()) lambda_init.assign(groups, 10.0);
    if (lambda_init.size() != groups)
        throw std::invalid_argument("kw: one initial lambda per tie group");

    const KWDesign design = kw_fixed_point(Model::bernoulli(), thetas, lambda_init, symmetric,
                                           target, options, g.par());
    std::printf("%s after %d rounds (gap %.2g, fit distance %.4g)\n",
                design.converged ? "converged" : "NOT converged", design.rounds,
                design.fixed_point_gap, design.achieved_distance);
    std::printf("worst-case ESS %.4f at theta*:", design.max_ess);
    for (double w : design.worst_points) std::printf(" %.5f", w);
    std::printf("\n");
    print_report(design.report, &design.spec);

    json machine{{"schema", 1},
                 {"spec", spec_to_json(design.spec)},
                 {"worst_points", design.worst_points},
                 {"max_ess", design.max_ess},
                 {"fixed_point_gap", design.fixed_point_gap},
                 {"converged", design.converged},
                 {"rounds", design.rounds},
                 {"report", report_to_json(design.report)}};
    emit(g, machine, report_to_csv(design.report));
    return 0;
}

int cmd_twosided(const GlobalOptions& g, int null_index, const std::string& grid_expr,
                 const std::string& rule) {
    const TestSpec spec = load_spec(g.config);
    if (spec.k() != 3) throw std::invalid_argument("twosided: three hypotheses required");

    std::vector<double> grid;
    if (!grid_expr.empty()) {
        double lo, hi, step;
        if (std::sscanf(grid_expr.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw CLI::ValidationError("--grid expects lo:hi:step");
        for (double t = lo; t <= hi + step / 2; t += step) grid.push_back(t);
    }

    LatticePolicy policy = rule == "optimal"
                               ? backward_optimal(spec, spec.horizon().cap, g.par()).policy
                               : dbc_lattice(spec, g.par());
    const TestReport report = evaluate(policy, spec, grid, g.par());
    const TwoSidedSummary summary = two_sided_wrap(report, spec, null_index - 1);

    std::printf("alpha' (size at the null): %.5g\n", summary.alpha);
    for (size_t i = 0; i < summary.beta.size(); ++i)
        std::printf("beta under H%d: %.5g\n", summary.alternative_index[i] + 1,
                    summary.beta[i]);
    json jcurve = json::array();
    if (!grid.empty()) {
        const int accept_null[] = {null_index - 1};
        const auto curve = oc_ess_curve(policy, spec, grid, accept_null, g.par());
        std::printf("%-10s %-10s %-10s\n", "theta", "OC", "ESS");
        for (const OcEssPoint& pt : curve) {
            std::printf("%-10.4g %-10.4g %-10.4f\n", pt.theta, pt.oc, pt.ess);
            jcurve.push_back({{"theta", pt.theta}, {"oc", pt.oc}, {"ess", pt.ess}});
        }
    }
    json machine{{"schema", 1},
                 {"alpha", summary.alpha},
                 {"beta", summary.beta},
                 {"curve", jcurve},
                 {"report", report_to_json(report)}};
    emit(g, machine, report_to_csv(report));
    return 0;
}

int cmd_scenario(const GlobalOptions& g, const std::string& action, const std::string& id,
                 const ScenarioOverrides& overrides) {
    if (action == "list") {
        for (const std::string& s : scenario_ids()) std::printf("%s\n", s.c_str());
        return 0;
    }
    const ScenarioResult result = run_scenario(id, overrides, g.par(), &std::cerr);

    std::printf("%-42s %14s %14s %10s  %s\n", "check", "achieved", "expected", "tolerance",
                "status");
    for (const CheckRow& c : result.checks)
        std::printf("%-42s %14.6g %14.6g %9.3g%s  %s\n", c.name.c_str(), c.achieved,
                    c.expected, c.tol, c.relative ? "r" : " ",
                    !c.gate ? "info" : c.pass ? "pass" : "FAIL");
    std::printf("scenario %s: %s\n", result.id.c_str(), result.all_pass() ? "PASS" : "FAIL");

    std::ostringstream csv;
    for (size_t i = 0; i < result.table_header.size(); ++i)
        csv << (i ? "," : "") << result.table_header[i];
    csv << "\n";
    for (const auto& row : result.table_rows) {
        for (size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << format_full(row[i]);
        csv << "\n";
    }

    json checks = json::array();
    for (const CheckRow& c : result.checks)
        checks.push_back({{"name", c.name},
                          {"achieved", c.achieved},
                          {"expected", c.expected},
                          {"tol", c.tol},
                          {"relative", c.relative},
                          {"gate", c.gate},
                          {"pass", c.pass}});
    json machine{{"schema", 1},
                 {"id", result.id},
                 {"pass", result.all_pass()},
                 {"checks", checks},
                 {"table_header", result.table_header},
                 {"table", result.table_rows}};
    emit(g, machine, csv.str());
    return result.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential multi-hypothesis testing toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "test specification JSON");
    app.add_option("--out", g.out, "write machine-readable output here");
    app.add_option("--format", g.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "worker threads (0 = all)");
    app.add_option("--seed", g.seed, "RNG seed for stochastic commands");

    auto* validate = app.add_subcommand("validate", "validate a spec file");

    auto* eva = app.add_subcommand("evaluate", "exact operating characteristics (Bernoulli)");
    std::string eva_rule = "dbc", eva_params, eva_policy_out;
    bool eva_stop_dist = false;
    eva->add_option("--rule", eva_rule, "dbc|optimal");
    eva->add_option("--params", eva_params, "extra parameter points, comma separated");
    eva->add_option("--policy-out", eva_policy_out, "write the tabulated policy JSON here");
    eva->add_flag("--stop-dist", eva_stop_dist, "include stopping-time distributions");

    auto* opt = app.add_subcommand("optimal", "optimal truncated test by backward induction");
    std::string opt_policy_out;
    opt->add_option("--policy-out", opt_policy_out, "write the optimal policy JSON here");

    auto* cal = app.add_subcommand("calibrate", "fit multipliers to error targets");
    std::string cal_alpha, cal_tie = "rows", cal_eval = "exact", cal_rule = "dbc";
    double cal_tol = 0.002;
    int cal_max_evals = 400;
    long cal_reps = 200000;
    cal->add_option("--target-alpha", cal_alpha, "target error level(s), comma separated")
        ->required();
    cal->add_option("--tie", cal_tie, "rows|rows-sym|all");
    cal->add_option("--tol", cal_tol, "relative-distance tolerance");
    cal->add_option("--max-evals", cal_max_evals, "objective evaluation budget");
    cal->add_option("--evaluator", cal_eval, "exact|mc");
    cal->add_option("--rule", cal_rule, "dbc|optimal");
    cal->add_option("--reps", cal_reps, "replications per MC probe");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo run of a rule");
    long sim_reps = 100000;
    int sim_cap = 0;
    double sim_theta = 0.0, sim_msprt_log = 4.6;
    std::string sim_rule = "dbc";
    bool sim_stop_dist = false;
    sim->add_option("--reps", sim_reps, "replications")->required();
    sim->add_option("--cap", sim_cap, "truncation cap (default: spec horizon)");
    sim->add_option("--true-theta", sim_theta, "parameter generating the data")->required();
    sim->add_option("--rule", sim_rule, "dbc|msprt");
    sim->add_option("--msprt-log-threshold", sim_msprt_log, "uniform MSPRT log threshold");
    sim->add_flag("--stop-dist", sim_stop_dist, "include the stopping-time distribution");

    auto* kw = app.add_subcommand("kw", "Kiefer-Weiss design (Bernoulli)");
    std::string kw_thetas, kw_targets, kw_lambda;
    bool kw_symmetric = false;
    int kw_horizon = 3000, kw_rounds = 8;
    double kw_grid = 0.002, kw_refine = 1e-5;
    kw->add_option("--thetas", kw_thetas, "hypothesis points, comma separated")->required();
    kw->add_option("--alpha-targets", kw_targets, "per-hypothesis error targets")->required();
    kw->add_flag("--symmetric", kw_symmetric, "tie outer multipliers, mirror eval points");
    kw->add_option("--lambda-init", kw_lambda, "initial multipliers, one per tie group");
    kw->add_option("--horizon", kw_horizon, "truncation horizon");
    kw->add_option("--grid-step", kw_grid, "ESS scan step");
    kw->add_option("--refine-tol", kw_refine, "golden-section tolerance");
    kw->add_option("--max-rounds", kw_rounds, "fixed-point iteration cap");

    auto* two = app.add_subcommand("twosided", "two-sided wrapper of a 3-hypothesis test");
    int two_null = 2;
    std::string two_grid, two_rule = "dbc";
    two->add_option("--null-index", two_null, "1-based index of the null hypothesis");
    two->add_option("--grid", two_grid, "OC/ESS curve grid lo:hi:step");
    two->add_option("--rule", two_rule, "dbc|optimal");

    auto* sce = app.add_subcommand("scenario", "reproduce a published study");
    std::string sce_action = "run", sce_id;
    ScenarioOverrides sce_ov;
    std::string sce_alphas;
    long sce_reps = 0;
    int sce_horizon = 0;
    uint64_t sce_seed = 0;
    bool sce_json = false, sce_csv = false;
    sce->add_option("action", sce_action, "run|list")->required();
    sce->add_option("id", sce_id, "scenario id (see: scenario list)");
    sce->add_option("--alpha", sce_alphas, "restrict table scenarios to these levels");
    sce->add_option("--reps", sce_reps, "override Monte Carlo replications");
    sce->add_option("--horizon", sce_horizon, "override the truncation horizon");
    sce->add_option("--scenario-seed", sce_seed, "override the pinned scenario seed");
    sce->add_flag("--json", sce_json, "shorthand for --format json");
    sce->add_flag("--csv", sce_csv, "shorthand for --format csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (sce_json) g.format = "json";
        if (sce_csv) g.format = "csv";
        if (validate->parsed()) return cmd_validate(g);
        if (eva->parsed())
            return cmd_evaluate(g, eva_rule, eva_params, eva_policy_out, eva_stop_dist);
        if (opt->parsed()) return cmd_optimal(g, opt_policy_out);
        if (cal->parsed())
            return cmd_calibrate(g, cal_alpha, cal_tie, cal_tol, cal_max_evals, cal_eval,
                                 cal_rule, cal_reps);
        if (sim->parsed())
            return cmd_simulate(g, sim_reps, sim_cap, sim_theta, sim_rule, sim_msprt_log,
                                sim_stop_dist);
        if (kw->parsed())
            return cmd_kw(g, kw_thetas, kw_targets, kw_symmetric, kw_lambda, kw_horizon,
                          kw_grid, kw_refine, kw_rounds);
        if (two->parsed()) return cmd_twosided(g, two_null, two_grid, two_rule);
        if (sce->parsed()) {
            if (sce_action == "list") return cmd_scenario(g, "list", "", {});
            if (sce_action != "run") throw CLI::ValidationError("scenario action: run|list");
            if (sce_id.empty()) throw CLI::ValidationError("scenario run needs an id");
            if (!sce_alphas.empty()) sce_ov.alphas = parse_csv_doubles(sce_alphas);
            if (sce_reps > 0) sce_ov.reps = sce_reps;
            if (sce_horizon > 0) sce_ov.horizon = sce_horizon;
            if (sce_seed > 0) sce_ov.seed = sce_seed;
            return cmd_scenario(g, "run", sce_id, sce_ov);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
