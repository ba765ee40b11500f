#include "seqtest/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "seqtest/classic.hpp"
#include "seqtest/kiefer_weiss.hpp"
#include "seqtest/lattice.hpp"
#include "seqtest/montecarlo.hpp"

namespace seqtest {

namespace {

CheckRow check(std::string name, double achieved, double expected, double tol,
               bool relative = false, bool gate = true) {
    CheckRow row{std::move(name), achieved, expected, tol, relative, gate, true};
    const double scale = relative ? std::abs(expected) : 1.0;
    row.pass = std::abs(achieved - expected) <= tol * scale;
    return row;
}

CheckRow info(std::string name, double achieved, double expected = 0.0) {
    return CheckRow{std::move(name), achieved, expected, 0.0, false, false, true};
}

void log_line(std::ostream* progress, const std::string& line) {
    if (progress) (*progress) << line << std::endl;
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

// Calibration probes use the streamed evaluator (its truncation slop is ten
// orders of magnitude under the fit tolerance); reported numbers always come
// from an exact re-evaluation of the fitted spec.
Evaluator dbc_probe_evaluator(int N, Par par) {
    return [N, par](const TestSpec& probe) { return dbc_streamed_report(probe, N, par); };
}

Evaluator optimal_evaluator(int N, Par par) {
    return [N, par](const TestSpec& probe) {
        return evaluate(backward_optimal(probe, N, par).policy, probe, {}, par);
    };
}

Matrix row_constant_lambdas(std::span<const double> rows) {
    const int k = static_cast<int>(rows.size());
    Matrix m(k, k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j) m(i, j) = rows[i];
    return m;
}

// ---------------------------------------------------------------------------
// Tables 1 and 2: three Bernoulli hypotheses, row-constant multipliers fitted
// to alpha_i = alpha, weighted ESS compared for the optimal test, its
// closed-form variant, and (Table 2) the matrix SPRT.
// ---------------------------------------------------------------------------

struct BernoulliFitOutcome {
    CalibrationResult fit;
    double weighted_ess = 0.0;
};

// The achieved errors are monotone in a joint scaling of the loss matrix, so
// a doubling search puts the starting point on the right staircase plateau
// before the simplex search begins.  Without it the search can start where
// the rule degenerates (stop at n = 1) and the objective is flat.
TestSpec bracket_lambda_scale(const TestSpec& templ, const Evaluator& ev, double level,
                              const std::vector<ErrorTarget>& targets) {
    TestSpec spec = templ;
    for (int it = 0; it < 26; ++it) {
        double worst = 0.0;
        for (const ErrorTarget& t : targets)
            worst = std::max(worst, achieved_error(ev(spec), spec, t));
        double factor = 0.0;
        if (worst > 1.7 * level)
            factor = 2.2;
        else if (worst < 0.55 * level)
            factor = 1.0 / 2.2;
        else
            break;
        Matrix scaled = spec.lambdas();
        for (double& v : scaled.data()) v *= factor;
        try {
            spec = spec.with_lambdas(scaled);
        } catch (const std::invalid_argument&) {
            break;  // scaling down hit the non-triviality floor
        }
    }
    return spec;
}

BernoulliFitOutcome fit_bernoulli(const TestSpec& templ, double alpha, bool optimal, Par par,
                                  std::ostream* progress, const char* label) {
    const int N = templ.horizon().cap;
    std::vector<double> alphas(templ.k(), alpha);
    CalibrationTarget target = CalibrationTarget::per_hypothesis(templ.k(), alphas);
    target.tolerance = 0.005;
    NmOptions nm;
    nm.max_evals = 220;
    nm.target = 0.0015;
    const Evaluator ev = optimal ? optimal_evaluator(N, par) : dbc_probe_evaluator(N, par);
    const TestSpec start = bracket_lambda_scale(templ, ev, alpha, target.targets);
    CalibrationResult fit = calibrate(start, target, ev, nm, 3);

    // Exact re-evaluation of the winner.
    if (!optimal) {
        fit.report = evaluate(dbc_lattice(fit.spec, par, N), fit.spec, {}, par);
        fit.achieved_distance = relative_distance(fit.report, fit.spec, target.targets);
    }
    log_line(progress, std::string("  ") + label + " alpha=" + fmt(alpha) +
                           ": dist=" + fmt(fit.achieved_distance, 3) +
                           " wESS=" + fmt(fit.report.weighted_ess, 6) + " evals=" +
                           std::to_string(fit.evals));
    return {fit, fit.report.weighted_ess};
}

struct MsprtFitOutcome {
    MsprtRule rule;
    TestReport report;
    double distance = 0.0;
    double weighted_ess = 0.0;
};

MsprtFitOutcome fit_msprt(const TestSpec& spec, double alpha, Par par, std::ostream* progress) {
    const int N = spec.horizon().cap;
    const int k = spec.k();

    std::optional<MsprtFitOutcome> best;
    auto objective = [&](std::span<const double> x) {
        const MsprtRule rule = MsprtRule::row_constant(x);
        const LatticePolicy policy = tabulate_policy(spec, MsprtPolicy(rule), N, par);
        const TestReport report = evaluate(policy, spec, {}, par);
        double dist = 0.0;
        const std::vector<double> ai = report.alpha_i(spec);
        for (double a : ai) dist = std::max(dist, std::abs(a - alpha) / alpha);
        if (!best || dist < best->distance)
            best = MsprtFitOutcome{rule, report, dist, report.weighted_ess};
        return dist;
    };

    std::vector<double> x0(k, std::log((k - 1) / alpha));
    // Additive bracketing: achieved errors are monotone in a common shift of
    // the log thresholds.
    for (int it = 0; it < 30; ++it) {
        const MsprtRule rule = MsprtRule::row_constant(x0);
        const TestReport rep =
            evaluate(tabulate_policy(spec, MsprtPolicy(rule), N, par), spec, {}, par);
        const std::vector<double> ai = rep.alpha_i(spec);
        const double worst = *std::max_element(ai.begin(), ai.end());
        if (worst > 1.7 * alpha)
            for (double& c : x0) c += 0.7;
        else if (worst < 0.55 * alpha)
            for (double& c : x0) c -= 0.7;
        else
            break;
    }
    NmOptions nm;
    nm.max_evals = 200;
    nm.target = 0.0015;
    nm.init_step.assign(k, 0.35);
    NmResult r = nelder_mead(objective, x0, nm);
    if (r.value > 0.005) {
        nm.init_step.assign(k, 0.08);
        r = nelder_mead(objective, r.x, nm);
    }
    // Same staircase polish as the lambda calibration.
    std::vector<double> x = r.x;
    for (int sweep = 0; sweep < 3 && best->distance > nm.target; ++sweep) {
        bool improved = false;
        for (int gi = 0; gi < k && best->distance > nm.target; ++gi) {
            for (double step : {0.02, -0.02, 0.006, -0.006, 0.0015, -0.0015}) {
                std::vector<double> probe = x;
                probe[gi] += step;
                const double before = best->distance;
                objective(probe);
                if (best->distance < before) {
                    x = probe;
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    log_line(progress, "  msprt alpha=" + fmt(alpha) + ": dist=" + fmt(best->distance, 3) +
                           " wESS=" + fmt(best->weighted_ess, 6));
    return *best;
}

ScenarioResult run_table(int table_number, const ScenarioOverrides& ov, Par par,
                         std::ostream* progress) {
    // Column values as published; Table 1 carries eight alpha levels, the
    // clinical-trial variant (Table 2) four plus the matrix-SPRT row.
    const std::map<double, std::array<double, 3>> kTable1 = {
        {0.1, {121.79, 122.63, 99.32}},   {0.05, {168.73, 169.58, 99.50}},
        {0.025, {211.73, 212.46, 99.65}}, {0.01, {264.46, 264.99, 99.80}},
        {0.005, {302.10, 302.69, 99.81}}, {0.002, {350.40, 350.96, 99.84}},
        {0.001, {386.22, 386.81, 99.85}}, {0.0005, {421.68, 422.18, 99.88}}};
    const std::map<double, std::array<double, 3>> kTable2 = {{0.1, {22.93, 23.49, 27.04}},
                                                             {0.05, {33.35, 33.59, 38.02}},
                                                             {0.01, {54.42, 54.49, 58.82}},
                                                             {0.001, {81.37, 81.48, 85.74}}};

    const bool t1 = table_number == 1;
    const int N = ov.horizon.value_or(3000);
    const std::vector<double> thetas = t1 ? std::vector<double>{0.3, 0.4, 0.5}
                                          : std::vector<double>{0.1, 0.3, 0.5};
    const std::vector<double> gammas = t1 ? std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}
                                          : std::vector<double>{0.1, 0.1, 0.8};
    const std::vector<double> alphas =
        ov.alphas.value_or(t1 ? std::vector<double>{0.1, 0.05, 0.01, 0.0005}
                              : std::vector<double>{0.1, 0.05, 0.01, 0.001});

    ScenarioResult result;
    result.id = t1 ? "table1" : "table2";
    result.table_header = t1 ? std::vector<std::string>{"alpha", "bayes_ess", "dbc_ess",
                                                        "efficiency"}
                             : std::vector<std::string>{"alpha", "bayes_ess", "dbc_ess",
                                                        "msprt_ess", "dbc_efficiency",
                                                        "msprt_efficiency"};

    // Warm starts: the fitted multipliers for one level, scaled by the ratio
    // of levels, are a good opening simplex for the next.
    std::vector<double> warm_dbc, warm_bayes;
    double prev_alpha = 0.0;

    for (double alpha : alphas) {
        const auto& expect = t1 ? kTable1 : kTable2;
        const auto it = expect.find(alpha);
        if (it == expect.end())
            throw std::invalid_argument(result.id + ": no published column for alpha = " +
                                        fmt(alpha));

        auto start_rows = [&](const std::vector<double>& warm) {
            std::vector<double> rows(3, std::max(1.5, 1.0 / alpha));
            if (!warm.empty())
                for (int i = 0; i < 3; ++i)
                    rows[i] = std::max(1.0 + 1e-3, warm[i] * prev_alpha / alpha);
            return rows;
        };
        auto make_template = [&](const std::vector<double>& rows) {
            return TestSpec(Model::bernoulli(), thetas, thetas, gammas,
                            row_constant_lambdas(rows), Horizon::finite(N));
        };

        BernoulliFitOutcome dbc =
            fit_bernoulli(make_template(start_rows(warm_dbc)), alpha, false, par, progress,
                          "dbc");
        BernoulliFitOutcome bayes =
            fit_bernoulli(make_template(start_rows(warm_bayes)), alpha, true, par, progress,
                          "bayes");
        warm_dbc = dbc.fit.multipliers;
        warm_bayes = bayes.fit.multipliers;
        prev_alpha = alpha;
        const double efficiency = 100.0 * bayes.weighted_ess / dbc.weighted_ess;

        // The fit-distance requirement (<= 0.005) is part of the Table 1
        // reproduction; for Table 2 only the ESS comparisons are binding.
        const std::string tag = "alpha=" + fmt(alpha);
        result.checks.push_back(
            check(tag + " dbc fit distance", dbc.fit.achieved_distance, 0.0, 0.005, false, t1));
        result.checks.push_back(check(tag + " bayes fit distance",
                                      bayes.fit.achieved_distance, 0.0, 0.005, false, t1));
        if (t1) {
            result.checks.push_back(
                check(tag + " bayes weighted ESS", bayes.weighted_ess, it->second[0], 0.005, true));
            result.checks.push_back(
                check(tag + " dbc weighted ESS", dbc.weighted_ess, it->second[1], 0.005, true));
            result.checks.push_back(
                check(tag + " efficiency (pp)", efficiency, it->second[2], 0.1));
            result.table_rows.push_back({alpha, bayes.weighted_ess, dbc.weighted_ess, efficiency});
        } else {
            MsprtFitOutcome msprt =
                fit_msprt(make_template(start_rows({})), alpha, par, progress);
            const double msprt_eff = 100.0 * bayes.weighted_ess / msprt.weighted_ess;
            result.checks.push_back(
                check(tag + " bayes weighted ESS", bayes.weighted_ess, it->second[0], 0.005, true));
            result.checks.push_back(
                check(tag + " dbc weighted ESS", dbc.weighted_ess, it->second[1], 0.005, true));
            result.checks.push_back(
                check(tag + " msprt weighted ESS", msprt.weighted_ess, it->second[2], 0.01, true));
            result.table_rows.push_back({alpha, bayes.weighted_ess, dbc.weighted_ess,
                                         msprt.weighted_ess, efficiency, msprt_eff});
        }
        result.fitted_specs.emplace_back("dbc@" + fmt(alpha), dbc.fit.spec);
        result.fitted_specs.emplace_back("bayes@" + fmt(alpha), bayes.fit.spec);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Table 3: simple null against a two-sided alternative via an auxiliary
// three-hypothesis test; OC and ESS compared over a parameter grid.
// ---------------------------------------------------------------------------

ScenarioResult run_table3(const ScenarioOverrides& ov, Par par, std::ostream* progress) {
    const int N = ov.horizon.value_or(3000);
    const std::vector<double> thetas = {0.2, 0.5, 0.8};
    const std::vector<double> gammas = {0.25, 0.5, 0.25};
    const int null_index = 1;

    const std::vector<double> grid = {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90};
    const std::vector<double> oc_opt = {0.950, 0.921, 0.816, 0.615, 0.361,
                                        0.157, 0.050, 0.011, 0.001};
    const std::vector<double> ess_opt = {18.44, 19.42, 21.93, 24.36, 24.31,
                                         21.33, 17.36, 13.90, 11.31};
    const std::vector<double> oc_dbc = {0.944, 0.914, 0.813, 0.622, 0.378,
                                        0.172, 0.056, 0.012, 0.001};
    const std::vector<double> ess_dbc = {17.64, 18.41, 20.39, 22.34, 22.42,
                                         20.06, 16.57, 13.38, 10.99};

    // Aggregated two-sided error constraints: size under the null, and the
    // miss probability under each alternative.
    CalibrationTarget target;
    target.targets = {{{{1, 0}, {1, 2}}, 0.05},
                      {{{0, 1}, {0, 2}}, 0.05},
                      {{{2, 1}, {2, 0}}, 0.05}};
    target.tolerance = 0.005;
    target.ties = LambdaTies::rows_tied(3, {{0, 2}, {1}});

    TestSpec templ(Model::bernoulli(), thetas, thetas, gammas,
                   row_constant_lambdas(std::vector<double>{20.0, 20.0, 20.0}),
                   Horizon::finite(N));

    NmOptions nm;
    nm.max_evals = 220;
    nm.target = 0.0015;

    ScenarioResult result;
    result.id = "table3";
    result.table_header = {"theta", "oc_optimal", "ess_optimal", "oc_dbc", "ess_dbc"};

    const Evaluator ev_dbc = dbc_probe_evaluator(N, par);
    const Evaluator ev_opt = optimal_evaluator(N, par);
    CalibrationResult fit_dbc =
        calibrate(bracket_lambda_scale(templ, ev_dbc, 0.05, target.targets), target, ev_dbc,
                  nm, 3);
    fit_dbc.report = evaluate(dbc_lattice(fit_dbc.spec, par, N), fit_dbc.spec, {}, par);
    fit_dbc.achieved_distance = relative_distance(fit_dbc.report, fit_dbc.spec, target.targets);
    log_line(progress, "  dbc fit: dist=" + fmt(fit_dbc.achieved_distance, 3));
    CalibrationResult fit_opt =
        calibrate(bracket_lambda_scale(templ, ev_opt, 0.05, target.targets), target, ev_opt,
                  nm, 3);
    log_line(progress, "  optimal fit: dist=" + fmt(fit_opt.achieved_distance, 3));

    const LatticePolicy pol_dbc = dbc_lattice(fit_dbc.spec, par, N);
    const LatticePolicy pol_opt = backward_optimal(fit_opt.spec, N, par).policy;
    const int accept_null[] = {null_index};
    const auto curve_dbc = oc_ess_curve(pol_dbc, fit_dbc.spec, grid, accept_null, par);
    const auto curve_opt = oc_ess_curve(pol_opt, fit_opt.spec, grid, accept_null, par);

    result.checks.push_back(
        check("dbc fit distance", fit_dbc.achieved_distance, 0.0, 0.005, false, false));
    result.checks.push_back(
        check("optimal fit distance", fit_opt.achieved_distance, 0.0, 0.005, false, false));

    for (size_t i = 0; i < grid.size(); ++i) {
        const std::string tag = "theta=" + fmt(grid[i]);
        result.checks.push_back(check(tag + " optimal OC", curve_opt[i].oc, oc_opt[i], 0.01));
        result.checks.push_back(
            check(tag + " optimal ESS", curve_opt[i].ess, ess_opt[i], 0.02, true));
        result.checks.push_back(check(tag + " dbc OC", curve_dbc[i].oc, oc_dbc[i], 0.01));
        result.checks.push_back(check(tag + " dbc ESS", curve_dbc[i].ess, ess_dbc[i], 0.02, true));
        result.table_rows.push_back(
            {grid[i], curve_opt[i].oc, curve_opt[i].ess, curve_dbc[i].oc, curve_dbc[i].ess});
    }

    const TwoSidedSummary side_dbc = two_sided_wrap(fit_dbc.report, fit_dbc.spec, null_index);
    const TwoSidedSummary side_opt = two_sided_wrap(fit_opt.report, fit_opt.spec, null_index);
    result.checks.push_back(info("dbc achieved alpha'", side_dbc.alpha));
    result.checks.push_back(info("optimal achieved alpha'", side_opt.alpha));

    result.fitted_specs.emplace_back("dbc", fit_dbc.spec);
    result.fitted_specs.emplace_back("optimal", fit_opt.spec);
    return result;
}

// ---------------------------------------------------------------------------
// Example II: group-sequential normal sampling plan, closed-form rule
// calibrated by common-random-number Monte Carlo.
// ---------------------------------------------------------------------------

ScenarioResult run_example2(const ScenarioOverrides& ov, Par par, std::ostream* progress) {
    constexpr double kDelta = 0.1;
    constexpr int kGroupSize = 40;
    constexpr int kMaxGroups = 10;
    constexpr double kPublishedDbcEss = 149.75;
    constexpr double kPublishedOptimalEss = 149.0;
    constexpr double kFixedSampleSize = 270.55;

    const long reps_cal = ov.reps.value_or(400000);
    const long reps_final = ov.reps.value_or(1000000);
    const uint64_t seed = ov.seed.value_or(11);

    std::vector<double> evals;
    std::vector<double> gammas;
    for (int i = 1; i <= 9; ++i) {
        evals.push_back(kDelta * (i - 5) / 2.0);
        gammas.push_back(i == 5 ? 0.2 : 0.1);
    }
    const std::vector<double> thetas = {-kDelta, kDelta};

    TestSpec templ(Model::grouped_normal(kGroupSize), thetas, evals, gammas,
                   row_constant_lambdas(std::vector<double>{20.0, 20.0}),
                   Horizon::finite(kMaxGroups));

    CalibrationTarget target;
    target.targets = {{{{0, 1}}, 0.05}, {{{1, 0}}, 0.05}};
    target.tolerance = 0.02;  // relative: about 3 SE of the calibration run
    target.ties = LambdaTies::rows_tied(2, {{0, 1}});

    // Calibration probes simulate only under the hypotheses (common random
    // numbers make the objective deterministic for the fixed seed).
    Evaluator mc_alpha = [&](const TestSpec& probe) {
        TestReport report;
        report.monte_carlo = true;
        report.reps = reps_cal;
        DbcPolicy rule(probe);
        for (double t : probe.thetas()) {
            SimConfig config{reps_cal, seed, kMaxGroups, t, &rule, false};
            report.results.push_back(simulate(probe, config, par).results.front());
        }
        return report;
    };

    NmOptions nm;
    nm.max_evals = 80;
    nm.target = 0.01;
    CalibrationResult fit = calibrate(templ, target, mc_alpha, nm, 2);
    log_line(progress, "  lambda=" + fmt(fit.multipliers[0], 6) +
                           " dist=" + fmt(fit.achieved_distance, 3));

    DbcPolicy rule(fit.spec);
    const TestReport report = mc_report(fit.spec, rule, {}, reps_final, seed + 1, kMaxGroups, par);
    const std::vector<double> ai = report.alpha_i(fit.spec);
    const double ess_obs = kGroupSize * report.weighted_ess;
    const double efficiency = 100.0 * kPublishedOptimalEss / ess_obs;

    // Weighted ESS standard error in observations, for the log line.
    double wse = 0.0;
    for (int i = 0; i < fit.spec.num_evals(); ++i) {
        const ParamResult* r = report.find(fit.spec.evals()[i]);
        wse += fit.spec.gammas()[i] * fit.spec.gammas()[i] * r->ess_se * r->ess_se;
    }
    wse = kGroupSize * std::sqrt(wse);
    log_line(progress, "  weighted ESS (obs) = " + fmt(ess_obs, 6) + " +- " + fmt(wse, 3));

    ScenarioResult result;
    result.id = "example2_f4";
    result.table_header = {"weighted_ess_obs", "alpha1", "alpha2", "efficiency_vs_optimal"};
    result.table_rows.push_back({ess_obs, ai[0], ai[1], efficiency});

    const double se_cal = std::sqrt(0.05 * 0.95 / static_cast<double>(reps_cal));
    for (int i = 0; i < 2; ++i) {
        const ParamResult* r = report.find(fit.spec.thetas()[i]);
        const double se_final = r->accept_se[1 - i];
        const double tol = std::max(4.0 * (se_cal + se_final), 2e-3);
        result.checks.push_back(
            check("alpha_" + std::to_string(i + 1), ai[i], 0.05, tol));
    }
    result.checks.push_back(check("weighted ESS (observations)", ess_obs, kPublishedDbcEss,
                                  0.01, true));
    result.checks.push_back(info("efficiency vs optimal 149.0 (%)", efficiency));
    result.checks.push_back(info("fixed sample size (cited)", kFixedSampleSize));
    result.checks.push_back(info("max/FSS ratio t (cited)", 400.0 / kFixedSampleSize));

    result.fitted_specs.emplace_back("dbc", fit.spec);
    return result;
}

// ---------------------------------------------------------------------------
// Example IV: normal observations with a linear trend in the mean; the
// closed-form rule against the matrix SPRT, by seeded Monte Carlo.
// ---------------------------------------------------------------------------

ScenarioResult run_example4(const ScenarioOverrides& ov, Par par, std::ostream* progress) {
    const long reps = ov.reps.value_or(1000000);
    const uint64_t seed = ov.seed.value_or(20250810);
    const int cap = ov.horizon.value_or(3000);

    const std::vector<double> thetas = {0.0, -0.2, 0.1};
    const std::vector<double> gammas = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    TestSpec spec(Model::normal_trend(), thetas, thetas, gammas,
                  row_constant_lambdas(std::vector<double>{35.0, 18.0, 33.0}),
                  Horizon::finite(cap));

    const std::vector<double> eval_points = {-0.2, -0.1, 0.0, 0.05, 0.1};
    const std::vector<double> extras = {-0.1, 0.05};

    struct MatrixRef {
        int i, j;
        double value, se;
    };
    const std::vector<double> dbc_ess = {8.94, 13.35, 14.36, 19.75, 14.06};
    const std::vector<double> dbc_ess_se = {0.0018, 0.0033, 0.0025, 0.0057, 0.0028};
    const std::vector<MatrixRef> dbc_matrix = {{0, 1, 3.4e-3, 5.8e-5}, {0, 2, 4.2e-3, 6.5e-5},
                                               {1, 0, 6.7e-4, 2.7e-5}, {1, 2, 0.0, 0.0},
                                               {2, 0, 4.0e-3, 6.3e-5}, {2, 1, 2.6e-5, 4.0e-6}};
    const std::vector<double> msprt_ess = {8.91, 13.51, 14.34, 19.69, 14.02};
    const std::vector<double> msprt_ess_se = {0.0018, 0.0036, 0.0025, 0.0057, 0.0028};
    const std::vector<MatrixRef> msprt_matrix = {{0, 1, 3.6e-3, 0.0}, {0, 2, 4.4e-3, 0.0},
                                                 {1, 0, 6.5e-4, 0.0}, {1, 2, 1.1e-11, 0.0},
                                                 {2, 0, 4.0e-3, 0.0}, {2, 1, 2.2e-5, 0.0}};

    log_line(progress, "  simulating dbc, " + std::to_string(reps) + " reps x 5 parameters");
    DbcPolicy dbc_rule(spec);
    const TestReport dbc = mc_report(spec, dbc_rule, extras, reps, seed, cap, par);

    log_line(progress, "  simulating msprt (log thresholds 4.6)");
    MsprtPolicy msprt_rule(MsprtRule::uniform(3, 4.6));
    const TestReport msprt = mc_report(spec, msprt_rule, extras, reps, seed, cap, par);

    ScenarioResult result;
    result.id = "example4_trend";
    result.table_header = {"theta", "dbc_ess", "dbc_se", "msprt_ess", "msprt_se"};

    auto ess_checks = [&](const char* label, const TestReport& report,
                          const std::vector<double>& ref, const std::vector<double>& ref_se) {
        for (size_t i = 0; i < eval_points.size(); ++i) {
            const ParamResult* r = report.find(eval_points[i]);
            const double tol = 3.0 * std::max(ref_se[i], r->ess_se);
            result.checks.push_back(check(std::string(label) + " ESS theta=" +
                                              fmt(eval_points[i]),
                                          r->ess, ref[i], tol));
        }
    };
    auto matrix_checks = [&](const char* label, const TestReport& report,
                             const std::vector<MatrixRef>& refs) {
        const Matrix alpha = report.alpha_matrix(spec);
        for (const MatrixRef& m : refs) {
            const ParamResult* r = report.find(thetas[m.i]);
            const double binom_se =
                std::sqrt(m.value * (1.0 - m.value) / static_cast<double>(reps));
            const double tol =
                3.0 * std::max({m.se, r->accept_se[m.j], binom_se});
            result.checks.push_back(check(std::string(label) + " alpha(" +
                                              std::to_string(m.i + 1) + "," +
                                              std::to_string(m.j + 1) + ")",
                                          alpha(m.i, m.j), m.value, tol));
        }
    };

    ess_checks("dbc", dbc, dbc_ess, dbc_ess_se);
    matrix_checks("dbc", dbc, dbc_matrix);
    ess_checks("msprt", msprt, msprt_ess, msprt_ess_se);
    matrix_checks("msprt", msprt, msprt_matrix);

    for (size_t i = 0; i < eval_points.size(); ++i) {
        const ParamResult* rd = dbc.find(eval_points[i]);
        const ParamResult* rm = msprt.find(eval_points[i]);
        result.table_rows.push_back(
            {eval_points[i], rd->ess, rd->ess_se, rm->ess, rm->ess_se});
    }
    result.checks.push_back(info("dbc capped fraction (theta=0.05)",
                                 dbc.find(0.05)->capped));
    return result;
}

// ---------------------------------------------------------------------------
// Example V: the multi-hypothesis Kiefer-Weiss setting; the published design
// is checked directly (no fitting), both for the closed-form rule and for
// the backward-induction benchmark.
// ---------------------------------------------------------------------------

ScenarioResult run_example5(const ScenarioOverrides& ov, Par par, std::ostream* progress) {
    const int N = ov.horizon.value_or(3000);
    const std::vector<double> thetas = {0.3, 0.5, 0.7};
    const std::vector<double> evals = {0.4026, 0.5974};
    const std::vector<double> gammas = {0.5, 0.5};

    TestSpec dbc_spec(Model::bernoulli(), thetas, evals, gammas,
                      row_constant_lambdas(std::vector<double>{6.582, 5.964, 6.582}),
                      Horizon::finite(N));
    TestSpec kw_spec(Model::bernoulli(), thetas, evals, gammas,
                     row_constant_lambdas(std::vector<double>{200.0, 200.0, 200.0}),
                     Horizon::finite(N));

    ScenarioResult result;
    result.id = "example5_kw";
    result.table_header = {"vartheta1", "vartheta2", "dbc_max_ess", "optimal_max_ess"};

    log_line(progress, "  evaluating published closed-form design");
    const LatticePolicy dbc_policy = dbc_lattice(dbc_spec, par, N);
    const TestReport dbc_report = evaluate(dbc_policy, dbc_spec, {}, par);
    const std::vector<double> ai = dbc_report.alpha_i(dbc_spec);

    result.checks.push_back(check("dbc alpha_1", ai[0], 0.0376, 5e-4));
    result.checks.push_back(check("dbc alpha_2", ai[1], 0.0706, 5e-4));
    result.checks.push_back(check("dbc alpha_3", ai[2], 0.0376, 5e-4));

    log_line(progress, "  locating the worst-case ESS of the closed-form design");
    const std::vector<EssMax> dbc_max = ess_argmax(dbc_policy, dbc_spec, 0.3, 0.7, 0.002,
                                                   1e-5, par);
    double dbc_peak = 0.0, nearest = 1.0;
    for (const EssMax& m : dbc_max) {
        dbc_peak = std::max(dbc_peak, m.ess);
        nearest = std::min(nearest, std::abs(m.theta - 0.4026));
    }
    result.checks.push_back(check("dbc max ESS", dbc_peak, 56.01, 0.05));
    result.checks.push_back(check("dbc argmax distance to 0.4026", nearest, 0.0, 5e-4));
    result.checks.push_back(
        check("dbc number of worst points", static_cast<double>(dbc_max.size()), 2.0, 0.5));
    if (dbc_max.size() == 2)
        result.checks.push_back(check("dbc worst points symmetric",
                                      dbc_max.front().theta + dbc_max.back().theta, 1.0, 2e-4));

    log_line(progress, "  evaluating the Kiefer-Weiss benchmark (lambda_i = 200)");
    const BackwardResult kw = backward_optimal(kw_spec, N, par);
    const std::vector<EssMax> kw_max = ess_argmax(kw.policy, kw_spec, 0.3, 0.7, 0.002, 1e-5,
                                                  par);
    double kw_peak = 0.0;
    for (const EssMax& m : kw_max) kw_peak = std::max(kw_peak, m.ess);
    result.checks.push_back(check("optimal max ESS", kw_peak, 56.2, 0.1));

    const TestReport kw_report = evaluate(kw.policy, kw_spec, {}, par);
    const std::vector<double> kw_ai = kw_report.alpha_i(kw_spec);
    result.checks.push_back(info("optimal achieved alpha_1", kw_ai[0], 0.037));
    result.checks.push_back(info("optimal achieved alpha_2", kw_ai[1], 0.07));
    result.checks.push_back(info("optimal achieved alpha_3", kw_ai[2], 0.037));

    result.table_rows.push_back({dbc_max.empty() ? 0.0 : dbc_max.front().theta,
                                 dbc_max.size() < 2 ? 0.0 : dbc_max.back().theta, dbc_peak,
                                 kw_peak});
    result.fitted_specs.emplace_back("dbc", dbc_spec);
    result.fitted_specs.emplace_back("kw", kw_spec);
    return result;
}

}  // namespace

std::vector<std::string> scenario_ids() {
    return {"table1", "table2", "table3", "example2_f4", "example4_trend", "example5_kw"};
}

ScenarioResult run_scenario(const std::string& id, const ScenarioOverrides& overrides, Par par,
                            std::ostream* progress) {
    log_line(progress, "scenario " + id);
    if (id == "table1") return run_table(1, overrides, par, progress);
    if (id == "table2") return run_table(2, overrides, par, progress);
    if (id == "table3") return run_table3(overrides, par, progress);
    if (id == "example2_f4") return run_example2(overrides, par, progress);
    if (id == "example4_trend") return run_example4(overrides, par, progress);
    if (id == "example5_kw") return run_example5(overrides, par, progress);
    throw std::invalid_argument("unknown scenario id: " + id);
}

}  // namespace seqtest
