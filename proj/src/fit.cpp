#include "seqtest/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqtest {

double relative_distance(std::span<const double> achieved, std::span<const double> targets) {
    if (achieved.size() != targets.size())
        throw std::invalid_argument("relative_distance: shape mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < achieved.size(); ++i) {
        if (!(targets[i] > 0.0))
            throw std::invalid_argument("relative_distance: targets must be positive");
        worst = std::max(worst, std::abs(achieved[i] - targets[i]) / targets[i]);
    }
    return worst;
}

double achieved_error(const TestReport& report, const TestSpec& spec, const ErrorTarget& t) {
    const Matrix alpha = report.alpha_matrix(spec);
    double acc = 0.0;
    for (auto [i, j] : t.entries) acc += alpha(i, j);
    return acc;
}

double relative_distance(const TestReport& report, const TestSpec& spec,
                         std::span<const ErrorTarget> targets) {
    double worst = 0.0;
    for (const ErrorTarget& t : targets) {
        const double a = achieved_error(report, spec, t);
        worst = std::max(worst, std::abs(a - t.target) / t.target);
    }
    return worst;
}

LambdaTies LambdaTies::row_constant(int k) {
    LambdaTies ties;
    for (int i = 0; i < k; ++i) {
        std::vector<std::pair<int, int>> group;
        for (int j = 0; j < k; ++j)
            if (j != i) group.emplace_back(i, j);
        ties.groups.push_back(std::move(group));
    }
    return ties;
}

LambdaTies LambdaTies::rows_tied(int k, const std::vector<std::vector<int>>& row_groups) {
    LambdaTies ties;
    for (const auto& rows : row_groups) {
        std::vector<std::pair<int, int>> group;
        for (int i : rows)
            for (int j = 0; j < k; ++j)
                if (j != i) group.emplace_back(i, j);
        ties.groups.push_back(std::move(group));
    }
    return ties;
}

Matrix LambdaTies::apply(const Matrix& base, std::span<const double> values) const {
    if (values.size() != groups.size())
        throw std::invalid_argument("LambdaTies: value count must match group count");
    Matrix out = base;
    for (size_t g = 0; g < groups.size(); ++g)
        for (auto [i, j] : groups[g]) out(i, j) = values[g];
    return out;
}

CalibrationTarget CalibrationTarget::per_hypothesis(int k, std::span<const double> alphas) {
    if (static_cast<int>(alphas.size()) != k)
        throw std::invalid_argument("CalibrationTarget: one alpha per hypothesis");
    CalibrationTarget t;
    for (int i = 0; i < k; ++i) {
        ErrorTarget e;
        for (int j = 0; j < k; ++j)
            if (j != i) e.entries.emplace_back(i, j);
        e.target = alphas[i];
        t.targets.push_back(std::move(e));
    }
    t.ties = LambdaTies::row_constant(k);
    return t;
}

NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0, const NmOptions& opts) {
    const int d = static_cast<int>(x0.size());
    if (d < 1) throw std::invalid_argument("nelder_mead: empty starting point");

    const double rho = 1.0, chi = 2.0, psi = 0.5, sigma = 0.5;

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    std::vector<std::vector<double>> simplex;
    std::vector<double> fv;
    simplex.emplace_back(x0.begin(), x0.end());
    fv.push_back(eval(simplex[0]));
    if (!std::isfinite(fv[0]))
        throw std::invalid_argument("nelder_mead: objective not finite at the starting point");

    for (int i = 0; i < d; ++i) {
        std::vector<double> v(x0.begin(), x0.end());
        double step = i < static_cast<int>(opts.init_step.size()) ? opts.init_step[i] : 0.0;
        if (step == 0.0) step = v[i] != 0.0 ? 0.05 * std::abs(v[i]) : 0.00025;
        v[i] += step;
        simplex.push_back(std::move(v));
        fv.push_back(eval(simplex.back()));
    }

    auto order = [&]() {
        std::vector<int> idx(simplex.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (int i : idx) {
            s2.push_back(std::move(simplex[i]));
            f2.push_back(fv[i]);
        }
        simplex = std::move(s2);
        fv = std::move(f2);
    };
    order();

    auto diameter = [&]() {
        double dia = 0.0;
        for (size_t v = 1; v < simplex.size(); ++v)
            for (int i = 0; i < d; ++i)
                dia = std::max(dia, std::abs(simplex[v][i] - simplex[0][i]));
        return dia;
    };

    while (evals < opts.max_evals) {
        if (fv[0] <= opts.target)
            return {simplex[0], fv[0], evals, true};
        // Both the simplex and the value spread must be small (a symmetric
        // straddle of a minimum has zero value spread at a large diameter).
        if (diameter() < opts.xtol && fv[d] - fv[0] <= opts.ftol) break;

        std::vector<double> centroid(d, 0.0);
        for (int v = 0; v < d; ++v)
            for (int i = 0; i < d; ++i) centroid[i] += simplex[v][i] / d;

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (int i = 0; i < d; ++i)
                x[i] = centroid[i] + coef * (centroid[i] - simplex[d][i]);
            return x;
        };

        const std::vector<double> xr = blend(rho);
        const double fr = eval(xr);

        if (fr < fv[0]) {
            const std::vector<double> xe = blend(rho * chi);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[d] = xe;
                fv[d] = fe;
            } else {
                simplex[d] = xr;
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            simplex[d] = xr;
            fv[d] = fr;
        } else {
            bool shrink = false;
            if (fr < fv[d]) {
                const std::vector<double> xc = blend(psi * rho);  // outside contraction
                const double fc = eval(xc);
                if (fc <= fr) {
                    simplex[d] = xc;
                    fv[d] = fc;
                } else {
                    shrink = true;
                }
            } else {
                const std::vector<double> xc = blend(-psi);  // inside contraction
                const double fc = eval(xc);
                if (fc < fv[d]) {
                    simplex[d] = xc;
                    fv[d] = fc;
                } else {
                    shrink = true;
                }
            }
            if (shrink) {
                for (int v = 1; v <= d; ++v) {
                    for (int i = 0; i < d; ++i)
                        simplex[v][i] = simplex[0][i] + sigma * (simplex[v][i] - simplex[0][i]);
                    fv[v] = eval(simplex[v]);
                }
            }
        }
        order();
    }
    return {simplex[0], fv[0], evals, fv[0] <= opts.target};
}

CalibrationResult calibrate(const TestSpec& spec_template, const CalibrationTarget& target,
                            const Evaluator& evaluator, NmOptions opts, int restarts) {
    if (target.ties.groups.empty())
        throw std::invalid_argument("calibrate: no free multipliers");
    const size_t d = target.ties.groups.size();

    // Start from the template's multipliers in log space.
    std::vector<double> x0(d);
    for (size_t g = 0; g < d; ++g) {
        const auto [i, j] = target.ties.groups[g].front();
        const double l = spec_template.lambdas()(i, j);
        x0[g] = std::log(std::max(l, 1.0 + 1e-6));
    }

    std::optional<TestSpec> best_spec;
    std::optional<TestReport> best_report;
    double best_value = std::numeric_limits<double>::infinity();

    auto objective = [&](std::span<const double> x) {
        std::vector<double> lambdas(x.size());
        for (size_t g = 0; g < x.size(); ++g) lambdas[g] = std::exp(x[g]);
        TestSpec probe = spec_template;
        try {
            probe = spec_template.with_lambdas(
                target.ties.apply(spec_template.lambdas(), lambdas));
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::infinity();  // trivial probe
        }
        const TestReport report = evaluator(probe);
        const double value = relative_distance(report, probe, target.targets);
        if (value < best_value) {
            best_value = value;
            best_spec = probe;
            best_report = report;
        }
        return value;
    };

    if (opts.target == kNegInf) opts.target = target.tolerance * 0.75;
    if (opts.init_step.empty()) opts.init_step.assign(d, std::log(1.2));

    int total_evals = 0;
    std::vector<double> x = x0;
    const double spreads[] = {std::log(1.2), std::log(1.05), std::log(1.45)};
    for (int r = 0; r <= restarts; ++r) {
        NmOptions o = opts;
        o.init_step.assign(d, spreads[r % 3]);
        const NmResult nm = nelder_mead(objective, x, o);
        total_evals += nm.evals;
        x = nm.x;
        if (best_value <= opts.target) break;
    }

    // Coordinate polish: the discrete stopping regions turn the objective
    // into a staircase on which the collapsed simplex can sit one step from
    // a better plateau.  Small per-group probes walk down such steps.
    if (best_value > opts.target) {
        for (int sweep = 0; sweep < 3; ++sweep) {
            bool improved = false;
            for (size_t g = 0; g < d && best_value > opts.target; ++g) {
                for (double step : {0.03, -0.03, 0.008, -0.008, 0.002, -0.002}) {
                    std::vector<double> probe = x;
                    probe[g] += step;
                    const double before = best_value;
                    objective(probe);
                    ++total_evals;
                    if (best_value < before) {
                        x = probe;
                        improved = true;
                    }
                }
            }
            if (!improved || best_value <= opts.target) break;
        }
    }

    if (!best_spec) throw std::runtime_error("calibrate: every probe was trivial");
    std::vector<double> multipliers(d);
    for (size_t g = 0; g < d; ++g) {
        const auto [i, j] = target.ties.groups[g].front();
        multipliers[g] = best_spec->lambdas()(i, j);
    }
    return {std::move(*best_spec), std::move(*best_report), best_value,
            best_value <= target.tolerance, total_evals, std::move(multipliers)};
}

}  // namespace seqtest
