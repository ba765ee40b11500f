#include "seqtest/kiefer_weiss.hpp"

#include <algorithm>
#include <cmath>

namespace seqtest {

namespace {

double ess_at(const LatticePolicy& policy, const TestSpec& spec, double theta, Par par) {
    const double grid[1] = {theta};
    const TestReport r = evaluate(policy, spec, grid, par);
    return r.find(theta)->ess;
}

// Golden-section maximization of a unimodal bracket.
EssMax golden_max(const LatticePolicy& policy, const TestSpec& spec, double a, double b,
                  double tol, Par par) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = ess_at(policy, spec, x1, par);
    double f2 = ess_at(policy, spec, x2, par);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = ess_at(policy, spec, x1, par);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = ess_at(policy, spec, x2, par);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, ess_at(policy, spec, xm, par)};
}

}  // namespace

std::vector<EssMax> ess_argmax(const LatticePolicy& policy, const TestSpec& spec, double lo,
                               double hi, double grid_step, double refine_tol, Par par) {
    if (!(hi > lo)) throw std::invalid_argument("ess_argmax: empty interval");

    std::vector<double> grid;
    for (double t = lo + grid_step; t < hi - grid_step / 2; t += grid_step) grid.push_back(t);
    if (grid.size() < 3) throw std::invalid_argument("ess_argmax: interval too narrow");

    const TestReport scan = evaluate(policy, spec, grid, par);
    std::vector<double> ess(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) ess[i] = scan.find(grid[i])->ess;

    std::vector<EssMax> maxima;
    for (size_t i = 0; i < grid.size(); ++i) {
        const bool left_ok = i == 0 || ess[i] >= ess[i - 1];
        const bool right_ok = i + 1 == grid.size() || ess[i] >= ess[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = i == 0 ? lo : grid[i - 1];
        const double b = i + 1 == grid.size() ? hi : grid[i + 1];
        maxima.push_back(golden_max(policy, spec, a, b, refine_tol, par));
    }

    std::sort(maxima.begin(), maxima.end(),
              [](const EssMax& a, const EssMax& b) { return a.theta < b.theta; });
    // Merge refinements that collapsed onto the same point.
    std::vector<EssMax> merged;
    for (const EssMax& m : maxima) {
        if (!merged.empty() && std::abs(m.theta - merged.back().theta) < 2 * refine_tol) {
            if (m.ess > merged.back().ess) merged.back() = m;
        } else {
            merged.push_back(m);
        }
    }
    double global = 0.0;
    for (const EssMax& m : merged) global = std::max(global, m.ess);
    std::erase_if(merged, [&](const EssMax& m) { return m.ess < global - 1e-6; });
    return merged;
}

KWDesign kw_fixed_point(const Model& model, std::vector<double> thetas,
                        std::vector<double> lambda_init, bool symmetric,
                        const CalibrationTarget& targets, const KwOptions& options, Par par) {
    const int k = static_cast<int>(thetas.size());
    if (k < 2) throw std::invalid_argument("kw_fixed_point: need at least 2 hypotheses");
    if (!std::is_sorted(thetas.begin(), thetas.end()))
        throw std::invalid_argument("kw_fixed_point: hypotheses must be ordered");

    // Tie structure: row-constant multipliers, outer rows shared when
    // symmetric.  lambda_init carries one value per tie group.
    LambdaTies ties;
    if (symmetric && k >= 3) {
        std::vector<std::vector<int>> row_groups;
        for (int i = 0; i < (k + 1) / 2; ++i) {
            if (i == k - 1 - i)
                row_groups.push_back({i});
            else
                row_groups.push_back({i, k - 1 - i});
        }
        ties = LambdaTies::rows_tied(k, row_groups);
    } else {
        ties = LambdaTies::row_constant(k);
    }
    if (lambda_init.size() != ties.groups.size())
        throw std::invalid_argument("kw_fixed_point: one lambda per tie group expected");

    CalibrationTarget target = targets;
    target.ties = ties;

    // Evaluation points start at the midpoints of adjacent hypothesis pairs.
    std::vector<double> evals;
    for (int i = 0; i + 1 < k; ++i) evals.push_back(0.5 * (thetas[i] + thetas[i + 1]));
    std::vector<double> gammas(evals.size(), 1.0 / static_cast<double>(evals.size()));

    Matrix lambdas = ties.apply(Matrix(k, k, 0.0), lambda_init);
    auto make_spec = [&](const std::vector<double>& ev) {
        return TestSpec(model, thetas, ev, gammas, lambdas, Horizon::finite(options.horizon));
    };

    KWDesign design{make_spec(evals), TestReport{}, {}, 0.0, 0.0, 0.0, false, 0};
    const double lo = thetas.front(), hi = thetas.back();

    for (int round = 1; round <= options.max_rounds; ++round) {
        design.rounds = round;
        TestSpec spec = make_spec(evals);
        const LatticePolicy policy = dbc_lattice(spec, par);

        // Move the evaluation points onto the ESS maxima of the current rule.
        std::vector<EssMax> maxima =
            ess_argmax(policy, spec, lo, hi, options.grid_step, options.refine_tol, par);
        std::vector<double> new_evals;
        if (static_cast<int>(maxima.size()) == k - 1) {
            for (const EssMax& m : maxima) new_evals.push_back(m.theta);
        } else {
            // Match each current point to the nearest maximum.
            for (double e : evals) {
                double best = maxima.front().theta;
                for (const EssMax& m : maxima)
                    if (std::abs(m.theta - e) < std::abs(best - e)) best = m.theta;
                new_evals.push_back(best);
            }
        }
        if (symmetric && new_evals.size() >= 2) {
            const double mid = 0.5 * (lo + hi);
            const double w = 0.5 * (new_evals.front() + (2 * mid - new_evals.back()));
            new_evals.front() = w;
            new_evals.back() = 2 * mid - w;
        }
        std::sort(new_evals.begin(), new_evals.end());

        design.fixed_point_gap = 0.0;
        for (size_t i = 0; i < evals.size(); ++i)
            design.fixed_point_gap =
                std::max(design.fixed_point_gap, std::abs(new_evals[i] - evals[i]));
        evals = new_evals;

        // Refit the multipliers at the new evaluation points.
        TestSpec fitted_template = make_spec(evals);
        NmOptions nm = options.nm;
        CalibrationResult fit = calibrate(
            fitted_template, target,
            [&](const TestSpec& probe) {
                return dbc_streamed_report(probe, probe.horizon().cap, par);
            },
            nm, options.restarts);
        lambdas = fit.spec.lambdas();
        design.spec = fit.spec;
        design.report = fit.report;
        design.achieved_distance = fit.achieved_distance;

        if (design.fixed_point_gap < options.theta_tol &&
            design.achieved_distance <= target.tolerance) {
            design.converged = true;
            break;
        }
    }

    // Final survey of the converged rule.
    const LatticePolicy policy = dbc_lattice(design.spec, par);
    std::vector<EssMax> maxima =
        ess_argmax(policy, design.spec, lo, hi, options.grid_step, options.refine_tol, par);
    design.worst_points.clear();
    design.max_ess = 0.0;
    for (const EssMax& m : maxima) {
        design.worst_points.push_back(m.theta);
        design.max_ess = std::max(design.max_ess, m.ess);
    }
    return design;
}

}  // namespace seqtest
