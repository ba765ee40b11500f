#include <doctest.h>

#include <cmath>

#include "seqtest/fit.hpp"
#include "seqtest/lattice.hpp"
#include "test_util.hpp"

using namespace seqtest;
using namespace seqtest::testutil;

TEST_CASE("relative distance") {
    const std::vector<double> t{0.05, 0.05, 0.05};
    CHECK(relative_distance(t, t) == doctest::Approx(0.0));
    CHECK(relative_distance(std::vector<double>{0.055, 0.05, 0.04}, t) ==
          doctest::Approx(0.2));
    CHECK(relative_distance(std::vector<double>{0.1002}, std::vector<double>{0.1}) ==
          doctest::Approx(0.002));
    CHECK_THROWS_AS((void)relative_distance(std::vector<double>{0.1}, t),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)relative_distance(std::vector<double>{0.1}, std::vector<double>{0.0}),
        std::invalid_argument);
}

TEST_CASE("nelder-mead on a convex quadratic") {
    const NmResult r = nelder_mead(
        [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); },
        std::vector<double>{0.0}, {});
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.value < 1e-10);
}

TEST_CASE("nelder-mead on the rosenbrock valley") {
    NmOptions opts;
    opts.max_evals = 5000;
    opts.xtol = 1e-10;
    opts.ftol = 1e-14;
    const NmResult r = nelder_mead(
        [](std::span<const double> x) {
            const double a = 1.0 - x[0];
            const double b = x[1] - x[0] * x[0];
            return a * a + 100.0 * b * b;
        },
        std::vector<double>{-1.2, 1.0}, opts);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("nelder-mead degenerate cases") {
    // Constant objective: returns a starting vertex with the constant value.
    const NmResult flat = nelder_mead([](std::span<const double>) { return 7.5; },
                                      std::vector<double>{1.0, 2.0}, {});
    CHECK(flat.value == 7.5);

    CHECK_THROWS_AS(
        (void)nelder_mead(
            [](std::span<const double>) { return std::numeric_limits<double>::infinity(); },
            std::vector<double>{0.0}, {}),
        std::invalid_argument);

    NmOptions target_opts;
    target_opts.target = 10.0;
    const NmResult early = nelder_mead(
        [](std::span<const double> x) { return x[0] * x[0]; }, std::vector<double>{1.0},
        target_opts);
    CHECK(early.reached_target);
    CHECK(early.evals <= 3);
}

TEST_CASE("lambda ties apply shared values") {
    const LambdaTies rows = LambdaTies::row_constant(3);
    const Matrix m = rows.apply(Matrix(3, 3, 0.0), std::vector<double>{2.0, 3.0, 4.0});
    CHECK(m(0, 1) == 2.0);
    CHECK(m(0, 2) == 2.0);
    CHECK(m(1, 0) == 3.0);
    CHECK(m(2, 1) == 4.0);
    CHECK(m(1, 1) == 0.0);

    const LambdaTies sym = LambdaTies::rows_tied(3, {{0, 2}, {1}});
    const Matrix s = sym.apply(Matrix(3, 3, 0.0), std::vector<double>{5.0, 7.0});
    CHECK(s(0, 1) == 5.0);
    CHECK(s(2, 0) == 5.0);
    CHECK(s(1, 2) == 7.0);
}

TEST_CASE("calibration converges at a fixed point") {
    // Target the errors a known spec already achieves, starting from it:
    // the objective is ~0 at the opening vertex.
    const TestSpec spec = bernoulli3({9.0, 9.0, 9.0}, 150);
    const TestReport base = evaluate(dbc_lattice(spec), spec);
    const std::vector<double> achieved = base.alpha_i(spec);

    CalibrationTarget target = CalibrationTarget::per_hypothesis(3, achieved);
    target.tolerance = 1e-6;
    const Evaluator ev = [](const TestSpec& probe) {
        return dbc_streamed_report(probe, probe.horizon().cap);
    };
    const CalibrationResult fit = calibrate(spec, target, ev, {}, 0);
    CHECK(fit.met);
    CHECK(fit.achieved_distance <= 1e-6);
    CHECK(fit.multipliers[0] == doctest::Approx(9.0).epsilon(0.02));
}

TEST_CASE("calibration fits a small closed-form design") {
    const TestSpec templ = bernoulli3({12.0, 12.0, 12.0}, 250);
    std::vector<double> alphas{0.08, 0.08, 0.08};
    CalibrationTarget target = CalibrationTarget::per_hypothesis(3, alphas);
    target.tolerance = 0.02;
    const Evaluator ev = [](const TestSpec& probe) {
        return dbc_streamed_report(probe, probe.horizon().cap);
    };
    const CalibrationResult fit = calibrate(templ, target, ev, {}, 2);
    CHECK(fit.met);
    const std::vector<double> got = fit.report.alpha_i(fit.spec);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(got[i] - 0.08) / 0.08 <= target.tolerance + 1e-12);
    for (double l : fit.multipliers) CHECK(l > 1.0);
}

TEST_CASE("aggregated error targets drive two-sided calibration") {
    const TestSpec spec = bernoulli3({10.0, 10.0, 10.0}, 120);
    const TestReport report = evaluate(dbc_lattice(spec), spec);
    ErrorTarget size{{{1, 0}, {1, 2}}, 0.0};
    size.target = achieved_error(report, spec, size);
    CHECK(size.target > 0.0);
    CHECK(size.target == doctest::Approx(1.0 - report.alpha_matrix(spec)(1, 1)));
    CHECK(relative_distance(report, spec, std::vector<ErrorTarget>{size}) ==
          doctest::Approx(0.0));
}
