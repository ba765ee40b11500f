#include <doctest.h>

#include <cmath>
#include <random>

#include "seqtest/lattice.hpp"
#include "test_util.hpp"

using namespace seqtest;
using namespace seqtest::testutil;

TEST_CASE("one-step backward induction reduces to a direct sum") {
    const TestSpec spec = bernoulli2(5.0, 4.0, 0.4, 1);
    const BackwardResult result = backward_optimal(spec, 1);
    // With one step the policy stops everywhere and the value is
    // 1 + v_1(x=0) + v_1(x=1) in per-sequence density scale.
    const double t1 = spec.thetas()[0], t2 = spec.thetas()[1];
    auto v1 = [&](double f1, double f2) { return std::min(4.0 * f2, 5.0 * f1); };
    const double direct = 1.0 + v1(1 - t1, 1 - t2) + v1(t1, t2);
    CHECK(result.minimal_lagrangian == doctest::Approx(direct).epsilon(1e-12));
    CHECK(result.policy.action(1, 0) >= 0);
    CHECK(result.policy.action(1, 1) >= 0);
}

TEST_CASE("minimal lagrangian equals the forward-evaluated lagrangian") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 6; ++trial) {
        const int N = 5 + static_cast<int>(gen() % 8);
        const TestSpec spec = random_bernoulli_spec(gen, N);
        const BackwardResult result = backward_optimal(spec, N);
        const TestReport report = evaluate(result.policy, spec);
        CHECK(lagrangian(report, spec) ==
              doctest::Approx(result.minimal_lagrangian).epsilon(1e-9));
    }
}

TEST_CASE("backward value is consistent with the path-enumeration oracle") {
    std::mt19937 gen(31);
    const TestSpec spec = random_bernoulli_spec(gen, 9);
    const BackwardResult result = backward_optimal(spec, 9);
    const TestReport oracle =
        brute_force_oracle(LatticePathPolicy(result.policy, spec), spec, 9);
    CHECK(lagrangian(oracle, spec) ==
          doctest::Approx(result.minimal_lagrangian).epsilon(1e-10));
}

TEST_CASE("no perturbed policy beats the optimal one") {
    std::mt19937 gen(13);
    const int N = 12;
    const TestSpec spec = random_bernoulli_spec(gen, N);
    const BackwardResult best = backward_optimal(spec, N);

    std::uniform_int_distribution<int> pick_n(1, N);
    std::uniform_int_distribution<int> flips(1, 5);
    std::uniform_int_distribution<int> action(-1, spec.k() - 1);
    for (int trial = 0; trial < 60; ++trial) {
        LatticePolicy perturbed = best.policy;
        const int count = flips(gen);
        for (int f = 0; f < count; ++f) {
            const int n = pick_n(gen);
            const int s = static_cast<int>(gen() % (n + 1));
            int a = action(gen);
            if (n == N && a < 0) a = static_cast<int>(gen() % spec.k());
            perturbed.set_action(n, s, static_cast<int8_t>(a));
        }
        const TestReport report = evaluate(perturbed, spec);
        CHECK(lagrangian(report, spec) >= best.minimal_lagrangian - 1e-9);
    }
}

TEST_CASE("the closed-form stop region is contained in the optimal stop region") {
    std::mt19937 gen(41);
    for (int trial = 0; trial < 4; ++trial) {
        const int N = 40;
        const TestSpec spec = random_bernoulli_spec(gen, N);
        const LatticePolicy dbc = dbc_lattice(spec);
        const LatticePolicy opt = backward_optimal(spec, N).policy;
        for (int n = 1; n < N; ++n)
            for (int s = 0; s <= n; ++s)
                if (dbc.action(n, s) >= 0) {
                    CHECK(opt.action(n, s) >= 0);
                    // Both rules share the decision argmin.
                    CHECK(opt.action(n, s) == dbc.action(n, s));
                }
    }
}

TEST_CASE("truncation monotonicity of the minimal lagrangian") {
    std::mt19937 gen(53);
    for (int trial = 0; trial < 3; ++trial) {
        const TestSpec spec = random_bernoulli_spec(gen, 40);
        double prev = std::numeric_limits<double>::infinity();
        for (int N : {5, 10, 20, 40}) {
            const double value = backward_optimal(spec, N).minimal_lagrangian;
            CHECK(value <= prev + 1e-12);
            prev = value;
        }
    }
}

TEST_CASE("optimal policy stops no later than the horizon forces it to") {
    const TestSpec spec = bernoulli3({30.0, 30.0, 30.0}, 150);
    const BackwardResult result = backward_optimal(spec, 150);
    result.policy.validate();
    const TestReport report = evaluate(result.policy, spec);
    for (const ParamResult& r : report.results) {
        double sum = 0.0;
        for (double a : r.accept) sum += a;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}
