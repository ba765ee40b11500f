#include <doctest.h>

#include <cmath>
#include <random>

#include "seqtest/reference.hpp"
#include "test_util.hpp"

using namespace seqtest;
using namespace seqtest::testutil;

// The OpenMP kernels must agree with the plain serial reference: identical
// tabulated policies (same per-state arithmetic) and matching evaluations.

TEST_CASE("tabulated policies are identical to the reference") {
    std::mt19937 gen(61);
    for (int trial = 0; trial < 4; ++trial) {
        const TestSpec spec = random_bernoulli_spec(gen, 150);
        const LatticePolicy reference = ref::dbc_lattice(spec);
        CHECK(dbc_lattice(spec, Par{1}) == reference);
        CHECK(dbc_lattice(spec, Par{2}) == reference);
        CHECK(dbc_lattice(spec, Par{3}) == reference);
    }
}

TEST_CASE("forward evaluation matches the reference") {
    std::mt19937 gen(67);
    const TestSpec spec = random_bernoulli_spec(gen, 300);
    const LatticePolicy policy = dbc_lattice(spec, Par{2});
    const std::vector<double> extras{0.33, 0.57};

    const TestReport reference = ref::evaluate(policy, spec, extras);
    for (int threads : {1, 2}) {
        const TestReport kernel = evaluate(policy, spec, extras, Par{threads});
        REQUIRE(kernel.results.size() == reference.results.size());
        for (size_t i = 0; i < kernel.results.size(); ++i) {
            const ParamResult& a = kernel.results[i];
            const ParamResult& b = reference.results[i];
            CHECK(a.param == b.param);
            for (size_t j = 0; j < a.accept.size(); ++j)
                CHECK(a.accept[j] == doctest::Approx(b.accept[j]).epsilon(1e-12));
            CHECK(a.ess == doctest::Approx(b.ess).epsilon(1e-12));
            CHECK(a.capped == doctest::Approx(b.capped).epsilon(1e-12));
        }
        CHECK(kernel.weighted_ess == doctest::Approx(reference.weighted_ess).epsilon(1e-12));
    }
}

TEST_CASE("backward induction matches the reference") {
    std::mt19937 gen(71);
    for (int trial = 0; trial < 3; ++trial) {
        const TestSpec spec = random_bernoulli_spec(gen, 120);
        const BackwardResult reference = ref::backward_optimal(spec, 120);
        for (int threads : {1, 2}) {
            const BackwardResult kernel = backward_optimal(spec, 120, Par{threads});
            CHECK(kernel.policy == reference.policy);
            CHECK(kernel.minimal_lagrangian ==
                  doctest::Approx(reference.minimal_lagrangian).epsilon(1e-13));
        }
    }
}

TEST_CASE("evaluation is bit-identical across thread counts") {
    std::mt19937 gen(73);
    const TestSpec spec = random_bernoulli_spec(gen, 250);
    const LatticePolicy policy = dbc_lattice(spec, Par{2});
    const TestReport one = evaluate(policy, spec, {}, Par{1});
    const TestReport two = evaluate(policy, spec, {}, Par{2});
    REQUIRE(one.results.size() == two.results.size());
    for (size_t i = 0; i < one.results.size(); ++i) {
        CHECK(one.results[i].accept == two.results[i].accept);
        CHECK(one.results[i].ess == two.results[i].ess);
    }
    CHECK(one.weighted_ess == two.weighted_ess);

    const BackwardResult b1 = backward_optimal(spec, 250, Par{1});
    const BackwardResult b2 = backward_optimal(spec, 250, Par{2});
    CHECK(b1.policy == b2.policy);
    CHECK(b1.minimal_lagrangian == b2.minimal_lagrangian);

    const TestReport s1 = dbc_streamed_report(spec, 250, Par{1});
    const TestReport s2 = dbc_streamed_report(spec, 250, Par{2});
    for (size_t i = 0; i < s1.results.size(); ++i) {
        CHECK(s1.results[i].accept == s2.results[i].accept);
        CHECK(s1.results[i].ess == s2.results[i].ess);
    }
}
