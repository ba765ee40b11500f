#include <doctest.h>

#include <cmath>
#include <random>

#include "seqtest/model.hpp"

using namespace seqtest;

TEST_CASE("bernoulli log-density increments") {
    const Model m = Model::bernoulli();
    CHECK(log_density_increment(m, 0.5, 1.0, 1) == doctest::Approx(std::log(0.5)));
    CHECK(log_density_increment(m, 0.5, 1.0, 17) == doctest::Approx(std::log(0.5)));
    CHECK(log_density_increment(m, 0.3, 0.0, 1) == doctest::Approx(std::log(0.7)));
    CHECK_THROWS_AS((void)log_density_increment(m, 0.3, 0.5, 1), std::domain_error);
}

TEST_CASE("trend increment vanishes at zero residual") {
    const Model m = Model::normal_trend();
    // At step t the mean is theta*t, so observing exactly that leaves -log(sqrt(2*pi)).
    const double expected = -0.5 * std::log(2.0 * M_PI);
    for (int t : {1, 3, 10})
        CHECK(log_density_increment(m, 0.1, 0.1 * t, t) == doctest::Approx(expected));
}

TEST_CASE("grouped normal increment is the density of the group sum") {
    const Model m = Model::grouped_normal(40);
    // At the mean the density is 1/sqrt(2*pi*m).
    CHECK(log_density_increment(m, 0.1, 4.0, 1) ==
          doctest::Approx(-0.5 * std::log(2.0 * M_PI * 40.0)));
}

TEST_CASE("hellinger affinity closed forms") {
    CHECK(hellinger_affinity(Model::bernoulli(), 0.3, 0.3) == doctest::Approx(1.0));
    // Two-point quadrature for the Bernoulli integral is the closed form itself;
    // check the arithmetic in extended precision.
    const long double direct = sqrtl(0.3L * 0.5L) + sqrtl(0.7L * 0.5L);
    CHECK(hellinger_affinity(Model::bernoulli(), 0.3, 0.5) ==
          doctest::Approx(static_cast<double>(direct)).epsilon(1e-14));
    CHECK(hellinger_affinity(Model::bernoulli(), 0.3, 0.5) == doctest::Approx(0.97895).epsilon(1e-4));

    CHECK(hellinger_affinity(Model::normal(), 0.0, 2.0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK_THROWS_AS((void)hellinger_affinity(Model::normal_trend(), 0.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)hellinger_affinity(Model::grouped_normal(4), 0.0, 0.1),
                    std::invalid_argument);
}

TEST_CASE("normal affinity agrees with numerical quadrature") {
    // integral of sqrt(phi(x; theta) * phi(x; vartheta)) over the real line,
    // Simpson's rule on a wide bracket.
    const double theta = 0.0, vartheta = 2.0;
    auto integrand = [&](double x) {
        const double a = x - theta, b = x - vartheta;
        return std::exp(-0.25 * (a * a + b * b)) / std::sqrt(2.0 * M_PI);
    };
    const double lo = -12.0, hi = 14.0;
    const int n = 20000;
    const double h = (hi - lo) / n;
    double acc = integrand(lo) + integrand(hi);
    for (int i = 1; i < n; ++i) acc += integrand(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    const double quadrature = acc * h / 3.0;
    CHECK(hellinger_affinity(Model::normal(), theta, vartheta) ==
          doctest::Approx(quadrature).epsilon(1e-10));
}

TEST_CASE("bernoulli path reconstruction matches the closed form") {
    const Model m = Model::bernoulli();
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double theta = 0.05 + 0.9 * u(gen);
        double acc = 0.0;
        int s = 0;
        const int n = 1 + static_cast<int>(u(gen) * 400);
        for (int t = 1; t <= n; ++t) {
            const double x = u(gen) < 0.5 ? 0.0 : 1.0;
            s += static_cast<int>(x);
            acc += log_density_increment(m, theta, x, t);
        }
        CHECK(acc == doctest::Approx(bernoulli_loglik(n, s, theta)).epsilon(1e-12));
    }
}

TEST_CASE("sufficient state tracks counts and sums") {
    SufficientState st;
    const Model m = Model::bernoulli();
    st.append(m, 1.0);
    st.append(m, 0.0);
    st.append(m, 1.0);
    CHECK(st.n == 3);
    CHECK(st.stat == 2.0);

    SufficientState tr;
    const Model t = Model::normal_trend();
    tr.append(t, 2.0);   // weight 1
    tr.append(t, -1.0);  // weight 2
    CHECK(tr.n == 2);
    CHECK(tr.stat == doctest::Approx(0.0));
}

TEST_CASE("sampling respects the model support and seeds") {
    SplitMix64 rng(123);
    const Model b = Model::bernoulli();
    int ones = 0;
    for (int i = 0; i < 2000; ++i) {
        const double x = sample_observation(b, 0.3, 1, rng);
        CHECK((x == 0.0 || x == 1.0));
        ones += x == 1.0;
    }
    CHECK(ones > 450);
    CHECK(ones < 750);

    SplitMix64 r1(9), r2(9);
    const Model g = Model::grouped_normal(40);
    for (int i = 0; i < 10; ++i)
        CHECK(sample_observation(g, 0.1, i + 1, r1) == sample_observation(g, 0.1, i + 1, r2));
}
