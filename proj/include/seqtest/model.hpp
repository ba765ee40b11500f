#pragma once

#include <string>

#include "seqtest/math_util.hpp"
#include "seqtest/rng.hpp"

namespace seqtest {

// Observation-process descriptors.  Each model supplies per-step log-density
// increments with respect to its product measure (counting measure for
// Bernoulli, Lebesgue otherwise), sampling, and where the process is i.i.d.
// the Hellinger affinity between two parameter points.
enum class ModelKind {
    BernoulliIID,      // X_t in {0,1}, P(X=1) = theta, theta in (0,1)
    NormalIID,         // X_t ~ N(theta, 1)
    NormalLinearTrend, // X_t ~ N(theta * t, 1)
    GroupedNormal,     // one step = sum of m N(theta,1) draws ~ N(m*theta, m)
};

struct Model {
    ModelKind kind = ModelKind::BernoulliIID;
    int group_size = 1;  // only meaningful for GroupedNormal

    static Model bernoulli() { return {ModelKind::BernoulliIID, 1}; }
    static Model normal() { return {ModelKind::NormalIID, 1}; }
    static Model normal_trend() { return {ModelKind::NormalLinearTrend, 1}; }
    static Model grouped_normal(int m) { return {ModelKind::GroupedNormal, m}; }

    bool operator==(const Model&) const = default;
};

// True when theta is a valid parameter value for the model.
bool valid_parameter(const Model& model, double theta);

// Log of the per-sequence density increment contributed by observation x at
// step t (t >= 1).  For Bernoulli this is x*log(theta) + (1-x)*log(1-theta);
// no binomial coefficient, the density is per sequence under the counting
// product measure.  Throws std::domain_error when x is outside the support.
double log_density_increment(const Model& model, double theta, double x, int t);

// Hellinger affinity r = integral sqrt(f_theta * f_vartheta) d(mu) for the
// i.i.d. kinds.  Equals 1 iff theta == vartheta.  The trend and grouped
// kinds are rejected (their steps are not identically distributed).
double hellinger_affinity(const Model& model, double theta, double vartheta);

// Draw one observation at step t under theta.
double sample_observation(const Model& model, double theta, int t, SplitMix64& rng);

// Running sufficient statistic where the model has one: success count for
// Bernoulli (stat is integral, 0 <= stat <= n), cumulative (weighted) sum for
// the normal kinds.  Only the Bernoulli form supports exact reconstruction
// of log-densities, which is what the lattice algorithms rely on.
struct SufficientState {
    int n = 0;
    double stat = 0.0;

    void append(const Model& model, double x);
};

// Exact Bernoulli reconstruction: s*log(theta) + (n-s)*log(1-theta).
double bernoulli_loglik(int n, double s, double theta);

std::string to_string(ModelKind kind);

}  // namespace seqtest
