#include "seqtest/model.hpp"

#include <cmath>

namespace seqtest {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

bool valid_parameter(const Model& model, double theta) {
    if (!std::isfinite(theta)) return false;
    if (model.kind == ModelKind::BernoulliIID) return theta > 0.0 && theta < 1.0;
    return true;
}

double log_density_increment(const Model& model, double theta, double x, int t) {
    switch (model.kind) {
        case ModelKind::BernoulliIID: {
            if (x == 1.0) return std::log(theta);
            if (x == 0.0) return std::log1p(-theta);
            throw std::domain_error("Bernoulli observation must be 0 or 1");
        }
        case ModelKind::NormalIID: {
            const double r = x - theta;
            return -0.5 * kLog2Pi - 0.5 * r * r;
        }
        case ModelKind::NormalLinearTrend: {
            const double r = x - theta * static_cast<double>(t);
            return -0.5 * kLog2Pi - 0.5 * r * r;
        }
        case ModelKind::GroupedNormal: {
            // x is the sum of a group of m unit-variance observations.
            const double m = static_cast<double>(model.group_size);
            const double r = x - m * theta;
            return -0.5 * (kLog2Pi + std::log(m)) - r * r / (2.0 * m);
        }
    }
    throw std::logic_error("unreachable model kind");
}

double hellinger_affinity(const Model& model, double theta, double vartheta) {
    switch (model.kind) {
        case ModelKind::BernoulliIID:
            return std::sqrt(theta * vartheta) + std::sqrt((1.0 - theta) * (1.0 - vartheta));
        case ModelKind::NormalIID: {
            const double d = theta - vartheta;
            return std::exp(-d * d / 8.0);
        }
        case ModelKind::NormalLinearTrend:
        case ModelKind::GroupedNormal:
            throw std::invalid_argument(
                "hellinger_affinity: steps of " + to_string(model.kind) +
                " are not identically distributed");
    }
    throw std::logic_error("unreachable model kind");
}

double sample_observation(const Model& model, double theta, int t, SplitMix64& rng) {
    switch (model.kind) {
        case ModelKind::BernoulliIID:
            return rng.uniform01() < theta ? 1.0 : 0.0;
        case ModelKind::NormalIID:
            return theta + rng.normal();
        case ModelKind::NormalLinearTrend:
            return theta * static_cast<double>(t) + rng.normal();
        case ModelKind::GroupedNormal: {
            const double m = static_cast<double>(model.group_size);
            return m * theta + std::sqrt(m) * rng.normal();
        }
    }
    throw std::logic_error("unreachable model kind");
}

void SufficientState::append(const Model& model, double x) {
    ++n;
    switch (model.kind) {
        case ModelKind::BernoulliIID:
        case ModelKind::NormalIID:
        case ModelKind::GroupedNormal:
            stat += x;
            break;
        case ModelKind::NormalLinearTrend:
            stat += static_cast<double>(n) * x;
            break;
    }
}

double bernoulli_loglik(int n, double s, double theta) {
    return s * std::log(theta) + (static_cast<double>(n) - s) * std::log1p(-theta);
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::BernoulliIID: return "bernoulli";
        case ModelKind::NormalIID: return "normal";
        case ModelKind::NormalLinearTrend: return "normal_trend";
        case ModelKind::GroupedNormal: return "grouped_normal";
    }
    return "?";
}

}  // namespace seqtest
