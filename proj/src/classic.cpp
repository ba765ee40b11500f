#include "seqtest/classic.hpp"

#include <cmath>

namespace seqtest {

SprtRule SprtRule::make(double A, double B, double decision_threshold) {
    if (!(A > 0.0 && A < 1.0 && B > 1.0))
        throw std::invalid_argument("SprtRule: need 0 < A < 1 < B");
    SprtRule r;
    r.A = A;
    r.B = B;
    r.decision_threshold = decision_threshold;
    r.log_A = std::log(A);
    r.log_B = std::log(B);
    r.log_decision = std::log(decision_threshold);
    return r;
}

SprtRule sprt_from_lagrange(double lambda1, double lambda2, double gamma1, double gamma2) {
    if (!(lambda1 > 1.0 && lambda2 > 1.0))
        throw std::invalid_argument("sprt_from_lagrange: non-triviality needs lambda_i > 1");
    if (!(gamma1 > 0.0 && gamma2 > 0.0) || std::abs(gamma1 + gamma2 - 1.0) > 1e-12)
        throw std::invalid_argument("sprt_from_lagrange: gammas must be positive and sum to 1");

    const double A = gamma1 / (lambda2 - gamma2);
    const double B = (lambda1 - gamma1) / gamma2;
    const double d = lambda1 / lambda2;
    // The ordering A < lambda1/lambda2 < B holds whenever both multipliers
    // exceed one; fail loudly if arithmetic ever breaks it.
    if (!(A < d && d < B)) throw std::logic_error("sprt_from_lagrange: threshold ordering broken");
    return SprtRule::make(A, B, d);
}

Verdict sprt_verdict(const LogLikState& state, const SprtRule& rule) {
    const double llr = state.logf_theta[1] - state.logf_theta[0];
    if (llr <= rule.log_A || llr >= rule.log_B)
        return {true, llr >= rule.log_decision ? 1 : 0};
    return {};
}

TwoSprtRule two_sprt(double lambda1, double lambda2, double theta1, double theta2,
                     double vartheta) {
    if (!(lambda1 > 1.0 && lambda2 > 1.0))
        throw std::invalid_argument("two_sprt: non-triviality needs lambda_i > 1");
    TwoSprtRule r;
    r.theta1 = theta1;
    r.theta2 = theta2;
    r.vartheta = vartheta;
    r.log_lambda1 = std::log(lambda1);
    r.log_lambda2 = std::log(lambda2);
    return r;
}

Verdict two_sprt_verdict(const LogLikState& state, const TwoSprtRule& rule) {
    const double a = rule.log_lambda1 + state.logf_theta[0];
    const double b = rule.log_lambda2 + state.logf_theta[1];
    if (std::min(a, b) <= state.logf_eval[0]) return {true, a >= b ? 0 : 1};
    return {};
}

MsprtRule MsprtRule::uniform(int k, double log_threshold) {
    MsprtRule r;
    r.log_thresholds = Matrix(k, k, log_threshold);
    for (int i = 0; i < k; ++i) r.log_thresholds(i, i) = 0.0;
    return r;
}

MsprtRule MsprtRule::row_constant(std::span<const double> row_logs) {
    const int k = static_cast<int>(row_logs.size());
    MsprtRule r;
    r.log_thresholds = Matrix(k, k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j) r.log_thresholds(i, j) = row_logs[i];
    return r;
}

Verdict msprt_verdict(const LogLikState& state, const MsprtRule& rule) {
    const int k = static_cast<int>(state.logf_theta.size());
    for (int j = 0; j < k; ++j) {
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            if (i == j) continue;
            ok = state.logf_theta[j] - state.logf_theta[i] >= rule.log_thresholds(i, j);
        }
        if (ok) return {true, j};
    }
    return {};
}

int msprt_decide_at_cap(const LogLikState& state, const MsprtRule& rule) {
    const int k = static_cast<int>(state.logf_theta.size());
    int best = 0;
    double best_margin = kNegInf;
    for (int j = 0; j < k; ++j) {
        double margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
            if (i == j) continue;
            margin = std::min(margin, state.logf_theta[j] - state.logf_theta[i] -
                                          rule.log_thresholds(i, j));
        }
        if (margin > best_margin) {
            best_margin = margin;
            best = j;
        }
    }
    return best;
}

TwoSidedSummary two_sided_wrap(const TestReport& report, const TestSpec& spec,
                               int null_index) {
    if (spec.k() != 3)
        throw std::invalid_argument("two_sided_wrap: three hypotheses required");
    if (null_index < 0 || null_index >= spec.k())
        throw std::invalid_argument("two_sided_wrap: null index out of range");

    const Matrix alpha = report.alpha_matrix(spec);
    TwoSidedSummary out;
    for (int j = 0; j < spec.k(); ++j)
        if (j != null_index) out.alpha += alpha(null_index, j);
    for (int i = 0; i < spec.k(); ++i) {
        if (i == null_index) continue;
        double beta = 0.0;
        for (int j = 0; j < spec.k(); ++j)
            if (j != i) beta += alpha(i, j);
        out.beta.push_back(beta);
        out.alternative_index.push_back(i);
    }
    return out;
}

}  // namespace seqtest
