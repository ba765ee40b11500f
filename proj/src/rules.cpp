#include "seqtest/rules.hpp"

#include <cmath>

#include "seqtest/report.hpp"

namespace seqtest {

double log_weighted_density(const LogLikState& state, std::span<const double> gammas) {
    if (gammas.size() != state.logf_eval.size())
        throw std::invalid_argument("log_weighted_density: dimension mismatch");
    double m = kNegInf;
    for (size_t i = 0; i < gammas.size(); ++i)
        m = std::max(m, std::log(gammas[i]) + state.logf_eval[i]);
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (size_t i = 0; i < gammas.size(); ++i)
        acc += std::exp(std::log(gammas[i]) + state.logf_eval[i] - m);
    return m + std::log(acc);
}

std::vector<double> log_risk_candidates(const LogLikState& state, const Matrix& lambdas) {
    const int k = static_cast<int>(state.logf_theta.size());
    if (lambdas.rows() != k || lambdas.cols() != k)
        throw std::invalid_argument("log_risk_candidates: dimension mismatch");
    DbcKernel kernel(lambdas, std::vector<double>{1.0});
    std::vector<double> out(k);
    for (int j = 0; j < k; ++j) out[j] = kernel.log_risk(state.logf_theta, j);
    return out;
}

Verdict dbc_verdict(const LogLikState& state, const TestSpec& spec) {
    if (state.n < 1) return {};  // the rules start at n >= 1
    return DbcKernel(spec).verdict(state.logf_theta, state.logf_eval);
}

std::vector<double> posterior(const LogLikState& state, std::span<const double> gammas) {
    if (gammas.size() != state.logf_theta.size())
        throw std::invalid_argument("posterior: dimension mismatch (needs evals == thetas)");
    const size_t k = gammas.size();
    std::vector<double> lw(k);
    double m = kNegInf;
    for (size_t i = 0; i < k; ++i) {
        lw[i] = std::log(gammas[i]) + state.logf_theta[i];
        m = std::max(m, lw[i]);
    }
    if (m == kNegInf) throw std::domain_error("posterior: all densities are zero");
    double acc = 0.0;
    for (size_t i = 0; i < k; ++i) {
        lw[i] = std::exp(lw[i] - m);
        acc += lw[i];
    }
    for (double& p : lw) p /= acc;
    return lw;
}

double lagrangian(const TestReport& report, const TestSpec& spec) {
    const Matrix alpha = report.alpha_matrix(spec);
    double acc = report.weighted_ess;
    for (int i = 0; i < spec.k(); ++i)
        for (int j = 0; j < spec.k(); ++j)
            if (i != j) acc += spec.lambdas()(i, j) * alpha(i, j);
    return acc;
}

DbcKernel::DbcKernel(const Matrix& lambdas, std::span<const double> gammas)
    : k_(lambdas.rows()), log_lambda_(lambdas.rows(), lambdas.cols()), log_gamma_(gammas.size()) {
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j)
            log_lambda_(i, j) = (i == j || lambdas(i, j) == 0.0) ? kNegInf
                                                                 : std::log(lambdas(i, j));
    for (size_t i = 0; i < gammas.size(); ++i) log_gamma_[i] = std::log(gammas[i]);
}

double DbcKernel::log_risk(std::span<const double> logf_theta, int j) const {
    double m = kNegInf;
    int anchor = -1;
    for (int i = 0; i < k_; ++i) {
        if (i == j) continue;
        const double t = log_lambda_(i, j) + logf_theta[i];
        if (t > m) {
            m = t;
            anchor = i;
        }
    }
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (int i = 0; i < k_; ++i) {
        if (i == j) continue;
        acc += i == anchor ? 1.0 : std::exp(log_lambda_(i, j) + logf_theta[i] - m);
    }
    return m + std::log(acc);
}

std::pair<double, int> DbcKernel::min_log_risk(std::span<const double> logf_theta) const {
    double best = kNegInf;
    int arg = -1;
    for (int j = 0; j < k_; ++j) {
        const double r = log_risk(logf_theta, j);
        if (arg < 0 || r < best) {
            best = r;
            arg = j;
        }
    }
    return {best, arg};
}

double DbcKernel::log_weighted(std::span<const double> logf_eval) const {
    double m = kNegInf;
    size_t anchor = 0;
    const size_t K = log_gamma_.size();
    for (size_t i = 0; i < K; ++i) {
        const double t = log_gamma_[i] + logf_eval[i];
        if (t > m) {
            m = t;
            anchor = i;
        }
    }
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (size_t i = 0; i < K; ++i)
        acc += i == anchor ? 1.0 : std::exp(log_gamma_[i] + logf_eval[i] - m);
    return m + std::log(acc);
}

Matrix TestReport::alpha_matrix(const TestSpec& spec) const {
    const int k = spec.k();
    Matrix alpha(k, k, 0.0);
    for (int i = 0; i < k; ++i) {
        const ParamResult* r = find(spec.thetas()[i]);
        if (!r) throw std::logic_error("TestReport: missing result for a hypothesis point");
        for (int j = 0; j < k; ++j) alpha(i, j) = r->accept[j];
    }
    return alpha;
}

std::vector<double> TestReport::alpha_i(const TestSpec& spec) const {
    const Matrix alpha = alpha_matrix(spec);
    std::vector<double> out(spec.k());
    for (int i = 0; i < spec.k(); ++i) out[i] = 1.0 - alpha(i, i);
    return out;
}

}  // namespace seqtest
