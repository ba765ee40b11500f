#include "seqtest/test_spec.hpp"

#include <cmath>
#include <string>

namespace seqtest {

namespace {

void validate(const Model& model, const std::vector<double>& thetas,
              const std::vector<double>& evals, const std::vector<double>& gammas,
              const Matrix& lambdas, const Horizon& horizon) {
    const int k = static_cast<int>(thetas.size());
    const int K = static_cast<int>(evals.size());
    if (k < 2) throw std::invalid_argument("TestSpec: need at least 2 hypotheses");
    if (K < 1) throw std::invalid_argument("TestSpec: need at least 1 evaluation point");
    if (static_cast<int>(gammas.size()) != K)
        throw std::invalid_argument("TestSpec: gammas must match evals in length");
    if (lambdas.rows() != k || lambdas.cols() != k)
        throw std::invalid_argument("TestSpec: lambdas must be k x k");
    if (horizon.cap < 1) throw std::invalid_argument("TestSpec: horizon must be positive");

    double gsum = 0.0;
    for (double g : gammas) {
        if (!(g > 0.0)) throw std::invalid_argument("TestSpec: all gammas must be positive");
        gsum += g;
    }
    if (std::abs(gsum - 1.0) > 1e-12)
        throw std::invalid_argument("TestSpec: gammas must sum to 1 (within 1e-12)");

    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            if (!(lambdas(i, j) >= 0.0))
                throw std::invalid_argument("TestSpec: lambdas must be non-negative");
        }
    // Non-triviality: for every j, sum over i != j of lambda_ij must exceed 1,
    // otherwise accepting H_j without observations beats any sampling test.
    for (int j = 0; j < k; ++j) {
        double col = 0.0;
        for (int i = 0; i < k; ++i)
            if (i != j) col += lambdas(i, j);
        if (!(col > 1.0))
            throw std::invalid_argument(
                "TestSpec: non-triviality violated: sum_{i!=j} lambda_ij <= 1 for j = " +
                std::to_string(j + 1));
    }

    auto check_points = [&](const std::vector<double>& pts, const char* what) {
        for (size_t a = 0; a < pts.size(); ++a) {
            if (!valid_parameter(model, pts[a]))
                throw std::invalid_argument(std::string("TestSpec: invalid ") + what +
                                            " for model " + to_string(model.kind));
            for (size_t b = a + 1; b < pts.size(); ++b)
                if (pts[a] == pts[b])
                    throw std::invalid_argument(std::string("TestSpec: duplicate ") + what);
        }
    };
    check_points(thetas, "theta");
    check_points(evals, "eval point");

    if (model.kind == ModelKind::GroupedNormal && model.group_size < 1)
        throw std::invalid_argument("TestSpec: group_size must be >= 1");
}

}  // namespace

TestSpec::TestSpec(Model model, std::vector<double> thetas, std::vector<double> evals,
                   std::vector<double> gammas, Matrix lambdas, Horizon horizon)
    : model_(model),
      thetas_(std::move(thetas)),
      evals_(std::move(evals)),
      gammas_(std::move(gammas)),
      lambdas_(std::move(lambdas)),
      horizon_(horizon) {
    validate(model_, thetas_, evals_, gammas_, lambdas_, horizon_);
}

bool TestSpec::bayesian() const { return evals_ == thetas_; }

TestSpec TestSpec::with_lambdas(Matrix lambdas) const {
    return TestSpec(model_, thetas_, evals_, gammas_, std::move(lambdas), horizon_);
}

TestSpec TestSpec::with_evals(std::vector<double> evals, std::vector<double> gammas) const {
    return TestSpec(model_, thetas_, std::move(evals), std::move(gammas), lambdas_, horizon_);
}

}  // namespace seqtest
