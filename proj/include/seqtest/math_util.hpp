#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace seqtest {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Dense row-major matrix of doubles, just big enough for k x k loss/threshold
// tables and report error matrices.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * cols_ + j]; }
    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    bool operator==(const Matrix&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

// log(exp(a) + exp(b)), anchored at the larger argument.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (a == kNegInf) return kNegInf;           // both are zero densities
    return a + std::log1p(std::exp(b - a));
}

// log sum_i exp(x_i), anchored at the maximum entry.  Returns -inf iff all
// entries are -inf (all densities zero).  NaN input is a caller bug.
inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs)
        if (x > m) m = x;
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

// Lower tail quantile of the standard normal distribution (Wichura's
// algorithm AS 241, PPND16): relative accuracy about 1e-15 over (0,1).
// Deterministic across platforms, which keeps Monte Carlo seeds portable.
double inverse_normal_cdf(double p);

}  // namespace seqtest
