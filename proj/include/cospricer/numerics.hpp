#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace cospricer::numerics {

/// Pairwise summation; the rounding order depends only on the length.
double pairwise_sum(std::span<const double> xs);

/// Running compensated (Neumaier) sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Adaptive Simpson quadrature on [a, b] with absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40);

/// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace cospricer::numerics
