#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace ttbeam {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double dbm_to_watt(double dbm) { return db_to_linear(dbm) / 1000.0; }

// Compensated summation so aggregate results do not depend on accumulation
// quirks of the surrounding loop structure.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Streaming mean / standard error over scalar samples.
class MeanAccumulator {
public:
    void add(double x) {
        sum_.add(x);
        sumsq_.add(x * x);
        ++n_;
    }
    long count() const { return n_; }
    double mean() const {
        if (n_ == 0) throw std::logic_error("MeanAccumulator: empty");
        return sum_.value() / static_cast<double>(n_);
    }
    // Standard error of the mean (population variance estimate with n-1).
    double stderr_mean() const {
        if (n_ < 2) return 0.0;
        double n = static_cast<double>(n_);
        double m = mean();
        double var = (sumsq_.value() - n * m * m) / (n - 1.0);
        if (var < 0.0) var = 0.0;
        return std::sqrt(var / n);
    }

private:
    KahanSum sum_;
    KahanSum sumsq_;
    long n_ = 0;
};

}  // namespace ttbeam
