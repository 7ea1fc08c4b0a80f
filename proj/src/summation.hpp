#pragma once

#include <cmath>
#include <span>

namespace dyadic {

/// Neumaier-compensated accumulator. The shell sums here mix terms spanning
/// many orders of magnitude (weights like 2^{2sj}), so plain summation loses
/// digits long before the tolerances in the diagnostics contracts.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace dyadic
