#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace emuq {

/// Neumaier-compensated accumulator. Sequential and deterministic; the
/// compensation keeps long reductions accurate enough that trace ratios are
/// stable under component duplication.
class KahanSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) noexcept {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value();
}

inline double compensated_mean(std::span<const double> values) noexcept {
    if (values.empty()) return 0.0;
    return compensated_sum(values) / static_cast<double>(values.size());
}

/// Golden-section minimization on [a, b] down to interval width xtol.
/// Assumes unimodality on the bracket; callers pre-bracket with a coarse scan.
template <typename F>
double golden_minimize(F&& f, double a, double b, double xtol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;   // 0.618...
    const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0;  // 0.382...
    double h = b - a;
    if (h <= xtol) return (a + b) / 2.0;
    double x1 = a + invphi2 * h, x2 = a + invphi * h;
    double f1 = f(x1), f2 = f(x2);
    while (h > xtol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            h = b - a;
            x1 = a + invphi2 * h;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            h = b - a;
            x2 = a + invphi * h;
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace emuq
