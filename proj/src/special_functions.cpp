#include "rislab/special_functions.hpp"

#include <cmath>

#include "rislab/types.hpp"

namespace rislab {
namespace {

constexpr double kSeriesLimit = 12.0;

double j1_power_series(double x) {
    const double half = 0.5 * x;
    const double q = -half * half;
    double term = half;
    double sum = term;
    for (int k = 0; k < 200; ++k) {
        term *= q / ((k + 1.0) * (k + 2.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) && k > half) break;
    }
    return sum;
}

// Hankel expansion of J_1 with mu = 4 nu^2 = 4; terms alternate between P and Q.
double j1_asymptotic(double x) {
    constexpr double mu = 4.0;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double previous = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) > std::abs(previous)) break;  // series starts diverging
        // k = 1, 2, 3, 4, ... contributes +Q, -P, -Q, +P, ...
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
        if (std::abs(term) < 1e-17) break;
        previous = term;
    }
    const double omega = x - 0.75 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(omega) - q * std::sin(omega));
}

}  // namespace

double bessel_j1(double x) {
    if (x < 0.0) return -bessel_j1(-x);
    if (x < kSeriesLimit) return j1_power_series(x);
    return j1_asymptotic(x);
}

}  // namespace rislab
