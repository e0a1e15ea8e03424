#ifndef RISLAB_TYPES_HPP
#define RISLAB_TYPES_HPP

#include <complex>

#include <Eigen/Dense>

namespace rislab {

using cdouble = std::complex<double>;

using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Direction on the front hemisphere: elevation theta in [0, pi/2], azimuth phi.
struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

}  // namespace rislab

#endif  // RISLAB_TYPES_HPP
