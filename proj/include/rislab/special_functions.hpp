#ifndef RISLAB_SPECIAL_FUNCTIONS_HPP
#define RISLAB_SPECIAL_FUNCTIONS_HPP

namespace rislab {

/// Bessel function of the first kind, order one.
///
/// Ascending power series below |x| = 12, Hankel asymptotic expansion above.
/// Absolute error is below 1e-11 over the real line.
double bessel_j1(double x);

}  // namespace rislab

#endif  // RISLAB_SPECIAL_FUNCTIONS_HPP
