#ifndef RISLAB_QUADRATURE_HPP
#define RISLAB_QUADRATURE_HPP

#include <cstddef>
#include <vector>

#include "rislab/types.hpp"

namespace rislab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(int n);

/// Quadrature on the front hemisphere for the measure sin(theta) dphi dtheta.
///
/// The default grid is Gauss-Legendre in cos(theta) on [0, 1] crossed with a
/// uniform trapezoid rule in phi, which is spectrally accurate for periodic
/// integrands. Weights sum to 2*pi.
class AngularGrid {
public:
    static constexpr int kDefaultThetaNodes = 64;
    static constexpr int kDefaultPhiNodes = 128;

    AngularGrid() = default;

    static AngularGrid hemisphere(int theta_nodes = kDefaultThetaNodes,
                                  int phi_nodes = kDefaultPhiNodes);

    /// Arbitrary node list; weights must be positive.
    static AngularGrid from_nodes(std::vector<Direction> nodes, std::vector<double> weights);

    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    const Direction& node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<Direction>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double total_weight() const;

private:
    std::vector<Direction> nodes_;
    std::vector<double> weights_;
};

}  // namespace rislab

#endif  // RISLAB_QUADRATURE_HPP
