#include "rislab/quadrature.hpp"

#include <cmath>
#include <numeric>

#include "rislab/errors.hpp"

namespace rislab {

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th root, refined by Newton.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double derivative = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            derivative = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / derivative;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

AngularGrid AngularGrid::hemisphere(int theta_nodes, int phi_nodes) {
    if (theta_nodes < 1 || phi_nodes < 1) {
        throw DomainError("AngularGrid: node counts must be positive");
    }
    const QuadratureRule gl = gauss_legendre(theta_nodes);
    AngularGrid grid;
    grid.nodes_.reserve(static_cast<std::size_t>(theta_nodes) * phi_nodes);
    grid.weights_.reserve(grid.nodes_.capacity());
    const double dphi = kTwoPi / phi_nodes;
    for (int i = 0; i < theta_nodes; ++i) {
        // Map [-1, 1] onto cos(theta) in [0, 1].
        const double c = 0.5 * (gl.nodes[i] + 1.0);
        const double theta = std::acos(c);
        const double w_theta = 0.5 * gl.weights[i];
        for (int j = 0; j < phi_nodes; ++j) {
            const double phi = -kPi + (j + 0.5) * dphi;
            grid.nodes_.push_back({theta, phi});
            grid.weights_.push_back(w_theta * dphi);
        }
    }
    return grid;
}

AngularGrid AngularGrid::from_nodes(std::vector<Direction> nodes, std::vector<double> weights) {
    if (nodes.size() != weights.size()) {
        throw ConfigurationError("AngularGrid: node and weight counts differ");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(weights[i] > 0.0)) throw ConfigurationError("AngularGrid: weights must be positive");
        if (!(nodes[i].theta >= 0.0 && nodes[i].theta <= 0.5 * kPi)) {
            throw DomainError("AngularGrid: theta outside [0, pi/2]");
        }
    }
    AngularGrid grid;
    grid.nodes_ = std::move(nodes);
    grid.weights_ = std::move(weights);
    return grid;
}

double AngularGrid::total_weight() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

}  // namespace rislab
