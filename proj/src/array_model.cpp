#include "rislab/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rislab/errors.hpp"
#include "rislab/special_functions.hpp"

namespace rislab {
namespace {

constexpr double kNegativeEigenTolerance = 1e-10;
constexpr double kPassivityTolerance = 1e-6;

void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 0.5 * kPi)) {
        throw DomainError("theta must lie in [0, pi/2], got " + std::to_string(theta));
    }
}

CVector phase_ramp(int n, double spatial_frequency) {
    CVector v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = std::polar(1.0, -kTwoPi * spatial_frequency * i);
    }
    return v;
}

CMatrix synthesize_s_matrix(const RMatrix& u, const RVector& lambda) {
    RVector root(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double l = lambda(i);
        if (l < -kNegativeEigenTolerance || l > 1.0 + kPassivityTolerance) {
            throw InadmissiblePatternError("inadmissible pattern: coupling eigenvalue " +
                                           std::to_string(l) + " outside [0, 1]");
        }
        root(i) = std::sqrt(1.0 - std::clamp(l, 0.0, 1.0));
    }
    const RMatrix s = u * root.asDiagonal() * u.transpose();
    // Symmetrize away rounding so reciprocity holds to machine precision.
    return (0.5 * (s + s.transpose())).cast<cdouble>();
}

}  // namespace

ArrayGeometry::ArrayGeometry(int n_side, double spacing) : n_side_(n_side), spacing_(spacing) {
    if (n_side < 1) throw DomainError("ArrayGeometry: n_side must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw DomainError("ArrayGeometry: spacing must be positive");
    }
}

CVector steering_vector(const ArrayGeometry& geom, double theta, double phi) {
    check_theta(theta);
    const double a = geom.spacing();
    const double ky = a * std::sin(theta) * std::sin(phi);
    const double kx = a * std::sin(theta) * std::cos(phi);
    const int n = geom.n_side();
    const CVector vy = phase_ramp(n, ky);
    const CVector vx = phase_ramp(n, kx);
    CVector out(geom.element_count());
    for (int l = 0; l < n; ++l) {
        out.segment(l * n, n) = vy(l) * vx;
    }
    return out;
}

double effective_area(const ArrayGeometry& geom, double theta) {
    check_theta(theta);
    // cos(pi/2) is 6e-17 in floating point; report the exact zero.
    const double c = (theta == 0.5 * kPi) ? 0.0 : std::cos(theta);
    return geom.spacing() * geom.spacing() * c;
}

CVector embedded_pattern(const ArrayGeometry& geom, double theta, double phi) {
    const double amplitude = std::sqrt(effective_area(geom, theta));
    return amplitude * steering_vector(geom, theta, phi);
}

RMatrix coupling_matrix(const ArrayGeometry& geom) {
    const int n = geom.n_side();
    const int m = geom.element_count();
    const double a = geom.spacing();
    RMatrix b(m, m);
    for (int i = 0; i < m; ++i) {
        const int li = i / n;
        const int ki = i % n;
        b(i, i) = kPi * a * a;
        for (int j = i + 1; j < m; ++j) {
            const double dx = ki - j % n;
            const double dy = li - j / n;
            const double d = std::hypot(dx, dy);
            const double value = a * bessel_j1(kTwoPi * a * d) / d;
            b(i, j) = value;
            b(j, i) = value;
        }
    }
    return b;
}

CMatrix coupling_matrix_by_quadrature(const ArrayGeometry& geom, const AngularGrid& grid) {
    const int m = geom.element_count();
    CMatrix b = CMatrix::Zero(m, m);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CVector s = embedded_pattern(geom, grid.node(i));
        b.noalias() += grid.weight(i) * (s * s.adjoint());
    }
    return b;
}

CMatrix scattering_matrix(const RMatrix& coupling) {
    if (coupling.rows() != coupling.cols()) {
        throw DomainError("scattering_matrix: coupling matrix must be square");
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(coupling);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("scattering_matrix: eigendecomposition failed");
    }
    return synthesize_s_matrix(eig.eigenvectors(), eig.eigenvalues());
}

CoupledArray::CoupledArray(ArrayGeometry geom) : geom_(geom), coupling_(coupling_matrix(geom_)) {
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(coupling_);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("CoupledArray: eigendecomposition failed");
    }
    eigenvectors_ = eig.eigenvectors();
    eigenvalues_ = eig.eigenvalues();
    s_aa_ = synthesize_s_matrix(eigenvectors_, eigenvalues_);
    s_aa_norm_ = std::sqrt(1.0 - std::clamp(eigenvalues_.minCoeff(), 0.0, 1.0)) * (1.0 + 1e-12);
}

double CoupledArray::projected_power(const CVector& received, double rcond) const {
    const CVector modal = eigenvectors_.transpose().cast<cdouble>() * received;
    const double cutoff = rcond * eigenvalues_.maxCoeff();
    double total = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
        if (eigenvalues_(i) > cutoff) total += std::norm(modal(i)) / eigenvalues_(i);
    }
    return total;
}

CMatrix dft_matrix(int m) {
    if (m < 1) throw DomainError("dft_matrix: size must be >= 1");
    CMatrix f(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int k = 0; k < m; ++k) {
        for (int n = 0; n < m; ++n) {
            // Reduce k*n mod m first so large indices keep full phase accuracy.
            const long long r = (static_cast<long long>(k) * n) % m;
            f(k, n) = std::polar(scale, -kTwoPi * static_cast<double>(r) / m);
        }
    }
    return f;
}

CMatrix dft_matrix_2d(int n_side) {
    const CMatrix f = dft_matrix(n_side);
    const int m = n_side * n_side;
    CMatrix out(m, m);
    for (int r = 0; r < n_side; ++r) {
        for (int c = 0; c < n_side; ++c) {
            out.block(r * n_side, c * n_side, n_side, n_side) = f(r, c) * f;
        }
    }
    return out;
}

BeamFrequency beam_frequency(const ArrayGeometry& geom, int beam) {
    const int n = geom.n_side();
    if (beam < 0 || beam >= geom.element_count()) {
        throw DomainError("beam_frequency: beam index out of range");
    }
    auto wrap = [n](int index) {
        int p = (n - index) % n;  // port index -p (mod n) carries frequency p / n
        if (2 * p > n) p -= n;
        return static_cast<double>(p) / n;
    };
    return {wrap(beam % n), wrap(beam / n)};
}

int beam_index(const ArrayGeometry& geom, int p, int q) {
    const int n = geom.n_side();
    auto port = [n](int f) { return ((-f % n) + n) % n; };
    return port(q) * n + port(p);
}

std::optional<Direction> beam_direction(const ArrayGeometry& geom, int beam) {
    const BeamFrequency k = beam_frequency(geom, beam);
    const double radial = std::hypot(k.kx, k.ky) / geom.spacing();
    if (radial > 1.0 + 1e-12) return std::nullopt;
    const double theta = std::asin(std::min(radial, 1.0));
    const double phi = (radial == 0.0) ? 0.0 : std::atan2(k.ky, k.kx);
    return Direction{theta, phi};
}

}  // namespace rislab
