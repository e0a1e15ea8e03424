#ifndef RISLAB_ARRAY_MODEL_HPP
#define RISLAB_ARRAY_MODEL_HPP

#include <optional>

#include "rislab/quadrature.hpp"
#include "rislab/types.hpp"

namespace rislab {

/// Square n x n uniform planar array. All lengths are in wavelengths.
///
/// Element (row l along y, column k along x) has linear index l * n + k, which
/// matches the y-vector (x) x-vector Kronecker ordering of the steering vector.
class ArrayGeometry {
public:
    ArrayGeometry(int n_side, double spacing);

    int n_side() const { return n_side_; }
    /// Inter-element spacing a / lambda.
    double spacing() const { return spacing_; }
    int element_count() const { return n_side_ * n_side_; }
    /// Aperture area M a^2 in lambda^2.
    double area() const { return element_count() * spacing_ * spacing_; }

private:
    int n_side_;
    double spacing_;
};

/// Plane-wave phase response; unit modulus entries.
CVector steering_vector(const ArrayGeometry& geom, double theta, double phi);
inline CVector steering_vector(const ArrayGeometry& geom, Direction d) {
    return steering_vector(geom, d.theta, d.phi);
}

/// Cosine-shaped embedded element effective area a^2 cos(theta), in lambda^2.
double effective_area(const ArrayGeometry& geom, double theta);

/// Embedded far-field pattern sqrt(A_e(theta)) * a(theta, phi).
CVector embedded_pattern(const ArrayGeometry& geom, double theta, double phi);
inline CVector embedded_pattern(const ArrayGeometry& geom, Direction d) {
    return embedded_pattern(geom, d.theta, d.phi);
}

/// Closed-form embedded-pattern coupling matrix B for the cosine pattern
/// (Bessel kernel). Real symmetric, exactly.
RMatrix coupling_matrix(const ArrayGeometry& geom);

/// The same matrix evaluated as the hemisphere integral of s s^H over a grid.
/// Slow; used as a diagnostic against the closed form.
CMatrix coupling_matrix_by_quadrature(const ArrayGeometry& geom, const AngularGrid& grid);

/// Lossless reciprocal terminal S-matrix U sqrt(I - Lambda) U^T with all
/// signs +1. Eigenvalues in [-1e-10, 0) and (1, 1 + 1e-6] are clamped;
/// anything further out throws InadmissiblePatternError.
CMatrix scattering_matrix(const RMatrix& coupling);

/// The array together with its coupling matrix, terminal S-matrix and the
/// spectral decomposition of B. Immutable after construction.
class CoupledArray {
public:
    explicit CoupledArray(ArrayGeometry geom);

    const ArrayGeometry& geometry() const { return geom_; }
    int size() const { return geom_.element_count(); }
    const RMatrix& coupling() const { return coupling_; }
    const CMatrix& s_aa() const { return s_aa_; }
    const RMatrix& eigenvectors() const { return eigenvectors_; }
    /// Ascending eigenvalues of B, before clamping.
    const RVector& eigenvalues() const { return eigenvalues_; }
    /// ||S_aa||_2 = sqrt(1 - lambda_min(B)), slightly rounded up.
    double s_aa_norm() const { return s_aa_norm_; }

    CVector pattern(Direction d) const { return embedded_pattern(geom_, d); }

    /// x^H B^+ x: the part of an incident field that projects onto the span of
    /// the element patterns (Bessel bound). Eigenvalues below rcond * max are
    /// treated as zero.
    double projected_power(const CVector& received, double rcond = 1e-12) const;

private:
    ArrayGeometry geom_;
    RMatrix coupling_;
    RMatrix eigenvectors_;
    RVector eigenvalues_;
    CMatrix s_aa_;
    double s_aa_norm_ = 1.0;
};

/// Unitary symmetric DFT matrix with entries exp(-2 pi j k n / M) / sqrt(M).
CMatrix dft_matrix(int m);

/// Two-dimensional DFT over the element grid: dft_matrix(n) (x) dft_matrix(n).
CMatrix dft_matrix_2d(int n_side);

/// Spatial frequency (k_x, k_y), in cycles per element, of a 2D DFT beam port.
/// F2 * steering_vector equals sqrt(M) times the unit vector of that port when
/// the steering direction lies on the DFT grid.
struct BeamFrequency {
    double kx = 0.0;
    double ky = 0.0;
};
BeamFrequency beam_frequency(const ArrayGeometry& geom, int beam);

/// Beam port whose DFT column matches spatial frequency (p/n, q/n).
int beam_index(const ArrayGeometry& geom, int p, int q);

/// Far-field direction of a beam port, or nullopt outside the visible region.
std::optional<Direction> beam_direction(const ArrayGeometry& geom, int beam);

}  // namespace rislab

#endif  // RISLAB_ARRAY_MODEL_HPP
