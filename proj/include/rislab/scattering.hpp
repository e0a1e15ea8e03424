#ifndef RISLAB_SCATTERING_HPP
#define RISLAB_SCATTERING_HPP

#include <utility>
#include <vector>

#include "rislab/array_model.hpp"
#include "rislab/quadrature.hpp"
#include "rislab/types.hpp"

namespace rislab {

/// Terminal load of the array ports.
///
/// Phased: diagonal unitary Diag(exp(j phi_m)).
/// SwitchedDft: F S' F where S' is a partial symmetric permutation of beam
///   ports. Each connection (i, j) closes a back-to-back switch between two
///   beam ports; (i, i) shorts a port back onto itself. Every port that is not
///   connected is absorbed by a matched load.
/// Zero: all ports matched.
/// ActiveScaled: another load multiplied by a uniform amplifier gain.
class LoadConfig {
public:
    enum class Kind { Phased, SwitchedDft, Zero, ActiveScaled };
    using Connection = std::pair<int, int>;

    static LoadConfig phased(std::vector<double> phases);
    static LoadConfig switched_dft(std::vector<Connection> connections,
                                   std::vector<int> absorbed = {});
    static LoadConfig zero();
    static LoadConfig active(LoadConfig inner, double gain);

    Kind kind() const { return kind_; }
    const std::vector<double>& phases() const { return phases_; }
    const std::vector<Connection>& connections() const { return connections_; }
    const std::vector<int>& absorbed() const { return absorbed_; }
    double gain() const { return gain_; }
    const LoadConfig& inner() const { return inner_.front(); }

private:
    LoadConfig() = default;

    Kind kind_ = Kind::Zero;
    std::vector<double> phases_;
    std::vector<Connection> connections_;
    std::vector<int> absorbed_;
    double gain_ = 1.0;
    std::vector<LoadConfig> inner_;  // exactly one element for ActiveScaled
};

/// Beam-domain switch matrix S' of a SwitchedDft load (validated).
RMatrix beam_permutation(const LoadConfig& cfg, int m);

/// Realize S_L using the given (symmetric unitary) beamspace transform.
CMatrix realize_load(const LoadConfig& cfg, const CMatrix& transform);
/// Realize S_L with the one-dimensional M-point DFT.
CMatrix realize_load(const LoadConfig& cfg, int m);
/// Realize S_L for a planar array: SwitchedDft uses the 2D DFT over the grid.
CMatrix realize_load(const LoadConfig& cfg, const ArrayGeometry& geom);

/// Spectral radius of a square matrix.
double spectral_radius(const CMatrix& a);

/// Largest singular value by power iteration on A^H A
/// (relative tolerance 1e-10, at most 10000 iterations).
double spectral_norm(const CMatrix& a);

/// Total port transfer T = (I - S_L S_aa)^{-1} S_L.
///
/// Equal to (S_L^{-1} - S_aa)^{-1} whenever S_L is invertible, and still
/// defined for absorptive (singular) loads. Throws InstabilityError when the
/// spectral radius of S_L S_aa is not below 1 - 1e-9.
CMatrix exact_transfer(const CMatrix& s_aa, const CMatrix& s_l);
/// Same, with a known upper bound on ||S_aa||_2 used to skip the eigensolve.
CMatrix exact_transfer(const CMatrix& s_aa, const CMatrix& s_l, double s_aa_norm);

/// Upper bound on ||A||_2: sqrt(||A||_1 ||A||_inf) when that is at most one,
/// otherwise the largest singular value from the Hermitian eigensolver.
double spectral_norm_bound(const CMatrix& a);

/// 1 - ||S_L S_aa||_2; positive iff the loop is stable in the norm sense.
double stability_margin(const CMatrix& s_aa, const CMatrix& s_l);

/// Plane wave impinging from `direction`. `solid_angle` is the quadrature
/// weight the wave stands for, so sum(solid_angle * |amplitude|^2) is the
/// discretized incident power.
struct PlaneWave {
    Direction direction;
    cdouble amplitude{0.0, 0.0};
    double solid_angle = 1.0;
};
using PlaneWaveSet = std::vector<PlaneWave>;

/// Sum over the set of solid_angle * |amplitude|^2.
double impinging_power(const PlaneWaveSet& incident);

/// Port-side received vector x = sum_i s(theta_i, phi_i) amplitude_i w_i.
CVector received_vector(const CoupledArray& array, const PlaneWaveSet& incident);

struct FarFieldSpectrum {
    AngularGrid grid;
    std::vector<cdouble> values;
};

/// Exact: total scattering with the mutual-coupling loop.
/// Naive: S_aa = 0 approximation (T = S_L).
enum class ScatterModel { Exact, Naive };

/// T for the chosen model.
CMatrix port_transfer(const CoupledArray& array, const CMatrix& s_l, ScatterModel model);

/// s(outgoing)^T T s(incident), solving for one right-hand side instead of
/// forming T.
cdouble path_amplitude(const CoupledArray& array, const CMatrix& s_l, Direction incident,
                       Direction outgoing, ScatterModel model);
/// The same for several (incident, outgoing) pairs under one factorization.
std::vector<cdouble> path_amplitudes(const CoupledArray& array, const CMatrix& s_l,
                                     const std::vector<std::pair<Direction, Direction>>& paths,
                                     ScatterModel model);

/// Outgoing spectrum b(theta, phi) = s(theta, phi)^T T x on `out_grid`.
/// The residual structural back-scattering is zero in this model.
FarFieldSpectrum scatter(const CoupledArray& array, const CMatrix& s_l,
                         const PlaneWaveSet& incident, const AngularGrid& out_grid,
                         ScatterModel model);
FarFieldSpectrum scatter(const CoupledArray& array, const LoadConfig& load,
                         const PlaneWaveSet& incident, const AngularGrid& out_grid,
                         ScatterModel model);

/// Quadrature power sum w |b|^2.
double scattered_power(const FarFieldSpectrum& spectrum);

/// Angular re-radiation kernel s^T T B T^H s^* for a fixed load, shared by the
/// noise and interference densities. Builds T (exact model) once.
class ReradiationKernel {
public:
    ReradiationKernel(const CoupledArray& array, const CMatrix& s_l);

    /// s(theta, phi)^T T B T^H s(theta, phi)^*, real and >= 0.
    double operator()(double theta, double phi) const;
    const CMatrix& transfer() const { return transfer_; }
    /// The kernel integrated over the hemisphere, trace(T B T^H B).
    double hemisphere_integral() const;

private:
    const CoupledArray* array_;
    CMatrix transfer_;
    CMatrix kernel_;  // T B T^H
};

/// Radiated amplifier noise density
/// NF_inf * N0 * max(s^T T B T^H s^* - (A / lambda^2) cos(theta), 0).
double noise_density(const CoupledArray& array, const CMatrix& s_l, double theta, double phi,
                     double n0, double nf_inf);
double noise_density(const ReradiationKernel& kernel, const ArrayGeometry& geom, double theta,
                     double phi, double n0, double nf_inf);

/// Re-radiated interference density N_I * s^T T B T^H s^*.
double interference_density(const CoupledArray& array, const CMatrix& s_l, double theta,
                            double phi, double n_i);
double interference_density(const ReradiationKernel& kernel, double theta, double phi,
                            double n_i);

}  // namespace rislab

#endif  // RISLAB_SCATTERING_HPP
