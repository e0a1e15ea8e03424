#include "rislab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "rislab/errors.hpp"

namespace rislab {
namespace {

constexpr double kStabilityTolerance = 1e-9;

void require_square(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols()) throw DomainError(std::string(what) + ": matrix must be square");
}

}  // namespace

LoadConfig LoadConfig::phased(std::vector<double> phases) {
    LoadConfig cfg;
    cfg.kind_ = Kind::Phased;
    cfg.phases_ = std::move(phases);
    return cfg;
}

LoadConfig LoadConfig::switched_dft(std::vector<Connection> connections, std::vector<int> absorbed) {
    LoadConfig cfg;
    cfg.kind_ = Kind::SwitchedDft;
    cfg.connections_ = std::move(connections);
    cfg.absorbed_ = std::move(absorbed);
    return cfg;
}

LoadConfig LoadConfig::zero() { return LoadConfig{}; }

LoadConfig LoadConfig::active(LoadConfig inner, double gain) {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw ConfigurationError("active load: gain must be positive");
    }
    LoadConfig cfg;
    cfg.kind_ = Kind::ActiveScaled;
    cfg.gain_ = gain;
    cfg.inner_.push_back(std::move(inner));
    return cfg;
}

RMatrix beam_permutation(const LoadConfig& cfg, int m) {
    if (cfg.kind() != LoadConfig::Kind::SwitchedDft) {
        throw ConfigurationError("beam_permutation: load is not a switched DFT load");
    }
    std::vector<int> uses(m, 0);
    std::vector<int> bad;
    auto touch = [&](int port) {
        if (port < 0 || port >= m) {
            throw ConfigurationError("switched load: port " + std::to_string(port) +
                                     " out of range [0, " + std::to_string(m) + ")");
        }
        if (++uses[port] == 2) bad.push_back(port);
    };
    RMatrix s = RMatrix::Zero(m, m);
    for (const auto& [i, j] : cfg.connections()) {
        touch(i);
        if (j != i) touch(j);
        s(i, j) = 1.0;
        s(j, i) = 1.0;
    }
    for (int port : cfg.absorbed()) touch(port);
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "switched load: overlapping connections at port(s)";
        for (int p : bad) msg << ' ' << p;
        throw ConfigurationError(msg.str());
    }
    return s;
}

CMatrix realize_load(const LoadConfig& cfg, const CMatrix& transform) {
    require_square(transform, "realize_load");
    const auto m = transform.rows();
    switch (cfg.kind()) {
        case LoadConfig::Kind::Phased: {
            if (static_cast<Eigen::Index>(cfg.phases().size()) != m) {
                throw ConfigurationError("phased load: expected " + std::to_string(m) +
                                         " phases, got " + std::to_string(cfg.phases().size()));
            }
            CMatrix s = CMatrix::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) s(i, i) = std::polar(1.0, cfg.phases()[i]);
            return s;
        }
        case LoadConfig::Kind::SwitchedDft: {
            const RMatrix perm = beam_permutation(cfg, static_cast<int>(m));
            return transform * perm.cast<cdouble>() * transform;
        }
        case LoadConfig::Kind::Zero:
            return CMatrix::Zero(m, m);
        case LoadConfig::Kind::ActiveScaled:
            return cfg.gain() * realize_load(cfg.inner(), transform);
    }
    throw ConfigurationError("realize_load: unknown load kind");
}

CMatrix realize_load(const LoadConfig& cfg, int m) { return realize_load(cfg, dft_matrix(m)); }

CMatrix realize_load(const LoadConfig& cfg, const ArrayGeometry& geom) {
    return realize_load(cfg, dft_matrix_2d(geom.n_side()));
}

double spectral_radius(const CMatrix& a) {
    require_square(a, "spectral_radius");
    if (a.size() == 0) return 0.0;
    Eigen::ComplexEigenSolver<CMatrix> eig(a, /*computeEigenvectors=*/false);
    if (eig.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver failed");
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    CVector v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cdouble(normal(rng), normal(rng));
    v.normalize();
    double estimate = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        const CVector av = a * v;
        const double next = av.squaredNorm();  // Rayleigh quotient of A^H A
        CVector w = a.adjoint() * av;
        const double wn = w.norm();
        if (wn == 0.0) return std::sqrt(next);
        v = w / wn;
        if (iter > 0 && std::abs(next - estimate) <= 1e-10 * next) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    return std::sqrt(estimate);
}

double spectral_norm_bound(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    const RMatrix mag = a.cwiseAbs();
    const double holder = std::sqrt(mag.colwise().sum().maxCoeff() * mag.rowwise().sum().maxCoeff());
    if (holder <= 1.0) return holder;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.adjoint() * a, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0)) * (1.0 + 1e-12);
}

CMatrix exact_transfer(const CMatrix& s_aa, const CMatrix& s_l) {
    require_square(s_aa, "exact_transfer");
    return exact_transfer(s_aa, s_l, spectral_norm_bound(s_aa));
}

namespace {

// LU factors of I - S_L S_aa after the stability check.
Eigen::PartialPivLU<CMatrix> loop_factor(const CMatrix& s_aa, const CMatrix& s_l, double s_aa_norm) {
    require_square(s_aa, "exact_transfer");
    require_square(s_l, "exact_transfer");
    if (s_aa.rows() != s_l.rows()) throw DomainError("exact_transfer: dimension mismatch");
    const auto m = s_l.rows();
    const CMatrix loop = s_l.isDiagonal(0.0) ? CMatrix(s_l.diagonal().asDiagonal() * s_aa) : CMatrix(s_l * s_aa);
    // The norm product certifies most passive loads without an eigensolve.
    if (!(spectral_norm_bound(s_l) * s_aa_norm < 1.0 - kStabilityTolerance)) {
        const double rho = spectral_radius(loop);
        if (!(rho < 1.0 - kStabilityTolerance)) {
            std::ostringstream msg;
            msg << "unstable load: spectral radius of S_L S_aa is " << rho;
            throw InstabilityError(msg.str());
        }
    }
    return (CMatrix::Identity(m, m) - loop).partialPivLu();
}

}  // namespace

CMatrix exact_transfer(const CMatrix& s_aa, const CMatrix& s_l, double s_aa_norm) {
    return loop_factor(s_aa, s_l, s_aa_norm).solve(s_l);
}

std::vector<cdouble> path_amplitudes(const CoupledArray& array, const CMatrix& s_l,
                                     const std::vector<std::pair<Direction, Direction>>& paths,
                                     ScatterModel model) {
    if (s_l.rows() != array.size() || s_l.cols() != array.size()) {
        throw DomainError("load size does not match the array");
    }
    CMatrix z(array.size(), static_cast<Eigen::Index>(paths.size()));
    for (std::size_t i = 0; i < paths.size(); ++i) z.col(i) = s_l * array.pattern(paths[i].first);
    if (model == ScatterModel::Exact) z = loop_factor(array.s_aa(), s_l, array.s_aa_norm()).solve(z);
    std::vector<cdouble> out(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        out[i] = array.pattern(paths[i].second).transpose() * z.col(i);
    }
    return out;
}

cdouble path_amplitude(const CoupledArray& array, const CMatrix& s_l, Direction incident,
                       Direction outgoing, ScatterModel model) {
    return path_amplitudes(array, s_l, {{incident, outgoing}}, model).front();
}

double stability_margin(const CMatrix& s_aa, const CMatrix& s_l) {
    return 1.0 - spectral_norm(s_l * s_aa);
}

double impinging_power(const PlaneWaveSet& incident) {
    double total = 0.0;
    for (const auto& wave : incident) total += wave.solid_angle * std::norm(wave.amplitude);
    return total;
}

CVector received_vector(const CoupledArray& array, const PlaneWaveSet& incident) {
    CVector x = CVector::Zero(array.size());
    for (const auto& wave : incident) {
        x += (wave.amplitude * wave.solid_angle) * array.pattern(wave.direction);
    }
    return x;
}

CMatrix port_transfer(const CoupledArray& array, const CMatrix& s_l, ScatterModel model) {
    if (s_l.rows() != array.size() || s_l.cols() != array.size()) {
        throw DomainError("load size does not match the array");
    }
    return model == ScatterModel::Exact ? exact_transfer(array.s_aa(), s_l, array.s_aa_norm()) : s_l;
}

FarFieldSpectrum scatter(const CoupledArray& array, const CMatrix& s_l,
                         const PlaneWaveSet& incident, const AngularGrid& out_grid,
                         ScatterModel model) {
    const CVector port_waves = port_transfer(array, s_l, model) * received_vector(array, incident);
    FarFieldSpectrum spectrum{out_grid, std::vector<cdouble>(out_grid.size())};
    for (std::size_t i = 0; i < out_grid.size(); ++i) {
        spectrum.values[i] = array.pattern(out_grid.node(i)).transpose() * port_waves;
    }
    return spectrum;
}

FarFieldSpectrum scatter(const CoupledArray& array, const LoadConfig& load,
                         const PlaneWaveSet& incident, const AngularGrid& out_grid,
                         ScatterModel model) {
    return scatter(array, realize_load(load, array.geometry()), incident, out_grid, model);
}

double scattered_power(const FarFieldSpectrum& spectrum) {
    double total = 0.0;
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
        total += spectrum.grid.weight(i) * std::norm(spectrum.values[i]);
    }
    return total;
}

ReradiationKernel::ReradiationKernel(const CoupledArray& array, const CMatrix& s_l)
    : array_(&array), transfer_(port_transfer(array, s_l, ScatterModel::Exact)) {
    // B = I - S_aa S_aa^H holds by construction, so the coupling matrix is used directly.
    kernel_ = transfer_ * array.coupling().cast<cdouble>() * transfer_.adjoint();
}

double ReradiationKernel::operator()(double theta, double phi) const {
    const CVector s = embedded_pattern(array_->geometry(), theta, phi);
    const cdouble value = s.transpose() * kernel_ * s.conjugate();
    return std::max(value.real(), 0.0);
}

double ReradiationKernel::hemisphere_integral() const {
    return (kernel_ * array_->coupling().cast<cdouble>()).trace().real();
}

double noise_density(const ReradiationKernel& kernel, const ArrayGeometry& geom, double theta,
                     double phi, double n0, double nf_inf) {
    const double excess = kernel(theta, phi) - geom.area() * std::cos(theta);
    return nf_inf * n0 * std::max(excess, 0.0);
}

double noise_density(const CoupledArray& array, const CMatrix& s_l, double theta, double phi,
                     double n0, double nf_inf) {
    return noise_density(ReradiationKernel(array, s_l), array.geometry(), theta, phi, n0, nf_inf);
}

double interference_density(const ReradiationKernel& kernel, double theta, double phi,
                            double n_i) {
    return n_i * kernel(theta, phi);
}

double interference_density(const CoupledArray& array, const CMatrix& s_l, double theta,
                            double phi, double n_i) {
    return interference_density(ReradiationKernel(array, s_l), theta, phi, n_i);
}

}  // namespace rislab
