#include "rislab/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rislab/array_model.hpp"
#include "rislab/errors.hpp"
#include "rislab/parallel.hpp"

namespace rislab {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

RMatrix sylvester_hadamard(int m) {
    RMatrix h = RMatrix::Ones(1, 1);
    while (h.rows() < m) {
        const auto n = h.rows();
        RMatrix next(2 * n, 2 * n);
        next << h, h, h, -h;
        h = std::move(next);
    }
    return h;
}

// Trial streams: one per (snr index, trial), separated by purpose.
enum Stream : std::uint64_t { kRetroChannel = 1, kRetroNoise, kCascadedChannel, kCascadedNoise };

std::uint64_t stream_id(std::size_t snr_index, int trial, Stream which) {
    return (static_cast<std::uint64_t>(snr_index) << 40) ^ (static_cast<std::uint64_t>(trial) << 4) ^
           which;
}

}  // namespace

SparseAngularChannel::SparseAngularChannel(CVector beam_profile)
    : SparseAngularChannel(beam_profile, dft_matrix(static_cast<int>(beam_profile.size()))) {}

SparseAngularChannel::SparseAngularChannel(CVector beam_profile, const CMatrix& dft)
    : beam_profile_(std::move(beam_profile)) {
    const int m = size();
    if (m < 1) throw ConfigurationError("SparseAngularChannel: empty beam profile");
    if (dft.rows() != m || dft.cols() != m) {
        throw ConfigurationError("SparseAngularChannel: transform size mismatch");
    }
    for (int i = 0; i < m; ++i) {
        if (beam_profile_(i) != cdouble(0.0, 0.0)) support_.push_back(i);
    }
    channel_ = std::sqrt(static_cast<double>(m)) * (dft * beam_profile_);
}

SparseAngularChannel SparseAngularChannel::random(int m, int sparsity, std::uint64_t seed) {
    return random(m, sparsity, seed, dft_matrix(std::max(m, 1)));
}

SparseAngularChannel SparseAngularChannel::random(int m, int sparsity, std::uint64_t seed,
                                                  const CMatrix& dft) {
    if (m < 1 || sparsity < 0 || sparsity > m) {
        throw ConfigurationError("SparseAngularChannel: sparsity must lie in [0, M]");
    }
    auto rng = make_engine(seed, 0);
    std::vector<int> beams(m);
    std::iota(beams.begin(), beams.end(), 0);
    std::shuffle(beams.begin(), beams.end(), rng);
    std::normal_distribution<double> normal;
    CVector s = CVector::Zero(m);
    for (int k = 0; k < sparsity; ++k) s(beams[k]) = cdouble(normal(rng), normal(rng));
    if (sparsity > 0) s /= s.norm();
    return SparseAngularChannel(std::move(s), dft);
}

ProbeSchedule::ProbeSchedule(RMatrix states) : states_(std::move(states)) {
    for (Eigen::Index i = 0; i < states_.size(); ++i) {
        const double v = states_.data()[i];
        if (v != 1.0 && v != -1.0) throw ConfigurationError("ProbeSchedule: entries must be +-1");
    }
}

bool ProbeSchedule::is_orthogonal() const {
    if (slots() != ports()) return false;
    const RMatrix gram = states_.transpose() * states_;
    return gram == static_cast<double>(slots()) * RMatrix::Identity(ports(), ports());
}

ProbeSchedule make_probe_schedule(int m, int t, ProbeSchedule::Kind kind, std::uint64_t seed) {
    if (m < 1 || t < 1) throw ConfigurationError("probe schedule: M and T must be positive");
    if (kind == ProbeSchedule::Kind::Orthogonal) {
        if (t != m || !is_power_of_two(m)) {
            throw ConfigurationError("orthogonal probe schedule needs T == M with M a power of two");
        }
        return ProbeSchedule(sylvester_hadamard(m));
    }
    auto rng = make_engine(seed, 0);
    std::bernoulli_distribution coin;
    RMatrix p(t, m);
    for (int r = 0; r < t; ++r) {
        for (int c = 0; c < m; ++c) p(r, c) = coin(rng) ? 1.0 : -1.0;
    }
    return ProbeSchedule(std::move(p));
}

CVector complex_noise(int count, double noise_sd, std::uint64_t seed) {
    CVector n = CVector::Zero(count);
    if (noise_sd == 0.0) return n;
    auto rng = make_engine(seed, 0);
    std::normal_distribution<double> normal(0.0, noise_sd / std::sqrt(2.0));
    for (int i = 0; i < count; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        n(i) = cdouble(re, im);
    }
    return n;
}

CVector retro_measure(const SparseAngularChannel& ch, const ProbeSchedule& sched, double noise_sd,
                      std::uint64_t seed) {
    if (sched.ports() != ch.size()) throw ConfigurationError("retro_measure: size mismatch");
    const CVector squared = ch.beam_profile().cwiseProduct(ch.beam_profile());
    const CVector clean = static_cast<double>(ch.size()) * (sched.states().cast<cdouble>() * squared);
    return clean + complex_noise(sched.slots(), noise_sd, seed);
}

cdouble retro_sample_full(const SparseAngularChannel& ch, const RVector& probe_row) {
    const int m = ch.size();
    if (probe_row.size() != m) throw ConfigurationError("retro_sample_full: size mismatch");
    CVector port_states(m);
    for (int i = 0; i < m; ++i) port_states((m - i) % m) = probe_row(i);
    const CMatrix f = dft_matrix(m);
    const CMatrix load = f * port_states.asDiagonal() * f;
    return ch.channel().transpose() * load * ch.channel();
}

CVector retro_recover(const CVector& y, const ProbeSchedule& sched) {
    if (y.size() != sched.slots()) throw ConfigurationError("retro_recover: sample count mismatch");
    const double m = sched.ports();
    if (sched.is_orthogonal()) {
        return sched.states().transpose().cast<cdouble>() * y / (m * sched.slots());
    }
    if (sched.slots() < sched.ports()) {
        throw ConfigurationError("retro_recover: under-determined schedule (T < M)");
    }
    Eigen::ColPivHouseholderQR<RMatrix> qr(sched.states());
    if (qr.rank() < sched.ports()) {
        throw ConfigurationError("retro_recover: rank-deficient probe schedule");
    }
    const CMatrix system = m * sched.states().cast<cdouble>();
    return system.colPivHouseholderQr().solve(y);
}

CMatrix dft_phase_schedule(int m) {
    return std::sqrt(static_cast<double>(m)) * dft_matrix(m).adjoint();
}

CVector cascaded_measure(const SparseAngularChannel& cascaded, const CMatrix& phase_schedule,
                         double noise_sd, std::uint64_t seed) {
    const int m = cascaded.size();
    if (phase_schedule.cols() != m) throw ConfigurationError("cascaded_measure: size mismatch");
    // sqrt(M) Phi F s == Phi h
    const CVector clean = phase_schedule * cascaded.channel();
    return clean + complex_noise(static_cast<int>(phase_schedule.rows()), noise_sd, seed);
}

CVector cascaded_recover(const CVector& y, const CMatrix& phase_schedule) {
    const int m = static_cast<int>(phase_schedule.cols());
    if (y.size() != phase_schedule.rows()) {
        throw ConfigurationError("cascaded_recover: sample count mismatch");
    }
    if (phase_schedule.rows() < m) {
        throw ConfigurationError("cascaded_recover: under-determined schedule (T < M)");
    }
    const CMatrix system = std::sqrt(static_cast<double>(m)) * phase_schedule * dft_matrix(m);
    Eigen::ColPivHouseholderQR<CMatrix> qr(system);
    if (qr.rank() < m) throw ConfigurationError("cascaded_recover: rank-deficient phase schedule");
    return qr.solve(y);
}

EstimatorComparison compare_estimators(int m, int sparsity, const std::vector<double>& snr_db,
                                       int trials, std::uint64_t seed, int jobs) {
    if (trials < 1) throw ConfigurationError("compare_estimators: trials must be positive");
    const ProbeSchedule probes = make_probe_schedule(m, m, ProbeSchedule::Kind::Orthogonal);
    const CMatrix dft = dft_matrix(m);
    const CMatrix phases = dft_phase_schedule(m);
    // Least-squares map of the cascaded system, factored once for all trials.
    const CMatrix system = std::sqrt(static_cast<double>(m)) * phases * dft;
    const CMatrix cascaded_pinv =
        system.colPivHouseholderQr().solve(CMatrix::Identity(m, m));

    EstimatorComparison report{m, sparsity, trials, {}};
    report.rows.resize(snr_db.size());
    for (std::size_t k = 0; k < snr_db.size(); ++k) {
        const double sd = std::isinf(snr_db[k]) && snr_db[k] > 0 ? 0.0
                                                                 : std::pow(10.0, -snr_db[k] / 20.0);
        std::vector<double> retro(trials);
        std::vector<double> cascaded(trials);
        parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t i) {
            const int t = static_cast<int>(i);
            const auto bs = SparseAngularChannel::random(m, sparsity, seed ^ stream_id(k, t, kRetroChannel), dft);
            const CVector q = bs.beam_profile().cwiseProduct(bs.beam_profile());
            const CVector y = retro_measure(bs, probes, sd, seed ^ stream_id(k, t, kRetroNoise));
            retro[i] = (retro_recover(y, probes) - q).squaredNorm() / m;

            const auto two_hop =
                SparseAngularChannel::random(m, sparsity, seed ^ stream_id(k, t, kCascadedChannel), dft);
            const CVector yc = cascaded_measure(two_hop, phases, sd, seed ^ stream_id(k, t, kCascadedNoise));
            cascaded[i] = (cascaded_pinv * yc - two_hop.beam_profile()).squaredNorm() / m;
        });
        auto& row = report.rows[k];
        row.snr_db = snr_db[k];
        row.noise_sd = sd;
        row.mse_retro = std::accumulate(retro.begin(), retro.end(), 0.0) / trials;
        row.mse_cascaded = std::accumulate(cascaded.begin(), cascaded.end(), 0.0) / trials;
        if (sd > 0.0) row.gain = row.mse_cascaded / row.mse_retro;
    }
    return report;
}

}  // namespace rislab
