#ifndef RISLAB_ESTIMATION_HPP
#define RISLAB_ESTIMATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rislab/types.hpp"

namespace rislab {

/// Channel with a sparse beam-domain representation h = sqrt(M) F s.
class SparseAngularChannel {
public:
    /// Dense beam-domain vector; its non-zero entries define the support.
    explicit SparseAngularChannel(CVector beam_profile);
    /// Same, reusing a precomputed M-point DFT matrix.
    SparseAngularChannel(CVector beam_profile, const CMatrix& dft);

    /// `sparsity` distinct beams with complex Gaussian coefficients, scaled so
    /// that ||s||_2 = 1.
    static SparseAngularChannel random(int m, int sparsity, std::uint64_t seed);
    static SparseAngularChannel random(int m, int sparsity, std::uint64_t seed, const CMatrix& dft);

    int size() const { return static_cast<int>(beam_profile_.size()); }
    const CVector& beam_profile() const { return beam_profile_; }
    const std::vector<int>& support() const { return support_; }
    /// Element-domain channel sqrt(M) F s.
    const CVector& channel() const { return channel_; }

private:
    CVector beam_profile_;
    std::vector<int> support_;
    CVector channel_;
};

/// T x M matrix of +-1 beam-port modulation states; row t is diag(S_L'^(t)).
class ProbeSchedule {
public:
    enum class Kind { Orthogonal, Random };

    explicit ProbeSchedule(RMatrix states);

    const RMatrix& states() const { return states_; }
    int slots() const { return static_cast<int>(states_.rows()); }
    int ports() const { return static_cast<int>(states_.cols()); }
    /// P^T P == T I exactly (rows mutually orthogonal, T == M).
    bool is_orthogonal() const;

private:
    RMatrix states_;
};

/// Orthogonal: Sylvester-Hadamard, needs T == M and M a power of two.
/// Random: i.i.d. +-1 entries from `seed`.
ProbeSchedule make_probe_schedule(int m, int t, ProbeSchedule::Kind kind, std::uint64_t seed = 0);

/// Circularly-symmetric complex Gaussian noise with E|n|^2 = noise_sd^2.
CVector complex_noise(int count, double noise_sd, std::uint64_t seed);

/// Retrodirective samples y = M P (s .* s) + n.
CVector retro_measure(const SparseAngularChannel& ch, const ProbeSchedule& sched, double noise_sd,
                      std::uint64_t seed);

/// Noise-free sample h^T (F S' F) h for one probe row, with the beam ports
/// relabelled so that logical beam i sits on physical port -i (mod M). With
/// the symmetric DFT, F F is that index reversal; under this labelling the
/// full product equals M row^T (s .* s).
cdouble retro_sample_full(const SparseAngularChannel& ch, const RVector& probe_row);

/// Least-squares estimate of s .* s. Orthogonal schedules use
/// P^T y / (M T); others a full-rank least-squares solve. T < M or a rank
/// deficient schedule throws ConfigurationError.
CVector retro_recover(const CVector& y, const ProbeSchedule& sched);

/// Unit-modulus phase schedule sqrt(M) F^H (T == M rows), matched to the DFT.
CMatrix dft_phase_schedule(int m);

/// Cascaded two-hop samples y = sqrt(M) Phi F s + n.
CVector cascaded_measure(const SparseAngularChannel& cascaded, const CMatrix& phase_schedule,
                         double noise_sd, std::uint64_t seed);

/// Least-squares estimate of the cascaded beam profile.
CVector cascaded_recover(const CVector& y, const CMatrix& phase_schedule);

struct EstimatorComparisonRow {
    double snr_db = 0.0;
    double noise_sd = 0.0;
    double mse_retro = 0.0;       ///< per-entry MSE of s .* s
    double mse_cascaded = 0.0;    ///< per-entry MSE of s_cascaded
    std::optional<double> gain;   ///< mse_cascaded / mse_retro; empty when noiseless
};

struct EstimatorComparison {
    int ports = 0;
    int sparsity = 0;
    int trials = 0;
    std::vector<EstimatorComparisonRow> rows;
};

/// Monte-Carlo comparison over SNR values in dB (unit pilot power,
/// noise_sd = 10^(-snr/20); +inf means noiseless). Orthogonal probing with
/// T = M for both schemes. Bit-reproducible for a fixed seed and any `jobs`.
EstimatorComparison compare_estimators(int m, int sparsity, const std::vector<double>& snr_db,
                                       int trials, std::uint64_t seed, int jobs = 1);

}  // namespace rislab

#endif  // RISLAB_ESTIMATION_HPP
