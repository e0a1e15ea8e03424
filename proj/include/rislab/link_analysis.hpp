#ifndef RISLAB_LINK_ANALYSIS_HPP
#define RISLAB_LINK_ANALYSIS_HPP

#include <functional>
#include <vector>

namespace rislab {

/// Blockage-mitigation geometry; lengths in wavelengths, angles in radians.
struct GeometryScenario {
    double d_tx = 0.0;
    double d_rx = 0.0;
    double theta_incident = 0.0;
    double theta_reflected = 0.0;
    double side_length = 0.0;  ///< RIS side L
};

struct FresnelSize {
    double required_size = 0.0;  ///< sqrt(d_tx d_rx / (d_tx + d_rx))
    double max_size = 0.0;       ///< RIS halfway between the endpoints
};

/// First-Fresnel-zone RIS size (lambda = 1).
FresnelSize fresnel_size(double d_tx, double d_rx);

/// Upper bound on B / f_c for a phased RIS without true-delay elements.
/// The distance form substitutes the Fresnel size for L. Returns +inf in the
/// specular case sin(theta_I) == sin(theta_R).
double fractional_bandwidth_limit(const GeometryScenario& scn, bool use_distance_form = false);

/// In-band control overhead link parameters.
struct OverheadParams {
    double nodes = 1.0;                ///< K
    double channel_gain = 1.0;         ///< G_c, isotropic
    double transmit_power = 1.0;       ///< P_T [W]
    double bandwidth = 1.0;            ///< B_w [Hz]
    double noise_density = 1.0;        ///< N_0 [W/Hz]
    double fronthaul_gain = 1.0;       ///< M_B
    double access_gain = 1.0;          ///< M_A
    double control_bits = 1.0;         ///< b_A
    double control_efficiency = 1.0;   ///< eta_B [bit/s/Hz]
    double slot_symbols = 1.0;         ///< N_s

    /// G_c P_T / (B_w N_0)
    double isotropic_snr() const {
        return channel_gain * transmit_power / (bandwidth * noise_density);
    }
};

struct RateResult {
    double rate = 0.0;                ///< sum rate [bit/s/Hz]
    bool overhead_saturated = false;  ///< control fraction reached 1; rate clamped to 0
    double overhead_fraction = 0.0;   ///< B_c / B_w
};

/// Redirective RIS: logarithmic control overhead b_A log2(M_A) / (eta_B N_s).
RateResult rate_redirective(const OverheadParams& p);

/// Reflective RIS with M_A = M_B (the fronthaul gain field is ignored) and
/// linear control overhead b_A M_A / (eta_B N_s).
RateResult rate_reflective(const OverheadParams& p);

/// High-SNR optimum 2^(eta_B N_s / (2 b_A)) / sqrt(SNR M_B).
double optimal_gain_redirective(const OverheadParams& p);

/// High-SNR optimum c / W(c sqrt(SNR)) with c = eta_B N_s / b_A.
double optimal_gain_reflective(const OverheadParams& p);

/// Principal branch of the Lambert W function, x >= -1/e.
double lambert_w(double x);

struct GainSearchResult {
    double access_gain = 0.0;
    double rate = 0.0;
};

using RateFunction = std::function<RateResult(const OverheadParams&)>;

/// Exhaustive maximizer of rate_fn over candidate M_A values.
GainSearchResult brute_force_gain(const RateFunction& rate_fn, const OverheadParams& p,
                                  const std::vector<double>& grid);

/// `count` log-spaced points from lo to hi; hi itself excluded when
/// `open_upper` is set.
std::vector<double> log_grid(double lo, double hi, int count = 512, bool open_upper = true);

/// Search range [1, c) of M_A where the overhead fraction stays below one.
double redirective_gain_ceiling(const OverheadParams& p);
double reflective_gain_ceiling(const OverheadParams& p);

}  // namespace rislab

#endif  // RISLAB_LINK_ANALYSIS_HPP
