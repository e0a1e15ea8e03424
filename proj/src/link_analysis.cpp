#include "rislab/link_analysis.hpp"

#include <cmath>
#include <limits>

#include "rislab/errors.hpp"

namespace rislab {
namespace {

constexpr double kInvE = 0.36787944117144233;

RateResult rate_with_overhead(double nodes, double overhead, double snr_gain) {
    RateResult r;
    r.overhead_fraction = overhead;
    if (overhead >= 1.0) {
        r.overhead_saturated = true;
        return r;
    }
    r.rate = nodes * (1.0 - overhead) * std::log2(1.0 + snr_gain);
    return r;
}

}  // namespace

FresnelSize fresnel_size(double d_tx, double d_rx) {
    if (!(d_tx > 0.0) || !(d_rx > 0.0)) throw DomainError("fresnel_size: distances must be positive");
    FresnelSize out;
    out.required_size =
        std::isinf(d_tx) ? std::sqrt(d_rx) : std::sqrt(d_rx * d_tx / (d_tx + d_rx));
    out.max_size = 0.5 * std::sqrt(d_tx + d_rx);
    return out;
}

double fractional_bandwidth_limit(const GeometryScenario& scn, bool use_distance_form) {
    if (use_distance_form) {
        if (!(scn.d_tx > 0.0) || !(scn.d_rx > 0.0)) {
            throw DomainError("fractional_bandwidth_limit: distances must be positive");
        }
    } else if (!(scn.side_length > 0.0)) {
        throw DomainError("fractional_bandwidth_limit: RIS side length must be positive");
    }
    const double dsin = std::abs(std::sin(scn.theta_incident) - std::sin(scn.theta_reflected));
    if (dsin == 0.0) return std::numeric_limits<double>::infinity();
    if (use_distance_form) return 2.0 / dsin * std::sqrt(1.0 / (scn.d_rx + scn.d_tx));
    return 1.0 / (scn.side_length * dsin);
}

RateResult rate_redirective(const OverheadParams& p) {
    const double overhead =
        p.control_bits * std::log2(p.access_gain) / (p.control_efficiency * p.slot_symbols);
    return rate_with_overhead(p.nodes, overhead,
                              p.isotropic_snr() * p.fronthaul_gain * p.access_gain);
}

RateResult rate_reflective(const OverheadParams& p) {
    const double overhead = p.control_bits * p.access_gain / (p.control_efficiency * p.slot_symbols);
    return rate_with_overhead(p.nodes, overhead,
                              p.isotropic_snr() * p.access_gain * p.access_gain);
}

double optimal_gain_redirective(const OverheadParams& p) {
    const double exponent = p.control_efficiency * p.slot_symbols / (2.0 * p.control_bits);
    return std::exp2(exponent) / std::sqrt(p.isotropic_snr() * p.fronthaul_gain);
}

double optimal_gain_reflective(const OverheadParams& p) {
    const double c = p.control_efficiency * p.slot_symbols / p.control_bits;
    const double arg = c * std::sqrt(p.isotropic_snr());
    if (!(arg > 0.0)) throw DomainError("optimal_gain_reflective: Lambert W argument must be positive");
    return c / lambert_w(arg);
}

double lambert_w(double x) {
    if (std::isnan(x) || x < -kInvE) {
        throw DomainError("lambert_w: argument below -1/e");
    }
    if (x == 0.0) return 0.0;
    if (x == -kInvE) return -1.0;
    if (std::isinf(x)) return x;

    double w;
    if (x < -0.25) {
        // Series about the branch point -1/e.
        const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    // Halley iteration on f(w) = w e^w - x.
    for (int iter = 0; iter < 100; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-15 * (1.0 + std::abs(w))) break;
    }
    return w;
}

GainSearchResult brute_force_gain(const RateFunction& rate_fn, const OverheadParams& p,
                                  const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("brute_force_gain: empty search grid");
    GainSearchResult best{grid.front(), -std::numeric_limits<double>::infinity()};
    OverheadParams trial = p;
    for (double gain : grid) {
        trial.access_gain = gain;
        const double r = rate_fn(trial).rate;
        if (r > best.rate) best = {gain, r};
    }
    return best;
}

std::vector<double> log_grid(double lo, double hi, int count, bool open_upper) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("log_grid: invalid range");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / (open_upper ? count : count - 1);
    for (int i = 0; i < count; ++i) out[i] = std::exp(llo + step * i);
    if (!open_upper) out.back() = hi;
    return out;
}

double redirective_gain_ceiling(const OverheadParams& p) {
    return std::exp2(p.control_efficiency * p.slot_symbols / p.control_bits);
}

double reflective_gain_ceiling(const OverheadParams& p) {
    return p.control_efficiency * p.slot_symbols / p.control_bits;
}

}  // namespace rislab
