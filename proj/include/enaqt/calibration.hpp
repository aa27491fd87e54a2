// calibration.hpp: two-guide coupler formulas and inverse-design helpers
//
// Couplings and detunings of the fabricated array are inferred from isolated
// waveguide pairs. These helpers cover the three steps involved: fitting
// coupling against separation, recovering Δβ/C from the maximum power
// transferred in a detuned pair, and the effective trapping rate of a
// semi-infinite sink chain.

#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "enaqt/errors.hpp"

namespace enaqt::calibration {

/// Power in guide 2 after distance z when only guide 1 is excited:
/// P₂(z) = (C²/Ω²)·sin²(Ωz), Ω = √(C² + (Δβ/2)²).
inline double pair_transfer(double c, double delta_beta, double z) {
    if (!(c > 0.0)) throw DomainError("pair_transfer: coupling must be positive");
    if (z < 0.0) throw DomainError("pair_transfer: z must be non-negative");
    const double omega = std::sqrt(c * c + 0.25 * delta_beta * delta_beta);
    const double s = std::sin(omega * z);
    return (c * c) / (omega * omega) * s * s;
}

/// Δβ/C from the maximum transferred power p_max = C²/(C² + Δβ²/4).
inline double detuning_from_max_transfer(double p_max) {
    if (!(p_max > 0.0 && p_max <= 1.0))
        throw DomainError("detuning_from_max_transfer: p_max must lie in (0, 1]");
    return 2.0 * std::sqrt(1.0 / p_max - 1.0);
}

struct CouplingSample {
    double separation_um{};
    double coupling_per_cm{};
};

/// C(s) = amplitude·exp(−s/decay_length), fitted on ln C.
struct CouplingCurve {
    std::vector<CouplingSample> samples;
    double amplitude_per_cm{};
    double decay_length_um{};
    std::vector<double> log_residuals;  // ln C_i − ln C(s_i)

    double coupling_at(double separation_um) const {
        return amplitude_per_cm * std::exp(-separation_um / decay_length_um);
    }

    double min_separation() const {
        double m = samples.front().separation_um;
        for (const auto& s : samples) m = std::min(m, s.separation_um);
        return m;
    }
    double max_separation() const {
        double m = samples.front().separation_um;
        for (const auto& s : samples) m = std::max(m, s.separation_um);
        return m;
    }
};

inline CouplingCurve fit_coupling_curve(std::span<const CouplingSample> samples) {
    std::set<double> distinct;
    for (const auto& s : samples) {
        if (!(s.separation_um > 0.0) || !(s.coupling_per_cm > 0.0))
            throw FitError("fit_coupling_curve: separations and couplings must be positive");
        distinct.insert(s.separation_um);
    }
    if (distinct.size() < 2)
        throw FitError("fit_coupling_curve: need at least two distinct separations");

    const auto n = static_cast<double>(samples.size());
    double mean_s = 0.0;
    double mean_y = 0.0;
    for (const auto& s : samples) {
        mean_s += s.separation_um;
        mean_y += std::log(s.coupling_per_cm);
    }
    mean_s /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double ds = s.separation_um - mean_s;
        sxx += ds * ds;
        sxy += ds * (std::log(s.coupling_per_cm) - mean_y);
    }
    const double slope = sxy / sxx;
    if (!(slope < 0.0))
        throw FitError("fit_coupling_curve: coupling does not decay with separation");

    CouplingCurve curve;
    curve.samples.assign(samples.begin(), samples.end());
    curve.decay_length_um = -1.0 / slope;
    curve.amplitude_per_cm = std::exp(mean_y - slope * mean_s);
    curve.log_residuals.reserve(samples.size());
    for (const auto& s : samples)
        curve.log_residuals.push_back(std::log(s.coupling_per_cm) - std::log(curve.coupling_at(s.separation_um)));
    return curve;
}

struct SeparationEstimate {
    double separation_um{};
    bool extrapolated{};  // outside the sampled separation range
};

/// Inverts the fitted curve: s = −d·ln(c_target/A).
inline SeparationEstimate separation_for_coupling(const CouplingCurve& curve, double c_target) {
    if (!(c_target > 0.0)) throw DomainError("separation_for_coupling: target coupling must be positive");
    const double s = -curve.decay_length_um * std::log(c_target / curve.amplitude_per_cm);
    const bool outside = curve.samples.empty() || s < curve.min_separation() || s > curve.max_separation();
    return {s, outside};
}

/// Effective sink decay rate κ = C_sink·2x²/√(1−x²) with x = C_trap/C_sink,
/// expressed in units of C_sink so that κ → 2C_trap²/C_sink for weak traps.
inline double effective_trap_rate(double x, double c_sink) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("effective_trap_rate: trap ratio must lie in (0, 1)");
    if (!(c_sink > 0.0)) throw DomainError("effective_trap_rate: sink coupling must be positive");
    return c_sink * 2.0 * x * x / std::sqrt(1.0 - x * x);
}

}  // namespace enaqt::calibration
