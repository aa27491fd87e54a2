// decoherence.hpp: illumination spectra and spectral-ensemble decoherence
//
// Every wavelength propagates coherently through the array; a detector that
// does not resolve wavelength sees the spectrally weighted mixture of the
// individual pure states. Under the inverse-λ detuning law the phase z·Δβ(λ)
// equals ω·τ with τ = z·Δβ·λ₀/(2πc), so the ensemble reproduces the first-order
// coherence g⁽¹⁾(τ) of the light exactly.
//
// Continuous spectra are specified by a center wavelength and a FWHM in nm and
// are laid out in angular frequency: the top-hat is uniform on
// ω₀ ± Δω/2 with Δω = 2πcΔλ/λ₀², the Gaussian has the same FWHM in ω.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "enaqt/errors.hpp"
#include "enaqt/lattice.hpp"
#include "enaqt/parallel.hpp"
#include "enaqt/propagate.hpp"
#include "enaqt/quadrature.hpp"
#include "enaqt/units.hpp"

namespace enaqt {

enum class SpectrumShape { tophat, gaussian, delta, discrete };

struct SpectralLine {
    double wavelength_nm{};
    double weight{};
};

struct Spectrum {
    SpectrumShape shape{SpectrumShape::delta};
    double center_nm{792.5};
    double fwhm_nm{0.0};
    std::vector<SpectralLine> lines;  // discrete only; weights sum to 1

    static Spectrum tophat(double center_nm, double fwhm_nm) {
        return {SpectrumShape::tophat, center_nm, fwhm_nm, {}};
    }
    static Spectrum gaussian(double center_nm, double fwhm_nm) {
        return {SpectrumShape::gaussian, center_nm, fwhm_nm, {}};
    }
    static Spectrum delta(double center_nm) { return {SpectrumShape::delta, center_nm, 0.0, {}}; }
    static Spectrum discrete(double center_nm, std::vector<SpectralLine> lines) {
        Spectrum s{SpectrumShape::discrete, center_nm, 0.0, std::move(lines)};
        s.normalize();
        return s;
    }

    void validate() const {
        if (!(center_nm > 0.0)) throw ValidationError("spectrum: center wavelength must be positive");
        if (!(fwhm_nm >= 0.0) || !std::isfinite(fwhm_nm)) throw ValidationError("spectrum: bandwidth must be >= 0");
        if (shape == SpectrumShape::delta && fwhm_nm != 0.0)
            throw ValidationError("spectrum: delta spectrum requires zero bandwidth");
        if (shape == SpectrumShape::tophat && !(angular_width() < 2.0 * center_frequency()))
            throw ValidationError("spectrum: top-hat extends to non-positive frequency");
        if (shape == SpectrumShape::discrete) {
            if (lines.empty()) throw ValidationError("spectrum: discrete spectrum needs at least one line");
            double total = 0.0;
            for (const auto& l : lines) {
                if (!(l.wavelength_nm > 0.0)) throw ValidationError("spectrum: line wavelength must be positive");
                if (!(l.weight >= 0.0)) throw ValidationError("spectrum: line weight must be non-negative");
                total += l.weight;
            }
            if (std::abs(total - 1.0) > 1e-12) throw ValidationError("spectrum: line weights must sum to 1");
        }
    }

    void normalize() {
        double total = 0.0;
        for (const auto& l : lines) total += l.weight;
        if (!(total > 0.0)) throw ValidationError("spectrum: line weights must have positive sum");
        for (auto& l : lines) l.weight /= total;
    }

    double center_frequency() const { return units::angular_frequency(center_nm); }
    double angular_width() const { return units::angular_bandwidth(fwhm_nm, center_nm); }
    double gaussian_sigma() const { return angular_width() / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

    /// True when the light is monochromatic in effect (never decoheres).
    bool is_monochromatic() const {
        if (shape == SpectrumShape::discrete) return lines.size() == 1;
        return shape == SpectrumShape::delta || fwhm_nm == 0.0;
    }
};

/// Normalized first-order coherence in the frame of the center frequency:
/// g⁽¹⁾(τ) = ∫ S(ω) e^{−i(ω−ω₀)τ} dω, τ in seconds.
inline std::complex<double> g1(const Spectrum& spectrum, double tau) {
    switch (spectrum.shape) {
        case SpectrumShape::delta:
            return 1.0;
        case SpectrumShape::tophat: {
            const double x = 0.5 * spectrum.angular_width() * tau;
            return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        }
        case SpectrumShape::gaussian: {
            const double s = spectrum.gaussian_sigma() * tau;
            return std::exp(-0.5 * s * s);
        }
        case SpectrumShape::discrete: {
            const double w0 = spectrum.center_frequency();
            std::complex<double> acc = 0.0;
            for (const auto& l : spectrum.lines)
                acc += l.weight * std::polar(1.0, -(units::angular_frequency(l.wavelength_nm) - w0) * tau);
            return acc;
        }
    }
    return 1.0;
}

/// Time delay equivalent to propagating z (cm) with detuning Δβ (cm⁻¹) at λ₀.
inline double equivalent_delay(double z_cm, double delta_beta, double center_nm) {
    return z_cm * delta_beta * units::nm_to_cm(center_nm) / (2.0 * units::pi * units::speed_of_light_cm_per_s);
}

/// ∫|g⁽¹⁾(τ)|² dτ over the real line (seconds), by adaptive quadrature.
/// Infinite for monochromatic and line spectra.
inline double coherence_time_integral(const Spectrum& spectrum) {
    spectrum.validate();
    if (spectrum.is_monochromatic() || spectrum.shape == SpectrumShape::discrete)
        return std::numeric_limits<double>::infinity();

    // integrals run in dimensionless delay, then rescale to seconds
    if (spectrum.shape == SpectrumShape::gaussian) {
        const double sigma = spectrum.gaussian_sigma();
        const auto f = [](double s) { return std::exp(-s * s); };
        return 2.0 * quadrature::integrate(f, 0.0, 10.0) / sigma;  // |g1|² < e^{-100} beyond
    }

    // Top-hat: |g1|² = sinc²x with x = Δωτ/2. Integrate panel by panel between
    // zeros, then add the tail ∫_X^∞ sin²x/x² dx = 1/(2X) + sin(2X)/(4X²) + O(X⁻³)
    // at X = Kπ, where the second term vanishes.
    constexpr int panels = 4000;
    const double half_width = 0.5 * spectrum.angular_width();
    const auto f = [](double x) {
        const double s = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        return s * s;
    };
    std::vector<double> pieces(panels);
    for (int k = 0; k < panels; ++k)
        pieces[static_cast<std::size_t>(k)] = quadrature::integrate(f, k * units::pi, (k + 1) * units::pi);
    const double body = quadrature::pairwise_sum<double>(pieces);
    const double tail = 1.0 / (2.0 * panels * units::pi);
    return 2.0 * (body + tail) / half_width;
}

/// Decoherence strength γ (cm⁻¹): the inverse optical coherence length
/// γ = [ (2πc/(Δβ λ₀)) ∫|g⁽¹⁾(τ)|² dτ ]⁻¹. Zero for monochromatic light.
inline double decoherence_strength(const Spectrum& spectrum, double delta_beta, double center_nm) {
    if (!(delta_beta > 0.0)) throw DomainError("decoherence_strength: detuning must be positive");
    if (!(center_nm > 0.0)) throw DomainError("decoherence_strength: center wavelength must be positive");
    const double integral = coherence_time_integral(spectrum);
    if (std::isinf(integral)) return 0.0;
    const double length_scale =
        2.0 * units::pi * units::speed_of_light_cm_per_s / (delta_beta * units::nm_to_cm(center_nm));
    return 1.0 / (length_scale * integral);
}

/// Coherence between two uncoupled guides, guide a detuned by +Δβ from b:
/// ρ_ab(z) = ρ_ab(0)·e^{−iω₀τ}·g⁽¹⁾(τ), τ = z·Δβ·λ₀/(2πc). The carrier e^{−iω₀τ}
/// is the mean phase e^{−iΔβz} when λ₀ is the spectrum center.
inline std::complex<double> coherence_decay_pair(double delta_beta, double center_nm, const Spectrum& spectrum,
                                                 double z, std::complex<double> rho_ab0) {
    const double tau = equivalent_delay(z, delta_beta, center_nm);
    return rho_ab0 * std::polar(1.0, -spectrum.center_frequency() * tau) * g1(spectrum, tau);
}

/// Quadrature nodes over the spectrum, ascending in wavelength. Odd node
/// counts of symmetric spectra contain the center wavelength exactly.
inline std::vector<SpectralLine> spectral_nodes(const Spectrum& spectrum, std::size_t nodes) {
    spectrum.validate();
    if (nodes < 1) throw DomainError("spectral_nodes: need at least one node");
    if (spectrum.shape == SpectrumShape::discrete) return spectrum.lines;
    if (spectrum.is_monochromatic()) return {{spectrum.center_nm, 1.0}};

    const auto rule = quadrature::gauss_legendre(nodes);
    const double w0 = spectrum.center_frequency();
    std::vector<SpectralLine> out(nodes);
    if (spectrum.shape == SpectrumShape::tophat) {
        const double half = 0.5 * spectrum.angular_width();
        for (std::size_t k = 0; k < nodes; ++k)
            out[k] = {units::wavelength_nm(w0 + half * rule.nodes[k]), 0.5 * rule.weights[k]};
    } else {
        constexpr double span_sigmas = 8.0;
        const double sigma = spectrum.gaussian_sigma();
        double total = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            const double x = span_sigmas * rule.nodes[k];
            const double w = rule.weights[k] * std::exp(-0.5 * x * x);
            out[k] = {units::wavelength_nm(w0 + sigma * x), w};
            total += w;
        }
        for (auto& l : out) l.weight /= total;
    }
    if (nodes % 2 == 1) out[nodes / 2].wavelength_nm = spectrum.center_nm;
    std::reverse(out.begin(), out.end());
    return out;
}

struct EnsembleResult {
    Eigen::VectorXd averaged_populations;
    DensityState averaged_density;
    std::vector<SpectralLine> nodes;
    std::size_t n_system{};

    std::size_t node_count() const { return nodes.size(); }

    /// Population in the sink guides (explicit-sink networks).
    double sink_population() const {
        const auto n = static_cast<Eigen::Index>(n_system);
        return averaged_populations.size() > n
                   ? averaged_populations.tail(averaged_populations.size() - n).sum()
                   : 0.0;
    }

    double purity() const { return (averaged_density * averaged_density).trace().real(); }
};

/// Wavelength-averaged state after propagating ψ₀ a distance z through the
/// network (sink included) at every spectral node.
inline EnsembleResult ensemble_average(const NetworkSpec& net, const Spectrum& spectrum, const AmplitudeState& psi0,
                                       double z, std::size_t nodes, std::size_t workers = 1) {
    net.validate();
    if (z < 0.0) throw DomainError("ensemble_average: z must be non-negative");
    const auto dim = static_cast<Eigen::Index>(net.dimension());
    detail::check_normalized(psi0, dim);

    EnsembleResult result;
    result.nodes = spectral_nodes(spectrum, nodes);
    result.n_system = net.n_sites;

    const std::size_t count = result.nodes.size();
    std::vector<DensityState> contributions(count);
    parallel_for(count, workers, [&](std::size_t k) {
        const auto h = build_hamiltonian(net, result.nodes[k].wavelength_nm);
        const AmplitudeState psi = UnitaryPropagator(h).propagate(psi0, z);
        contributions[k] = result.nodes[k].weight * pure_density(psi);
    });

    result.averaged_density = quadrature::pairwise_sum<DensityState>(contributions);
    result.averaged_populations = result.averaged_density.diagonal().real();
    return result;
}

}  // namespace enaqt
