// lattice.hpp: waveguide network description and tight-binding Hamiltonian
//
// A network is a set of single-mode guides (sites) with per-site detunings
// and pairwise evanescent couplings, optionally terminated by a sink: a
// uniform chain of tightly coupled guides attached to the target site.
// Diagonal entries carry β_m(λ) and off-diagonal entries C_mn(λ); the common
// offset β is kept at beta0 (zero by default) since only differences affect
// populations.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "enaqt/errors.hpp"

namespace enaqt {

enum class DetuningLaw {
    inverse_lambda,  // Δβ(λ) = Δβ(λ₀)·λ₀/λ  (constant effective-index difference)
    constant,        // Δβ(λ) = Δβ(λ₀)
    exponential,     // Δβ(λ) = Δβ(λ₀)·exp(σ_Δ·(λ−λ₀))
};

struct DispersionModel {
    double center_nm{792.5};
    double beta0_per_cm{0.0};
    DetuningLaw detuning_law{DetuningLaw::inverse_lambda};
    double detuning_slope_per_nm{0.0};  // exponential law only
    // Placeholder: no measured coupling dispersion is available for the device.
    double coupling_slope_per_nm{0.01};

    double detuning_at(double detuning0, double lambda_nm) const {
        switch (detuning_law) {
            case DetuningLaw::inverse_lambda:
                return detuning0 * (center_nm / lambda_nm);
            case DetuningLaw::constant:
                return detuning0;
            case DetuningLaw::exponential:
                return detuning0 * std::exp(detuning_slope_per_nm * (lambda_nm - center_nm));
        }
        return detuning0;
    }

    double coupling_at(double coupling0, double lambda_nm) const {
        return coupling0 * std::exp(coupling_slope_per_nm * (lambda_nm - center_nm));
    }
};

struct SinkSpec {
    std::size_t n_sink{100};
    double c_trap{1.5};   // target ↔ first sink guide
    double c_sink{1.75};  // between neighbouring sink guides

    void validate() const {
        if (n_sink < 1) throw ValidationError("sink: n_sink must be at least 1");
        if (!(c_trap > 0.0) || !std::isfinite(c_trap))
            throw ValidationError("sink: trap coupling must be positive");
        if (!(c_sink > 0.0) || !std::isfinite(c_sink))
            throw ValidationError("sink: sink coupling must be positive");
    }
};

struct SiteDetuning {
    std::size_t site{};
    double detuning_per_cm{};
};

struct Coupling {
    std::size_t first{};
    std::size_t second{};
    double coupling_per_cm{};
};

/// Declarative network. Site indices are zero-based.
struct NetworkSpec {
    std::size_t n_sites{};
    std::vector<SiteDetuning> site_detunings;
    std::vector<Coupling> couplings;
    DispersionModel dispersion;
    std::optional<SinkSpec> sink;
    std::size_t input_site{};
    std::size_t target_site{};

    std::size_t dimension() const { return n_sites + (sink ? sink->n_sink : 0); }

    void validate() const {
        if (n_sites < 1) throw ValidationError("network: at least one site required");
        if (input_site >= n_sites) throw ValidationError("network: input site out of range");
        if (target_site >= n_sites) throw ValidationError("network: target site out of range");

        std::set<std::size_t> detuned;
        for (const auto& d : site_detunings) {
            if (d.site >= n_sites) throw ValidationError("network: detuned site out of range");
            if (!std::isfinite(d.detuning_per_cm))
                throw ValidationError("network: detuning must be finite");
            if (!detuned.insert(d.site).second)
                throw ValidationError("network: site " + std::to_string(d.site) + " detuned twice");
        }

        std::set<std::pair<std::size_t, std::size_t>> pairs;
        for (const auto& c : couplings) {
            if (c.first >= n_sites || c.second >= n_sites)
                throw ValidationError("network: coupling index out of range");
            if (c.first == c.second) throw ValidationError("network: self-coupling is not allowed");
            if (!(c.coupling_per_cm > 0.0) || !std::isfinite(c.coupling_per_cm))
                throw ValidationError("network: coupling must be positive");
            const auto key = std::minmax(c.first, c.second);
            if (!pairs.insert(key).second)
                throw ValidationError("network: coupling (" + std::to_string(key.first) + ", " +
                                      std::to_string(key.second) + ") listed twice");
        }
        if (!(dispersion.center_nm > 0.0)) throw ValidationError("dispersion: center wavelength must be positive");
        if (sink) sink->validate();
    }

    /// Detuning at λ₀ of every site, zero where unlisted.
    std::vector<double> detunings() const {
        std::vector<double> out(n_sites, 0.0);
        for (const auto& d : site_detunings) out[d.site] = d.detuning_per_cm;
        return out;
    }
};

/// Real-symmetric Hamiltonian (cm⁻¹) at one wavelength. The first
/// `n_system` rows are network sites; any remaining rows are sink guides.
struct HamiltonianMatrix {
    Eigen::MatrixXd entries;
    double wavelength_nm{};
    std::size_t n_system{};

    std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
    bool has_sink() const { return dimension() > n_system; }

    HamiltonianMatrix system_block() const {
        const auto n = static_cast<Eigen::Index>(n_system);
        return {entries.topLeftCorner(n, n), wavelength_nm, n_system};
    }
};

/// The four-site chain 1–2–3–4 with site 4 detuned: input site 1, target
/// site 3, sink (if any) attached at site 3.
inline NetworkSpec enaqt4_network(double c, double delta_beta, std::optional<SinkSpec> sink,
                                  DispersionModel dispersion = {}) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("enaqt4: coupling must be positive");
    NetworkSpec net;
    net.n_sites = 4;
    net.site_detunings = {{3, delta_beta}};
    net.couplings = {{0, 1, c}, {1, 2, c}, {2, 3, c}};
    net.dispersion = dispersion;
    net.sink = std::move(sink);
    net.input_site = 0;
    net.target_site = 2;
    net.validate();
    return net;
}

inline HamiltonianMatrix build_hamiltonian(const NetworkSpec& net, double lambda_nm) {
    if (!(lambda_nm > 0.0)) throw DomainError("build_hamiltonian: wavelength must be positive");
    net.validate();

    const auto& disp = net.dispersion;
    const auto dim = static_cast<Eigen::Index>(net.dimension());
    HamiltonianMatrix h{Eigen::MatrixXd::Zero(dim, dim), lambda_nm, net.n_sites};
    auto& m = h.entries;

    m.diagonal().setConstant(disp.beta0_per_cm);
    for (const auto& d : net.site_detunings) {
        const auto i = static_cast<Eigen::Index>(d.site);
        m(i, i) += disp.detuning_at(d.detuning_per_cm, lambda_nm);
    }
    for (const auto& c : net.couplings) {
        const auto i = static_cast<Eigen::Index>(c.first);
        const auto j = static_cast<Eigen::Index>(c.second);
        const double v = disp.coupling_at(c.coupling_per_cm, lambda_nm);
        m(i, j) = v;
        m(j, i) = v;
    }
    if (net.sink) {
        const auto t = static_cast<Eigen::Index>(net.target_site);
        const auto s0 = static_cast<Eigen::Index>(net.n_sites);
        const double trap = disp.coupling_at(net.sink->c_trap, lambda_nm);
        const double chain = disp.coupling_at(net.sink->c_sink, lambda_nm);
        m(t, s0) = trap;
        m(s0, t) = trap;
        for (Eigen::Index k = s0; k + 1 < dim; ++k) {
            m(k, k + 1) = chain;
            m(k + 1, k) = chain;
        }
    }
    return h;
}

struct TightBindingFlag {
    Coupling estimate;
    double fraction{};  // estimate / smallest retained coupling
};

struct TightBindingReport {
    double min_retained_coupling{};
    double threshold_fraction{0.05};
    std::vector<TightBindingFlag> flagged;

    bool passed() const { return flagged.empty(); }
};

/// Checks that couplings omitted from the model (estimated from geometry by
/// the caller) stay below `threshold_fraction` of the weakest coupling kept.
inline TightBindingReport validate_tight_binding(const NetworkSpec& net,
                                                 std::span<const Coupling> omitted,
                                                 double threshold_fraction = 0.05) {
    TightBindingReport report;
    report.threshold_fraction = threshold_fraction;
    double min_c = std::numeric_limits<double>::infinity();
    for (const auto& c : net.couplings) min_c = std::min(min_c, c.coupling_per_cm);
    if (net.sink) min_c = std::min({min_c, net.sink->c_trap, net.sink->c_sink});
    report.min_retained_coupling = min_c;

    for (const auto& e : omitted) {
        const double fraction = std::abs(e.coupling_per_cm) / min_c;
        if (fraction > threshold_fraction) report.flagged.push_back({e, fraction});
    }
    return report;
}

}  // namespace enaqt
