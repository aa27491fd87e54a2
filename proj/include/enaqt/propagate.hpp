// propagate.hpp: evolution engines
//
// Three engines, all pure functions of (H, initial state, z grid):
//   evolve_unitary : exp(−iHz)ψ₀ from a real-symmetric eigendecomposition
//   evolve_trapped : exp(−i(H − iκ/2·|t⟩⟨t|)z)ψ₀, irreversible loss at the target
//   evolve_lindblad: master equation with trapping and pure dephasing, RK4
//                     with step-doubling error control
// The propagation coordinate z (cm) plays the role of time.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "enaqt/errors.hpp"
#include "enaqt/lattice.hpp"

namespace enaqt {

using cplx = std::complex<double>;
using AmplitudeState = Eigen::VectorXcd;
using DensityState = Eigen::MatrixXcd;

struct EvolutionTrace {
    std::vector<double> z_grid;
    std::vector<Eigen::VectorXd> populations;  // every modelled site, per z
    std::vector<double> sink_population;
    std::vector<DensityState> densities;       // filled by evolve_lindblad only
    std::size_t n_system{};

    std::size_t size() const { return z_grid.size(); }

    double system_population(std::size_t k) const {
        return populations[k].head(static_cast<Eigen::Index>(n_system)).sum();
    }
};

inline AmplitudeState site_state(std::size_t dimension, std::size_t site) {
    if (site >= dimension) throw ValidationError("site_state: index out of range");
    AmplitudeState psi = AmplitudeState::Zero(static_cast<Eigen::Index>(dimension));
    psi(static_cast<Eigen::Index>(site)) = 1.0;
    return psi;
}

inline DensityState pure_density(const AmplitudeState& psi) { return psi * psi.adjoint(); }

/// Evenly spaced grid 0, step, …, z_max (z_max included).
inline std::vector<double> uniform_grid(double z_max, double step) {
    if (!(step > 0.0) || z_max < 0.0) throw DomainError("uniform_grid: need step > 0 and z_max >= 0");
    const auto n = static_cast<std::size_t>(std::llround(z_max / step));
    std::vector<double> grid(n + 1);
    for (std::size_t k = 0; k <= n; ++k) grid[k] = static_cast<double>(k) * step;
    grid.back() = z_max;
    return grid;
}

namespace detail {

inline void check_grid(const std::vector<double>& z_grid) {
    double prev = 0.0;
    for (double z : z_grid) {
        if (!std::isfinite(z) || z < prev) throw DomainError("z grid must be finite, non-negative and sorted");
        prev = z;
    }
}

inline void check_symmetric(const HamiltonianMatrix& h) {
    const double scale = std::max(1.0, h.entries.cwiseAbs().maxCoeff());
    if ((h.entries - h.entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError("Hamiltonian is not symmetric");
}

inline void check_normalized(const AmplitudeState& psi, Eigen::Index dim) {
    if (psi.size() != dim) throw ValidationError("initial state dimension does not match Hamiltonian");
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-9) throw ValidationError("initial state is not normalized");
}

inline Eigen::VectorXd populations_of(const AmplitudeState& psi) { return psi.cwiseAbs2(); }

inline double sink_sum(const Eigen::VectorXd& pops, std::size_t n_system) {
    const auto n = static_cast<Eigen::Index>(n_system);
    return pops.size() > n ? pops.tail(pops.size() - n).sum() : 0.0;
}

}  // namespace detail

/// Cached eigendecomposition of a real-symmetric Hamiltonian.
class UnitaryPropagator {
public:
    explicit UnitaryPropagator(const HamiltonianMatrix& h) : n_system_(h.n_system) {
        detail::check_symmetric(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.entries);
        if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
        energies_ = solver.eigenvalues();
        modes_ = solver.eigenvectors();
    }

    AmplitudeState propagate(const AmplitudeState& psi0, double z) const {
        if (z == 0.0) return psi0;
        const Eigen::VectorXcd coeffs = modes_.transpose().cast<cplx>() * psi0;
        Eigen::VectorXcd phased(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
            phased(k) = std::polar(1.0, -energies_(k) * z) * coeffs(k);
        return modes_.cast<cplx>() * phased;
    }

    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& modes() const { return modes_; }
    std::size_t n_system() const { return n_system_; }

private:
    std::size_t n_system_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd modes_;
};

inline EvolutionTrace evolve_unitary(const HamiltonianMatrix& h, const AmplitudeState& psi0,
                                     const std::vector<double>& z_grid) {
    detail::check_grid(z_grid);
    detail::check_normalized(psi0, h.entries.rows());
    const UnitaryPropagator prop(h);

    EvolutionTrace trace;
    trace.z_grid = z_grid;
    trace.n_system = h.n_system;
    for (double z : z_grid) {
        auto pops = detail::populations_of(prop.propagate(psi0, z));
        trace.sink_population.push_back(detail::sink_sum(pops, h.n_system));
        trace.populations.push_back(std::move(pops));
    }
    return trace;
}

/// Non-Hermitian generator −i(H − iκ/2·|t⟩⟨t|).
inline Eigen::MatrixXcd trapped_generator(const HamiltonianMatrix& h, double kappa, std::size_t target) {
    if (kappa < 0.0) throw DomainError("trapping rate must be non-negative");
    if (target >= h.dimension()) throw ValidationError("target index out of range");
    Eigen::MatrixXcd a = cplx(0.0, -1.0) * h.entries.cast<cplx>();
    const auto t = static_cast<Eigen::Index>(target);
    a(t, t) -= 0.5 * kappa;
    return a;
}

inline EvolutionTrace evolve_trapped(const HamiltonianMatrix& h, double kappa, std::size_t target,
                                     const AmplitudeState& psi0, const std::vector<double>& z_grid) {
    detail::check_grid(z_grid);
    detail::check_symmetric(h);
    detail::check_normalized(psi0, h.entries.rows());
    const Eigen::MatrixXcd generator = trapped_generator(h, kappa, target);
    const double norm0 = psi0.squaredNorm();

    EvolutionTrace trace;
    trace.z_grid = z_grid;
    trace.n_system = h.dimension();
    for (double z : z_grid) {
        const AmplitudeState psi = z == 0.0 ? psi0 : AmplitudeState((generator * z).exp() * psi0);
        if (!psi.allFinite()) throw NumericalError("matrix exponential produced non-finite values");
        trace.sink_population.push_back(norm0 - psi.squaredNorm());
        trace.populations.push_back(detail::populations_of(psi));
    }
    return trace;
}

enum class DephasingMode {
    single_site,  // coherences between one site and all others
    all_sites,    // every off-diagonal coherence
};

struct LindbladOptions {
    double tolerance{1e-9};  // per-step absolute error on ρ entries
    double initial_step{0.01};
    double max_step{0.5};
    DephasingMode mode{DephasingMode::single_site};
    bool keep_densities{true};
};

/// dρ/dz = −i(H_eff ρ − ρ H_eff†) − γ·(M ∘ ρ), with H_eff = H − iκ/2·|t⟩⟨t| and
/// M the mask of dephased coherences (decay rate γ, not γ/2).
class LindbladGenerator {
public:
    LindbladGenerator(const HamiltonianMatrix& h, double kappa, std::size_t target, double gamma,
                      std::size_t dephasing_site, DephasingMode mode) {
        if (gamma < 0.0) throw DomainError("dephasing rate must be non-negative");
        if (dephasing_site >= h.dimension()) throw ValidationError("dephasing site out of range");
        heff_ = cplx(0.0, 1.0) * trapped_generator(h, kappa, target);  // H − iκ/2 P
        const auto n = h.entries.rows();
        const auto d = static_cast<Eigen::Index>(dephasing_site);
        mask_ = Eigen::MatrixXd::Zero(n, n);
        if (mode == DephasingMode::all_sites) {
            mask_.setOnes();
            mask_.diagonal().setZero();
        } else {
            mask_.row(d).setOnes();
            mask_.col(d).setOnes();
            mask_(d, d) = 0.0;
        }
        mask_ *= gamma;
    }

    DensityState operator()(const DensityState& rho) const {
        DensityState out = cplx(0.0, -1.0) * (heff_ * rho - rho * heff_.adjoint());
        out.array() -= mask_.array().cast<cplx>() * rho.array();
        return out;
    }

private:
    Eigen::MatrixXcd heff_;
    Eigen::MatrixXd mask_;
};

namespace detail {

inline DensityState rk4_step(const LindbladGenerator& f, const DensityState& y, double h) {
    const DensityState k1 = f(y);
    const DensityState k2 = f(y + (0.5 * h) * k1);
    const DensityState k3 = f(y + (0.5 * h) * k2);
    const DensityState k4 = f(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

inline EvolutionTrace evolve_lindblad(const HamiltonianMatrix& h, double kappa, std::size_t target,
                                      double gamma, std::size_t dephasing_site, const DensityState& rho0,
                                      const std::vector<double>& z_grid, const LindbladOptions& opts = {}) {
    detail::check_grid(z_grid);
    detail::check_symmetric(h);
    const auto n = h.entries.rows();
    if (rho0.rows() != n || rho0.cols() != n) throw ValidationError("initial density dimension mismatch");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ValidationError("initial density is not Hermitian");

    const LindbladGenerator f(h, kappa, target, gamma, dephasing_site, opts.mode);
    const double trace0 = rho0.trace().real();

    EvolutionTrace trace;
    trace.z_grid = z_grid;
    trace.n_system = h.dimension();

    DensityState rho = rho0;
    double z = 0.0;
    double step = opts.initial_step;
    constexpr std::size_t max_steps = 100'000'000;
    std::size_t steps = 0;

    auto record = [&] {
        trace.populations.push_back(rho.diagonal().real());
        trace.sink_population.push_back(trace0 - rho.trace().real());
        if (opts.keep_densities) trace.densities.push_back(rho);
    };

    for (double z_target : z_grid) {
        while (z < z_target) {
            const double remaining = z_target - z;
            const bool clamped = step >= remaining;
            const double h_try = clamped ? remaining : step;

            const DensityState full = detail::rk4_step(f, rho, h_try);
            const DensityState half = detail::rk4_step(f, detail::rk4_step(f, rho, 0.5 * h_try), 0.5 * h_try);
            const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
            if (!std::isfinite(err)) throw NumericalError("evolve_lindblad: non-finite state at z=" + std::to_string(z));

            const double factor = err > 0.0 ? std::clamp(0.9 * std::pow(opts.tolerance / err, 0.2), 0.2, 2.0) : 2.0;
            if (err <= opts.tolerance) {
                rho = half;
                z = clamped ? z_target : z + h_try;
                // a grid-clamped step says nothing about the proposal size
                if (!clamped || factor < 1.0) step = std::min(opts.max_step, h_try * factor);
            } else {
                step = h_try * factor;
            }
            if (step < 1e-14 * std::max(1.0, z)) {
                std::ostringstream msg;
                msg << "evolve_lindblad: step size underflow at z=" << z << " (step=" << step
                    << ", error=" << err << ", tolerance=" << opts.tolerance << ")";
                throw NumericalError(msg.str());
            }
            if (++steps > max_steps) throw NumericalError("evolve_lindblad: step limit exceeded");
        }
        record();
    }
    return trace;
}

struct NoReturnReport {
    double last_guide_max_population{};
    double system_change_max{};  // vs a chain longer by `extension` guides
    double threshold{1e-3};
    std::size_t n_sink{};
    std::size_t extension{5};

    bool passed() const {
        return last_guide_max_population <= threshold && system_change_max <= threshold;
    }
};

/// Checks that light reaching the far end of the sink chain does not return
/// to the system guides within z_max.
inline NoReturnReport sink_no_return_check(const NetworkSpec& net, double z_max, double lambda_nm,
                                           std::size_t z_samples = 301, std::size_t extension = 5,
                                           double threshold = 1e-3) {
    if (!net.sink) throw ValidationError("sink_no_return_check: network has no explicit sink");
    if (z_max < 0.0) throw DomainError("sink_no_return_check: z_max must be non-negative");

    std::vector<double> grid(std::max<std::size_t>(z_samples, 2));
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = z_max * static_cast<double>(k) / static_cast<double>(grid.size() - 1);

    NetworkSpec longer = net;
    longer.sink->n_sink += extension;

    const auto h = build_hamiltonian(net, lambda_nm);
    const auto h_long = build_hamiltonian(longer, lambda_nm);
    const auto base = evolve_unitary(h, site_state(h.dimension(), net.input_site), grid);
    const auto ext = evolve_unitary(h_long, site_state(h_long.dimension(), net.input_site), grid);

    NoReturnReport report;
    report.threshold = threshold;
    report.n_sink = net.sink->n_sink;
    report.extension = extension;
    const auto ns = static_cast<Eigen::Index>(net.n_sites);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& p = base.populations[k];
        report.last_guide_max_population = std::max(report.last_guide_max_population, p(p.size() - 1));
        const double change = (p.head(ns) - ext.populations[k].head(ns)).cwiseAbs().maxCoeff();
        report.system_change_max = std::max(report.system_change_max, change);
    }
    return report;
}

}  // namespace enaqt
