#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "enaqt/analysis.hpp"

using namespace enaqt;

namespace {

constexpr double kCenter = 792.5;

NetworkSpec reference_network() { return enaqt4_network(1.0, 1.0, SinkSpec{}); }

// Infinite-length trapped fraction from the spectrum of the effective
// generator: only modes with decay rate above `floor` empty out.
double asymptotic_trapped(const HamiltonianMatrix& h, double kappa, std::size_t target, std::size_t input,
                          double& slowest_rate) {
    const auto n = static_cast<Eigen::Index>(h.dimension());
    Eigen::MatrixXcd heff = h.entries.cast<std::complex<double>>();
    heff(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(target)) -= std::complex<double>(0.0, kappa / 2);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(heff);
    const Eigen::MatrixXcd v = es.eigenvectors();
    const Eigen::VectorXcd c = v.partialPivLu().solve(Eigen::VectorXcd::Unit(n, static_cast<Eigen::Index>(input)));
    Eigen::VectorXcd persistent = Eigen::VectorXcd::Zero(n);
    slowest_rate = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double rate = -2.0 * es.eigenvalues()(k).imag();
        if (rate < 1e-10)
            persistent += c(k) * v.col(k);
        else
            slowest_rate = std::min(slowest_rate, rate);
    }
    return 1.0 - persistent.squaredNorm();
}

}  // namespace

TEST(Efficiency, ReadsTraceOnGrid) {
    const auto net = reference_network();
    const auto h = build_hamiltonian(net, kCenter);
    const auto trace = evolve_unitary(h, site_state(h.dimension(), 0), {0.0, 5.0, 15.0});
    EXPECT_EQ(efficiency(trace, 0.0), 0.0);
    EXPECT_GT(efficiency(trace, 15.0), 0.0);
    EXPECT_THROW(efficiency(trace, 7.0), DomainError);
}

TEST(EnaqtMetric, Examples) {
    EXPECT_NEAR(enaqt_ratio(0.684, 0.636), 0.0755, 5e-5);
    EXPECT_THROW(enaqt_ratio(0.5, 0.0), DomainError);

    const std::vector<double> lambdas{780.0, 785.0, 790.0, 795.0, 800.0, 805.0};
    const std::vector<double> flat(lambdas.size(), 0.4);
    EXPECT_EQ(enaqt_metric(lambdas, flat, kCenter, 0.0), 0.0);
    EXPECT_NEAR(enaqt_metric(lambdas, flat, kCenter, 20.0), 0.0, 1e-15);

    std::vector<double> linear;
    for (double l : lambdas) linear.push_back(0.3 + 0.01 * (l - kCenter));
    EXPECT_NEAR(enaqt_metric(lambdas, linear, kCenter, 20.0), 0.0, 1e-14);

    EXPECT_THROW(enaqt_metric(lambdas, flat, kCenter, 40.0), DomainError);
    EXPECT_THROW(enaqt_metric(lambdas, flat, kCenter, -1.0), DomainError);
}

TEST(EnaqtMetric, ScaleInvariantAndMatchesDirectAverage) {
    const std::vector<double> lambdas{782.5, 787.5, 792.5, 797.5, 802.5};
    const std::vector<double> eta{0.8, 0.6, 0.5, 0.6, 0.8};
    // trapezoid mean over the whole grid: (0.4 + 0.6 + 0.6 + 0.4) * 5 / 20
    EXPECT_NEAR(enaqt_metric(lambdas, eta, kCenter, 20.0), (0.625 - 0.5) / 0.5, 1e-14);
    std::vector<double> scaled = eta;
    for (double& e : scaled) e *= 3.7;
    EXPECT_NEAR(enaqt_metric(lambdas, scaled, kCenter, 20.0), enaqt_metric(lambdas, eta, kCenter, 20.0), 1e-14);
}

TEST(DarkState, ReferenceNetworkHasOneDarkMode) {
    const auto net = reference_network();
    const auto report = dark_state_diagnostics(build_hamiltonian(net, kCenter), 2, std::size_t{0});
    ASSERT_EQ(report.dark_modes.size(), 1u);
    EXPECT_NEAR(report.efficiency_bound, 2.0 / 3.0, 1e-12);
    const Eigen::VectorXd mode = report.modes.col(static_cast<Eigen::Index>(report.dark_modes[0]));
    const double sign = mode(0) > 0 ? 1.0 : -1.0;
    Eigen::VectorXd expected(4);
    expected << 1.0, 1.0, 0.0, -1.0;
    expected /= std::sqrt(3.0);
    EXPECT_LT((sign * mode - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(report.energies(static_cast<Eigen::Index>(report.dark_modes[0])), 1.0, 1e-12);
}

TEST(DarkState, DetunedAwayFromResonanceHasNone) {
    const auto net = enaqt4_network(1.0, 1.2, SinkSpec{});
    const auto report = dark_state_diagnostics(build_hamiltonian(net, kCenter), 2, std::size_t{0});
    EXPECT_TRUE(report.dark_modes.empty());
    EXPECT_NEAR(report.efficiency_bound, 1.0, 1e-12);
}

TEST(DarkState, ResonantPairHasNone) {
    NetworkSpec net;
    net.n_sites = 2;
    net.couplings = {{0, 1, 1.0}};
    net.target_site = 1;
    const auto report = dark_state_diagnostics(build_hamiltonian(net, kCenter), 1, std::size_t{0});
    EXPECT_TRUE(report.dark_modes.empty());
    EXPECT_EQ(report.efficiency_bound, 1.0);
}

TEST(DarkState, DegenerateSpaceRotatedToOneBrightMode) {
    // star: centre 0 coupled equally to three leaves, target leaf 1
    NetworkSpec net;
    net.n_sites = 4;
    net.couplings = {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}};
    net.target_site = 1;
    const auto report = dark_state_diagnostics(build_hamiltonian(net, kCenter), 1, std::size_t{2});
    // leaves 2, 3 antisymmetric combination never touches leaf 1
    EXPECT_EQ(report.dark_modes.size(), 1u);
    EXPECT_NEAR(report.efficiency_bound, 0.5, 1e-12);
}

TEST(DarkState, BoundMatchesLongTrappedEvolution) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coupling(0.5, 2.0);
    std::uniform_real_distribution<double> detuning(-2.0, 2.0);
    std::uniform_real_distribution<double> kappa_dist(1.0, 10.0);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        NetworkSpec net;
        if (trial % 2 == 0) {
            const double c = coupling(rng);
            net = enaqt4_network(c, c, std::nullopt);
        } else {
            net.n_sites = 4;
            net.site_detunings = {{1, detuning(rng)}, {3, detuning(rng)}};
            net.couplings = {{0, 1, coupling(rng)}, {1, 2, coupling(rng)}, {2, 3, coupling(rng)}, {0, 3, coupling(rng)}};
            net.target_site = 2;
        }
        const double kappa = kappa_dist(rng);
        const auto h = build_hamiltonian(net, kCenter);
        const auto report = dark_state_diagnostics(h, net.target_site, std::size_t{0});
        double slowest = 0.0;
        const double oracle = asymptotic_trapped(h, kappa, net.target_site, 0, slowest);
        EXPECT_NEAR(report.efficiency_bound, oracle, 1e-9) << "trial " << trial;
        if (slowest < 1e-3) continue;
        const double z = 40.0 / slowest;
        const auto trace = evolve_trapped(h, kappa, net.target_site, site_state(4, 0), {z});
        EXPECT_NEAR(efficiency(trace, z), report.efficiency_bound, 1e-6) << "trial " << trial;
        if (trial % 2 == 0) EXPECT_NEAR(report.efficiency_bound, 2.0 / 3.0, 1e-9);
        ++checked;
    }
    EXPECT_GE(checked, 15);
}

TEST(SweepWavelength, FlatWithoutDispersion) {
    DispersionModel disp;
    disp.detuning_law = DetuningLaw::constant;
    disp.coupling_slope_per_nm = 0.0;
    const auto net = enaqt4_network(1.0, 1.0, SinkSpec{}, disp);
    const auto sweep = sweep_wavelength(net, 760.0, 830.0, 10.0, 15.0);
    const auto eta = sweep.column("efficiency");
    ASSERT_EQ(eta.size(), 8u);
    for (double e : eta) EXPECT_EQ(e, eta.front());
}

TEST(SweepWavelength, SlopeSignFlipMirrorsSweep) {
    for (auto law : {DetuningLaw::constant, DetuningLaw::exponential}) {
        DispersionModel up;
        up.detuning_law = law;
        up.detuning_slope_per_nm = 0.004;
        up.coupling_slope_per_nm = 0.01;
        DispersionModel down = up;
        down.detuning_slope_per_nm = -up.detuning_slope_per_nm;
        down.coupling_slope_per_nm = -up.coupling_slope_per_nm;
        const auto a = sweep_wavelength(enaqt4_network(1.0, 1.0, SinkSpec{}, up), 772.5, 812.5, 1.0, 15.0);
        const auto b = sweep_wavelength(enaqt4_network(1.0, 1.0, SinkSpec{}, down), 772.5, 812.5, 1.0, 15.0);
        const auto ea = a.column("efficiency");
        auto eb = b.column("efficiency");
        std::reverse(eb.begin(), eb.end());
        for (std::size_t k = 0; k < ea.size(); ++k) EXPECT_NEAR(ea[k], eb[k], 1e-12);
    }
}

TEST(SweepWavelength, DeterministicAcrossWorkers) {
    const auto net = reference_network();
    const auto one = sweep_wavelength(net, 745.0, 835.0, 5.0, 15.0, 1);
    const auto many = sweep_wavelength(net, 745.0, 835.0, 5.0, 15.0, 4);
    std::ostringstream a, b;
    one.write_csv(a);
    many.write_csv(b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(one.metadata.at("network_hash"), network_hash(net));
}

TEST(SweepWavelength, CsvLayout) {
    const auto sweep = sweep_wavelength(reference_network(), 790.0, 792.0, 1.0, 15.0);
    std::ostringstream os;
    sweep.write_csv(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "wavelength_nm,efficiency");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_THROW(sweep.column("nope"), std::out_of_range);
}

TEST(TheoryModel, Defaults) {
    const auto m = theory_model(reference_network());
    EXPECT_EQ(m.dephasing_site, 3u);
    EXPECT_EQ(m.target, 2u);
    EXPECT_NEAR(m.kappa, calibration::effective_trap_rate(1.5 / 1.75, 1.75), 1e-15);
    EXPECT_THROW(theory_model(enaqt4_network(1.0, 1.0, std::nullopt)), ValidationError);
    EXPECT_NO_THROW(theory_model(enaqt4_network(1.0, 1.0, std::nullopt), {.kappa = 3.0}));
}

TEST(SweepBandwidth, ZeroAtZeroBandwidthAndGrowing) {
    BandwidthOptions opts;
    const auto result = sweep_bandwidth(reference_network(), {0.0, 30.0, 60.0, 95.0}, 15.0, opts);
    for (const char* col : {"enaqt_ensemble", "enaqt_band_average", "enaqt_lindblad"}) {
        const auto v = result.column(col);
        EXPECT_NEAR(v[0], 0.0, 1e-12) << col;
        for (std::size_t k = 1; k < v.size(); ++k) EXPECT_GT(v[k], v[k - 1]) << col << " row " << k;
    }
    const auto lo = result.column("enaqt_lindblad_low");
    const auto mid = result.column("enaqt_lindblad");
    const auto hi = result.column("enaqt_lindblad_high");
    for (std::size_t k = 0; k < mid.size(); ++k) {
        EXPECT_LE(lo[k], mid[k]);
        EXPECT_GE(hi[k], mid[k]);
    }
    EXPECT_EQ(result.column("gamma_per_cm")[0], 0.0);
    EXPECT_THROW(sweep_bandwidth(enaqt4_network(1.0, 1.0, std::nullopt), {0.0}, 15.0), ValidationError);
}

TEST(EnaqtMap, ReferenceRowAndGrowthWithDephasing) {
    const std::vector<double> zs{0.0, 5.0, 15.0, 60.0};
    const std::vector<double> gammas{0.0, 0.01, 0.02, 0.05};
    const auto map = enaqt_map(reference_network(), zs, gammas);
    ASSERT_EQ(map.rows.size(), zs.size() * gammas.size());
    for (std::size_t k = 0; k < zs.size(); ++k) {
        EXPECT_EQ(map.rows[k * gammas.size()][3], 0.0);
        EXPECT_EQ(map.rows[k * gammas.size()][0], zs[k]);
    }
    // at z = 60 the dark-state population leaks out faster with more dephasing
    const std::size_t last = (zs.size() - 1) * gammas.size();
    for (std::size_t g = 1; g < gammas.size(); ++g)
        EXPECT_GT(map.rows[last + g][2], map.rows[last + g - 1][2]);
    EXPECT_TRUE(map.metadata.count("kappa_per_cm"));
}

TEST(SweepBandwidth, NarrowbandOnly) {
    const auto result = sweep_bandwidth(reference_network(), {0.0}, 15.0);
    ASSERT_EQ(result.rows.size(), 1u);
    EXPECT_EQ(result.column("enaqt_ensemble")[0], 0.0);
    EXPECT_EQ(result.column("enaqt_band_average")[0], 0.0);
}
