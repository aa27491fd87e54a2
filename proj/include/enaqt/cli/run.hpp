// run.hpp: command-line entry point
//
//   enaqt <subcommand> [config.json | manifest.json] [--workers N] [--output DIR]
//   enaqt map --extended
//   enaqt calibrate samples.csv
//   enaqt --print-defaults
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical
// failure or failed invariant check.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "enaqt/analysis.hpp"
#include "enaqt/calibration.hpp"
#include "enaqt/cli/config.hpp"
#include "enaqt/decoherence.hpp"
#include "enaqt/errors.hpp"
#include "enaqt/propagate.hpp"
#include "enaqt/version.hpp"

namespace enaqt::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_failure = 3;

inline constexpr const char* output_env_var = "ENAQT_OUTPUT_DIR";
inline constexpr const char* manifest_kind = "enaqt-run-manifest";

struct RunOptions {
    std::string subcommand;
    std::string input_path;  // config, manifest or (calibrate) sample CSV
    std::size_t workers{1};
    bool extended{false};
    std::string output_override;
};

/// One file written by a run, kept in memory until the run succeeds.
struct OutputFile {
    std::string name;
    std::string content;
    std::size_t rows{};
};

struct RunResult {
    std::vector<OutputFile> files;
    json metadata = json::object();
    json result = json::object();
    bool passed{true};
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline OutputFile csv_file(const std::string& name, const SweepResult& sweep) {
    std::ostringstream os;
    sweep.write_csv(os);
    return {name, os.str(), sweep.rows.size()};
}

inline json metadata_json(const SweepResult& sweep) {
    json j = json::object();
    for (const auto& [k, v] : sweep.metadata) j[k] = v;
    return j;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- calibrate input ------------------------------------------------------

inline std::vector<calibration::CouplingSample> read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::vector<calibration::CouplingSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected separation_um,coupling_per_cm");
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        char* end_a = nullptr;
        char* end_b = nullptr;
        const double s = std::strtod(a.c_str(), &end_a);
        const double c = std::strtod(b.c_str(), &end_b);
        const bool numeric = end_a != a.c_str() && end_b != b.c_str();
        if (!numeric) {
            if (out.empty() && line_no == 1) continue;  // header
            throw ConfigError(path + ":" + std::to_string(line_no) + ": non-numeric row");
        }
        out.push_back({s, c});
    }
    if (out.size() < 2) throw ConfigError(path + ": need at least two samples");
    return out;
}

// ---- subcommands ------------------------------------------------------------

inline TheoryOptions theory_options(const RunConfig& cfg) {
    TheoryOptions t;
    t.kappa = cfg.experiment.kappa_per_cm;
    t.dephasing_site = cfg.experiment.dephasing_site;
    return t;
}

inline std::vector<std::string> trace_columns(std::size_t n_sites) {
    std::vector<std::string> cols{"z_cm"};
    for (std::size_t m = 0; m < n_sites; ++m) cols.push_back("population_site" + std::to_string(m + 1));
    cols.push_back("efficiency");
    return cols;
}

inline RunResult simulate(const RunConfig& cfg, std::size_t workers) {
    const auto& net = cfg.network;
    const auto grid = uniform_grid(cfg.experiment.z_max_cm, cfg.experiment.z_step_cm);
    const auto ns = static_cast<Eigen::Index>(net.n_sites);
    RunResult out;

    if (net.sink) {
        const auto nodes = spectral_nodes(cfg.spectrum, cfg.numerics.quadrature_nodes);
        std::vector<EvolutionTrace> traces(nodes.size());
        parallel_for(nodes.size(), workers, [&](std::size_t k) {
            const auto h = build_hamiltonian(net, nodes[k].wavelength_nm);
            traces[k] = evolve_unitary(h, site_state(h.dimension(), net.input_site), grid);
        });
        SweepResult explicit_run;
        explicit_run.columns = trace_columns(net.n_sites);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Eigen::VectorXd pops = Eigen::VectorXd::Zero(ns);
            double sink = 0.0;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                pops += nodes[k].weight * traces[k].populations[i].head(ns);
                sink += nodes[k].weight * traces[k].sink_population[i];
            }
            std::vector<double> row{grid[i]};
            for (Eigen::Index m = 0; m < ns; ++m) row.push_back(pops(m));
            row.push_back(sink);
            explicit_run.rows.push_back(std::move(row));
        }
        out.files.push_back(csv_file("simulate_explicit.csv", explicit_run));
        out.metadata["spectral_nodes"] = nodes.size();
    }

    const auto model = theory_model(net, theory_options(cfg));
    const double gamma = cfg.spectrum.is_monochromatic() || model.dephasing_detuning == 0.0
                             ? 0.0
                             : decoherence_strength(cfg.spectrum, model.dephasing_detuning, cfg.spectrum.center_nm);
    const auto psi0 = site_state(model.system.dimension(), model.input);
    EvolutionTrace effective;
    if (gamma == 0.0) {
        effective = evolve_trapped(model.system, model.kappa, model.target, psi0, grid);
    } else {
        auto lopts = cfg.lindblad_options();
        lopts.keep_densities = false;
        effective = evolve_lindblad(model.system, model.kappa, model.target, gamma, model.dephasing_site,
                                    pure_density(psi0), grid, lopts);
    }
    SweepResult eff;
    eff.columns = trace_columns(net.n_sites);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (Eigen::Index m = 0; m < ns; ++m) row.push_back(effective.populations[i](m));
        row.push_back(effective.sink_population[i]);
        eff.rows.push_back(std::move(row));
    }
    out.files.push_back(csv_file("simulate_effective.csv", eff));
    out.metadata["network_hash"] = network_hash(net);
    out.metadata["kappa_per_cm"] = model.kappa;
    out.metadata["gamma_per_cm"] = gamma;
    out.metadata["engine_explicit"] = "unitary-eigendecomposition";
    out.metadata["engine_effective"] = gamma == 0.0 ? "non-hermitian-expm" : "lindblad-rk4-step-doubling";
    return out;
}

inline RunResult sweep_wavelength_cmd(const RunConfig& cfg, std::size_t workers) {
    const auto& e = cfg.experiment;
    const auto sweep =
        sweep_wavelength(cfg.network, e.wavelength_min_nm, e.wavelength_max_nm, e.wavelength_step_nm, e.z_cm, workers);
    RunResult out;
    out.files.push_back(csv_file("sweep-wavelength.csv", sweep));
    out.metadata = metadata_json(sweep);
    out.metadata["z_cm"] = e.z_cm;
    out.result["minimum_wavelength_nm"] = minimum_wavelength(sweep);
    return out;
}

inline RunResult sweep_bandwidth_cmd(const RunConfig& cfg, std::size_t workers) {
    BandwidthOptions opts;
    opts.nodes = cfg.numerics.quadrature_nodes;
    opts.wavelength_step_nm = cfg.numerics.band_average_step_nm;
    opts.envelope_fraction = cfg.experiment.envelope_fraction;
    opts.theory = theory_options(cfg);
    opts.lindblad = cfg.lindblad_options();
    opts.workers = workers;
    const auto widths = linear_grid(0.0, cfg.experiment.bandwidth_max_nm, cfg.experiment.bandwidth_step_nm);
    const auto sweep = sweep_bandwidth(cfg.network, widths, cfg.experiment.z_cm, opts);
    RunResult out;
    out.files.push_back(csv_file("sweep-bandwidth.csv", sweep));
    out.metadata = metadata_json(sweep);
    out.metadata["z_cm"] = cfg.experiment.z_cm;
    return out;
}

inline RunResult map_cmd(const RunConfig& cfg, std::size_t workers, bool extended) {
    const auto& e = cfg.experiment;
    const auto z_grid = extended ? uniform_grid(e.extended_z_max_cm, e.extended_z_step_cm)
                                 : uniform_grid(e.z_max_cm, e.z_step_cm);
    const auto gamma_grid = extended ? linear_grid(0.0, e.extended_gamma_max_per_cm, e.extended_gamma_step_per_cm)
                                     : linear_grid(0.0, e.gamma_max_per_cm, e.gamma_step_per_cm);
    MapOptions opts;
    opts.theory = theory_options(cfg);
    opts.lindblad = cfg.lindblad_options();
    opts.workers = workers;
    const auto sweep = enaqt_map(cfg.network, z_grid, gamma_grid, opts);
    RunResult out;
    out.files.push_back(csv_file("map.csv", sweep));
    out.metadata = metadata_json(sweep);
    out.metadata["extended"] = extended;
    return out;
}

inline RunResult calibrate_cmd(const std::vector<calibration::CouplingSample>& samples) {
    const auto curve = calibration::fit_coupling_curve(samples);
    double rms = 0.0;
    for (double r : curve.log_residuals) rms += r * r;
    rms = std::sqrt(rms / static_cast<double>(curve.log_residuals.size()));

    json fit = {{"amplitude_per_cm", curve.amplitude_per_cm},
                {"decay_length_um", curve.decay_length_um},
                {"rms_log_residual", rms},
                {"samples", samples.size()},
                {"separation_min_um", curve.min_separation()},
                {"separation_max_um", curve.max_separation()}};
    RunResult out;
    out.files.push_back({"calibrate.json", fit.dump(2) + "\n", 1});
    out.result = fit;
    return out;
}

struct CheckLine {
    std::string name;
    double value{};
    double threshold{};
    bool passed{};
    std::string detail;
};

inline RunResult check_cmd(const RunConfig& cfg, std::size_t workers, std::ostream& os) {
    const auto& net = cfg.network;
    const auto& e = cfg.experiment;
    const double center = net.dispersion.center_nm;
    std::vector<CheckLine> lines;

    // infinite-length bound from the dark modes caps any trapped evolution
    const auto model = theory_model(net, theory_options(cfg));
    const auto dark = dark_state_diagnostics(model.system, model.target, model.input);
    {
        const double z_long = e.extended_z_max_cm;
        const auto trace = evolve_trapped(model.system, model.kappa, model.target,
                                          site_state(model.system.dimension(), model.input), {z_long});
        const double eta = trace.sink_population.back();
        lines.push_back({"dark_state_bound", eta - dark.efficiency_bound, 1e-9,
                         eta <= dark.efficiency_bound + 1e-9,
                         std::to_string(dark.dark_modes.size()) + " dark mode(s), bound " + fmt(dark.efficiency_bound) +
                             ", trapped " + fmt(eta) + " at z=" + fmt(z_long) + " cm"});
    }

    {
        double mass_error = 0.0;
        const auto h = build_hamiltonian(net, center);
        const auto trace = evolve_unitary(h, site_state(h.dimension(), net.input_site), {e.z_cm});
        mass_error = std::abs(trace.populations.back().sum() - 1.0);
        lines.push_back({"unitarity", mass_error, 1e-10, mass_error <= 1e-10, "total population at z=" + fmt(e.z_cm)});
    }

    {
        auto lopts = cfg.lindblad_options();
        const auto grid = uniform_grid(e.z_max_cm, std::max(e.z_max_cm / 10.0, e.z_step_cm));
        const auto trace = evolve_lindblad(model.system, model.kappa, model.target, e.gamma_max_per_cm,
                                           model.dephasing_site,
                                           pure_density(site_state(model.system.dimension(), model.input)), grid, lopts);
        double worst = 0.0;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            const auto& rho = trace.densities[k];
            worst = std::max(worst, std::abs(rho.trace().real() + trace.sink_population[k] - 1.0));
            worst = std::max(worst, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
            worst = std::max(worst, -es.eigenvalues().minCoeff());
        }
        lines.push_back({"lindblad_physical", worst, 1e-7, worst <= 1e-7,
                         "trace, hermiticity, positivity at gamma=" + fmt(e.gamma_max_per_cm) + " /cm"});
    }

    if (net.sink) {
        const double z_max = std::max(e.z_cm, e.z_max_cm);
        for (double lambda : {center, e.wavelength_min_nm, e.wavelength_max_nm}) {
            const auto r = sink_no_return_check(net, z_max, lambda, cfg.numerics.no_return_samples, 5,
                                                cfg.numerics.no_return_threshold);
            lines.push_back({"no_return@" + fmt(lambda) + "nm",
                             std::max(r.last_guide_max_population, r.system_change_max), r.threshold, r.passed(),
                             "n_sink=" + std::to_string(r.n_sink) + ", last guide max " +
                                 fmt(r.last_guide_max_population) + ", extension change " + fmt(r.system_change_max)});
        }

        const auto spectrum = Spectrum::tophat(center, e.bandwidth_max_nm);
        const auto psi0 = site_state(net.dimension(), net.input_site);
        const double a = ensemble_average(net, spectrum, psi0, e.z_cm, cfg.numerics.quadrature_nodes, workers)
                             .sink_population();
        const double b = ensemble_average(net, spectrum, psi0, e.z_cm, cfg.numerics.convergence_nodes, workers)
                             .sink_population();
        lines.push_back({"quadrature_convergence", std::abs(a - b), cfg.numerics.convergence_tolerance,
                         std::abs(a - b) < cfg.numerics.convergence_tolerance,
                         std::to_string(cfg.numerics.quadrature_nodes) + " vs " +
                             std::to_string(cfg.numerics.convergence_nodes) + " nodes at " + fmt(e.bandwidth_max_nm) +
                             " nm"});
    }

    {
        const auto tb = validate_tight_binding(net, cfg.omitted_couplings);
        double worst = 0.0;
        for (const auto& c : cfg.omitted_couplings) worst = std::max(worst, std::abs(c.coupling_per_cm) / tb.min_retained_coupling);
        lines.push_back({"tight_binding", worst, tb.threshold_fraction, tb.passed(),
                         std::to_string(cfg.omitted_couplings.size()) + " omitted coupling estimate(s)"});
    }

    RunResult out;
    std::ostringstream csv;
    csv << "check,value,threshold,passed\n";
    json results = json::array();
    for (const auto& l : lines) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d", l.value, l.threshold, l.passed ? 1 : 0);
        csv << l.name << ',' << buf << '\n';
        os << (l.passed ? "PASS " : "FAIL ") << l.name << ": " << l.detail << '\n';
        results.push_back({{"check", l.name}, {"value", l.value}, {"threshold", l.threshold}, {"passed", l.passed}});
        out.passed = out.passed && l.passed;
    }
    out.files.push_back({"check.csv", csv.str(), lines.size()});
    out.result["checks"] = results;
    out.metadata["network_hash"] = network_hash(net);
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace detail

/// Loads the run input: a configuration, or a manifest whose embedded
/// configuration (and inputs) replace it.
struct LoadedInput {
    RunConfig config;
    std::vector<calibration::CouplingSample> samples;
    bool from_manifest{false};
    bool extended{false};
};

inline LoadedInput load_input(const RunOptions& opts) {
    LoadedInput in;
    in.config = default_config();
    in.extended = opts.extended;
    if (opts.input_path.empty()) return in;

    const bool csv_input = opts.subcommand == "calibrate" &&
                           std::filesystem::path(opts.input_path).extension() != ".json";
    if (csv_input) {
        in.samples = detail::read_samples_csv(opts.input_path);
        return in;
    }

    const json doc = read_json_file(opts.input_path);
    if (doc.is_object() && doc.contains("kind") && doc.at("kind") == manifest_kind) {
        if (!doc.contains("subcommand") || doc.at("subcommand") != opts.subcommand)
            throw ConfigError(opts.input_path + ": manifest was written by a different subcommand");
        in.config = parse_config_json(doc.at("config"));
        in.from_manifest = true;
        if (doc.contains("options") && doc.at("options").contains("extended"))
            in.extended = doc.at("options").at("extended").get<bool>() || opts.extended;
        if (opts.subcommand == "calibrate") {
            for (const auto& row : doc.at("inputs").at("samples"))
                in.samples.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
        }
        return in;
    }
    if (opts.subcommand == "calibrate") throw ConfigError(opts.input_path + ": expected a sample CSV or a manifest");
    in.config = parse_config_json(doc);
    return in;
}

/// Executes one subcommand and writes its outputs. Returns the exit code.
inline int execute(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const auto started = std::chrono::system_clock::now();
        const auto t0 = std::chrono::steady_clock::now();
        const LoadedInput input = load_input(opts);
        const RunConfig& cfg = input.config;

        std::string directory = cfg.output_directory;
        if (const char* env = std::getenv(output_env_var); env && *env) directory = env;
        if (!opts.output_override.empty()) directory = opts.output_override;

        RunResult result;
        json inputs = json::object();
        if (opts.subcommand == "simulate") {
            result = detail::simulate(cfg, opts.workers);
        } else if (opts.subcommand == "sweep-wavelength") {
            result = detail::sweep_wavelength_cmd(cfg, opts.workers);
        } else if (opts.subcommand == "sweep-bandwidth") {
            result = detail::sweep_bandwidth_cmd(cfg, opts.workers);
        } else if (opts.subcommand == "map") {
            result = detail::map_cmd(cfg, opts.workers, input.extended);
        } else if (opts.subcommand == "calibrate") {
            if (input.samples.empty()) throw ConfigError("calibrate: a sample CSV is required");
            result = detail::calibrate_cmd(input.samples);
            inputs["samples"] = json::array();
            for (const auto& s : input.samples) inputs["samples"].push_back({s.separation_um, s.coupling_per_cm});
            out << result.result.dump(2) << '\n';
        } else if (opts.subcommand == "check") {
            result = detail::check_cmd(cfg, opts.workers, out);
        } else {
            throw ConfigError("unknown subcommand '" + opts.subcommand + "'");
        }

        std::filesystem::create_directories(directory);
        json outputs = json::array();
        for (const auto& f : result.files) {
            detail::write_file(std::filesystem::path(directory) / f.name, f.content);
            outputs.push_back({{"file", f.name}, {"rows", f.rows}, {"fnv1a64", detail::hex64(fnv1a64(f.content))}});
        }

        const json config_echo = to_json(cfg);
        const std::string hashed = config_echo.dump() + inputs.dump();
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json manifest = {{"kind", manifest_kind},
                         {"version", std::string(version)},
                         {"subcommand", opts.subcommand},
                         {"options", {{"extended", input.extended}}},
                         {"config", config_echo},
                         {"inputs", inputs},
                         {"input_hash", detail::hex64(fnv1a64(hashed))},
                         {"source", opts.input_path.empty() ? "defaults" : opts.input_path},
                         {"started_utc", detail::utc_timestamp(started)},
                         {"finished_utc", detail::utc_timestamp(std::chrono::system_clock::now())},
                         {"wall_time_s", wall},
                         {"workers", opts.workers},
                         {"outputs", outputs},
                         {"metadata", result.metadata},
                         {"result", result.result},
                         {"passed", result.passed}};
        const auto manifest_path = std::filesystem::path(directory) / (opts.subcommand + ".manifest.json");
        detail::write_file(manifest_path, manifest.dump(2) + "\n");

        for (const auto& f : result.files) err << "wrote " << (std::filesystem::path(directory) / f.name).string() << '\n';
        err << "wrote " << manifest_path.string() << '\n';
        return result.passed ? exit_ok : exit_failure;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_failure;
    } catch (const FitError& e) {
        err << "fit failure: " << e.what() << '\n';
        return exit_failure;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_failure;
    }
}

/// Parses argv and runs. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Environment-assisted transport in waveguide networks", "enaqt"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    RunOptions opts;
    opts.workers = std::max(1u, std::thread::hardware_concurrency());
    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");
    app.add_option("--workers", opts.workers, "Maximum worker threads")->check(CLI::PositiveNumber);
    app.add_option("--output", opts.output_override,
                   std::string("Output directory (overrides ") + output_env_var + " and the config)");
    app.set_version_flag("--version", std::string(version));

    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "Dynamics with the explicit sink chain and the effective trapping model"},
        {"sweep-wavelength", "Coherent efficiency across wavelength"},
        {"sweep-bandwidth", "Enhancement against illumination bandwidth"},
        {"map", "Dephasing-model efficiency over propagation length and decoherence strength"},
        {"calibrate", "Fit coupling against waveguide separation"},
        {"check", "Run the invariant suite"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        if (name == "calibrate") {
            sub->add_option("samples", opts.input_path, "CSV of separation_um,coupling_per_cm (or a manifest)")
                ->required();
        } else {
            sub->add_option("config", opts.input_path, "Configuration or manifest JSON (default: built-in network)");
        }
        if (name == "map") sub->add_flag("--extended", opts.extended, "Long-length, strong-dephasing grid");
    }

    std::vector<std::string> argv_store{"enaqt"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    if (print_defaults) {
        out << to_json(default_config()).dump(2) << '\n';
        return exit_ok;
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
        err << app.help();
        return exit_usage;
    }
    opts.subcommand = subs.front()->get_name();
    return execute(opts, out, err);
}

inline int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}

}  // namespace enaqt::cli
