// config.hpp: JSON run configuration
//
// Keys carry their units. Site indices in files are 1-based; the library is
// 0-based. Unknown keys are rejected with the full key path.

#pragma once

#include <cstddef>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "enaqt/decoherence.hpp"
#include "enaqt/errors.hpp"
#include "enaqt/lattice.hpp"
#include "enaqt/propagate.hpp"

namespace enaqt::cli {

using json = nlohmann::ordered_json;

/// Configuration problem; always reported with exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    double z_cm{15.0};  // evaluation length for sweeps and checks
    double z_max_cm{15.0};
    double z_step_cm{0.1};
    double wavelength_min_nm{745.0};
    double wavelength_max_nm{835.0};
    double wavelength_step_nm{1.0};
    double bandwidth_max_nm{95.0};
    double bandwidth_step_nm{5.0};
    double gamma_max_per_cm{0.02};
    double gamma_step_per_cm{0.001};
    double extended_z_max_cm{500.0};
    double extended_z_step_cm{5.0};
    double extended_gamma_max_per_cm{0.5};
    double extended_gamma_step_per_cm{0.025};
    std::optional<double> kappa_per_cm;
    std::optional<std::size_t> dephasing_site;  // 0-based internally
    DephasingMode dephasing_mode{DephasingMode::single_site};
    double envelope_fraction{0.1};
};

struct NumericsConfig {
    std::size_t quadrature_nodes{41};
    std::size_t convergence_nodes{81};
    double convergence_tolerance{1e-4};
    double lindblad_tolerance{1e-9};
    double lindblad_initial_step_cm{0.01};
    double lindblad_max_step_cm{0.5};
    double band_average_step_nm{0.5};
    double no_return_threshold{1e-3};
    std::size_t no_return_samples{301};
};

struct RunConfig {
    NetworkSpec network;
    std::vector<Coupling> omitted_couplings;  // geometry estimates for the tight-binding check
    Spectrum spectrum{Spectrum::tophat(792.5, 95.0)};
    ExperimentConfig experiment;
    NumericsConfig numerics;
    std::string output_directory{"enaqt_output"};

    LindbladOptions lindblad_options() const {
        LindbladOptions o;
        o.tolerance = numerics.lindblad_tolerance;
        o.initial_step = numerics.lindblad_initial_step_cm;
        o.max_step = numerics.lindblad_max_step_cm;
        o.mode = experiment.dephasing_mode;
        return o;
    }
};

inline RunConfig default_config() {
    RunConfig cfg;
    cfg.network = enaqt4_network(1.0, 1.0, SinkSpec{});
    return cfg;
}

namespace detail {

inline std::string law_name(DetuningLaw law) {
    switch (law) {
        case DetuningLaw::inverse_lambda: return "inverse_lambda";
        case DetuningLaw::constant: return "constant";
        case DetuningLaw::exponential: return "exponential";
    }
    return "inverse_lambda";
}

inline std::string shape_name(SpectrumShape s) {
    switch (s) {
        case SpectrumShape::tophat: return "tophat";
        case SpectrumShape::gaussian: return "gaussian";
        case SpectrumShape::delta: return "delta";
        case SpectrumShape::discrete: return "discrete";
    }
    return "tophat";
}

inline std::string mode_name(DephasingMode m) {
    return m == DephasingMode::all_sites ? "all_sites" : "single_site";
}

/// Object view that records which keys were read and rejects the rest.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ConfigError(key_path(key) + ": required key is missing");
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return as_number(j_.at(key), key_path(key));
    }

    double positive(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (!(v > 0.0)) throw ConfigError(key_path(key) + ": must be positive");
        return v;
    }

    double non_negative(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (!(v >= 0.0)) throw ConfigError(key_path(key) + ": must be non-negative");
        return v;
    }

    std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum = 1) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum))
            throw ConfigError(key_path(key) + ": must be an integer >= " + std::to_string(minimum));
        return v.get<std::size_t>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
        return v.get<std::string>();
    }

    /// 1-based site index converted to 0-based.
    std::size_t site(const std::string& key, std::size_t n_sites) {
        const auto& v = raw(key);
        return site_value(v, key_path(key), n_sites);
    }

    static std::size_t site_value(const json& v, const std::string& path, std::size_t n_sites) {
        if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > static_cast<long long>(n_sites))
            throw ConfigError(path + ": site index must be an integer in 1.." + std::to_string(n_sites));
        return v.get<std::size_t>() - 1;
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path + ": must be finite");
        return d;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()) + ": unknown key");
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline Coupling parse_coupling(const json& j, const std::string& path, std::size_t n_sites) {
    Reader r(j, path);
    const auto& sites = r.raw("sites");
    if (!sites.is_array() || sites.size() != 2) throw ConfigError(r.key_path("sites") + ": expected two site indices");
    Coupling c;
    c.first = Reader::site_value(sites[0], r.key_path("sites") + "[0]", n_sites);
    c.second = Reader::site_value(sites[1], r.key_path("sites") + "[1]", n_sites);
    if (c.first == c.second) throw ConfigError(r.key_path("sites") + ": a site cannot couple to itself");
    c.coupling_per_cm = Reader::as_number(r.raw("coupling_per_cm"), r.key_path("coupling_per_cm"));
    r.finish();
    return c;
}

inline DispersionModel parse_dispersion(const json& j, const std::string& path) {
    Reader r(j, path);
    DispersionModel d;
    d.center_nm = r.positive("center_wavelength_nm", d.center_nm);
    d.beta0_per_cm = r.number("beta0_per_cm", d.beta0_per_cm);
    const auto law = r.text("detuning_law", law_name(d.detuning_law));
    if (law == "inverse_lambda") d.detuning_law = DetuningLaw::inverse_lambda;
    else if (law == "constant") d.detuning_law = DetuningLaw::constant;
    else if (law == "exponential") d.detuning_law = DetuningLaw::exponential;
    else throw ConfigError(r.key_path("detuning_law") + ": expected inverse_lambda, constant or exponential");
    d.detuning_slope_per_nm = r.number("detuning_slope_per_nm", d.detuning_slope_per_nm);
    d.coupling_slope_per_nm = r.number("coupling_slope_per_nm", d.coupling_slope_per_nm);
    r.has("note");  // free text, kept for humans
    r.finish();
    return d;
}

inline std::optional<SinkSpec> parse_sink(const json& j, const std::string& path) {
    if (j.is_boolean() && !j.get<bool>()) return std::nullopt;
    Reader r(j, path);
    SinkSpec s;
    s.n_sink = r.count("n_sink", s.n_sink);
    s.c_trap = r.positive("trap_coupling_per_cm", s.c_trap);
    s.c_sink = r.positive("chain_coupling_per_cm", s.c_sink);
    r.finish();
    return s;
}

inline void parse_network(const json& j, RunConfig& cfg) {
    Reader r(j, "network");
    NetworkSpec net;
    net.dispersion = r.has("dispersion") ? parse_dispersion(j.at("dispersion"), "network.dispersion") : DispersionModel{};
    std::optional<SinkSpec> sink = SinkSpec{};
    if (r.has("sink")) sink = parse_sink(j.at("sink"), "network.sink");
    else if (j.contains("sink")) sink = std::nullopt;  // explicit null: no sink

    if (r.has("preset")) {
        const auto preset = r.text("preset", "");
        if (preset != "enaqt4") throw ConfigError("network.preset: unknown preset '" + preset + "'");
        const double c = r.positive("coupling_per_cm", 1.0);
        const double delta = r.number("detuning_per_cm", 1.0);
        net = enaqt4_network(c, delta, sink, net.dispersion);
    } else {
        net.n_sites = r.count("n_sites", 0);
        if (!r.has("n_sites")) throw ConfigError("network.n_sites: required key is missing");
        if (r.has("site_detunings")) {
            const auto& arr = j.at("site_detunings");
            if (!arr.is_array()) throw ConfigError("network.site_detunings: expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const auto path = "network.site_detunings[" + std::to_string(i) + "]";
                Reader e(arr[i], path);
                SiteDetuning d;
                d.site = e.site("site", net.n_sites);
                d.detuning_per_cm = Reader::as_number(e.raw("detuning_per_cm"), e.key_path("detuning_per_cm"));
                e.finish();
                net.site_detunings.push_back(d);
            }
        }
        const auto& arr = r.raw("couplings");
        if (!arr.is_array()) throw ConfigError("network.couplings: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto path = "network.couplings[" + std::to_string(i) + "]";
            const auto c = parse_coupling(arr[i], path, net.n_sites);
            if (!(c.coupling_per_cm > 0.0)) throw ConfigError(path + ".coupling_per_cm: must be positive");
            net.couplings.push_back(c);
        }
        net.input_site = r.site("input_site", net.n_sites);
        net.target_site = r.site("target_site", net.n_sites);
        net.sink = sink;
    }

    if (r.has("omitted_couplings_per_cm")) {
        const auto& arr = j.at("omitted_couplings_per_cm");
        if (!arr.is_array()) throw ConfigError("network.omitted_couplings_per_cm: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.omitted_couplings.push_back(
                parse_coupling(arr[i], "network.omitted_couplings_per_cm[" + std::to_string(i) + "]", net.n_sites));
    }
    r.finish();
    try {
        net.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string(e.what()));
    }
    cfg.network = std::move(net);
}

inline Spectrum parse_spectrum(const json& j, double default_center) {
    Reader r(j, "spectrum");
    const auto shape = r.text("shape", "tophat");
    const double center = r.positive("center_wavelength_nm", default_center);
    Spectrum s;
    if (shape == "tophat" || shape == "gaussian") {
        const double width = r.non_negative("fwhm_nm", 95.0);
        s = shape == "tophat" ? Spectrum::tophat(center, width) : Spectrum::gaussian(center, width);
    } else if (shape == "delta") {
        s = Spectrum::delta(center);
    } else if (shape == "discrete") {
        const auto& arr = r.raw("lines");
        if (!arr.is_array() || arr.empty()) throw ConfigError("spectrum.lines: expected a non-empty array");
        std::vector<SpectralLine> lines;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader e(arr[i], "spectrum.lines[" + std::to_string(i) + "]");
            SpectralLine l;
            l.wavelength_nm = e.positive("wavelength_nm", 0.0);
            l.weight = e.non_negative("weight", 1.0);
            e.finish();
            lines.push_back(l);
        }
        try {
            s = Spectrum::discrete(center, std::move(lines));
        } catch (const ValidationError& e) {
            throw ConfigError(std::string("spectrum.lines: ") + e.what());
        }
    } else {
        throw ConfigError("spectrum.shape: expected tophat, gaussian, delta or discrete");
    }
    r.finish();
    try {
        s.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string(e.what()));
    }
    return s;
}

inline ExperimentConfig parse_experiment(const json& j, std::size_t n_sites) {
    Reader r(j, "experiment");
    ExperimentConfig e;
    e.z_cm = r.non_negative("z_cm", e.z_cm);
    e.z_max_cm = r.non_negative("z_max_cm", e.z_max_cm);
    e.z_step_cm = r.positive("z_step_cm", e.z_step_cm);
    e.wavelength_min_nm = r.positive("wavelength_min_nm", e.wavelength_min_nm);
    e.wavelength_max_nm = r.positive("wavelength_max_nm", e.wavelength_max_nm);
    e.wavelength_step_nm = r.positive("wavelength_step_nm", e.wavelength_step_nm);
    if (e.wavelength_max_nm < e.wavelength_min_nm)
        throw ConfigError("experiment.wavelength_max_nm: must not be below wavelength_min_nm");
    e.bandwidth_max_nm = r.non_negative("bandwidth_max_nm", e.bandwidth_max_nm);
    e.bandwidth_step_nm = r.positive("bandwidth_step_nm", e.bandwidth_step_nm);
    e.gamma_max_per_cm = r.non_negative("gamma_max_per_cm", e.gamma_max_per_cm);
    e.gamma_step_per_cm = r.positive("gamma_step_per_cm", e.gamma_step_per_cm);
    e.extended_z_max_cm = r.non_negative("extended_z_max_cm", e.extended_z_max_cm);
    e.extended_z_step_cm = r.positive("extended_z_step_cm", e.extended_z_step_cm);
    e.extended_gamma_max_per_cm = r.non_negative("extended_gamma_max_per_cm", e.extended_gamma_max_per_cm);
    e.extended_gamma_step_per_cm = r.positive("extended_gamma_step_per_cm", e.extended_gamma_step_per_cm);
    if (r.has("kappa_per_cm")) e.kappa_per_cm = r.non_negative("kappa_per_cm", 0.0);
    if (r.has("dephasing_site")) e.dephasing_site = r.site("dephasing_site", n_sites);
    const auto mode = r.text("dephasing_mode", mode_name(e.dephasing_mode));
    if (mode == "single_site") e.dephasing_mode = DephasingMode::single_site;
    else if (mode == "all_sites") e.dephasing_mode = DephasingMode::all_sites;
    else throw ConfigError("experiment.dephasing_mode: expected single_site or all_sites");
    e.envelope_fraction = r.non_negative("envelope_fraction", e.envelope_fraction);
    if (e.envelope_fraction >= 1.0) throw ConfigError("experiment.envelope_fraction: must be below 1");
    r.finish();
    return e;
}

inline NumericsConfig parse_numerics(const json& j) {
    Reader r(j, "numerics");
    NumericsConfig n;
    n.quadrature_nodes = r.count("quadrature_nodes", n.quadrature_nodes);
    n.convergence_nodes = r.count("convergence_nodes", n.convergence_nodes);
    n.convergence_tolerance = r.positive("convergence_tolerance", n.convergence_tolerance);
    n.lindblad_tolerance = r.positive("lindblad_tolerance", n.lindblad_tolerance);
    n.lindblad_initial_step_cm = r.positive("lindblad_initial_step_cm", n.lindblad_initial_step_cm);
    n.lindblad_max_step_cm = r.positive("lindblad_max_step_cm", n.lindblad_max_step_cm);
    n.band_average_step_nm = r.positive("band_average_step_nm", n.band_average_step_nm);
    n.no_return_threshold = r.positive("no_return_threshold", n.no_return_threshold);
    n.no_return_samples = r.count("no_return_samples", n.no_return_samples, 2);
    r.finish();
    return n;
}

}  // namespace detail

/// Parses a configuration document. Throws ConfigError naming the key path.
inline RunConfig parse_config_json(const json& doc) {
    detail::Reader r(doc, "");
    RunConfig cfg = default_config();
    detail::parse_network(r.raw("network"), cfg);
    const double center = cfg.network.dispersion.center_nm;
    cfg.spectrum = r.has("spectrum") ? detail::parse_spectrum(doc.at("spectrum"), center)
                                     : Spectrum::tophat(center, 95.0);
    if (r.has("experiment")) cfg.experiment = detail::parse_experiment(doc.at("experiment"), cfg.network.n_sites);
    if (r.has("numerics")) cfg.numerics = detail::parse_numerics(doc.at("numerics"));
    if (r.has("output")) {
        detail::Reader o(doc.at("output"), "output");
        cfg.output_directory = o.text("directory", cfg.output_directory);
        o.finish();
    }
    r.finish();
    return cfg;
}

/// Reads a file as JSON; an empty file reads as an empty object.
inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON (" + e.what() + ")");
    }
}

inline RunConfig parse_config(const std::string& path) { return parse_config_json(read_json_file(path)); }

/// Normalized configuration with every default filled in; parses back to
/// an identical RunConfig.
inline json to_json(const RunConfig& cfg) {
    const auto& net = cfg.network;
    const auto& d = net.dispersion;
    json network = json::object();
    network["n_sites"] = net.n_sites;
    network["site_detunings"] = json::array();
    for (const auto& sd : net.site_detunings)
        network["site_detunings"].push_back({{"site", sd.site + 1}, {"detuning_per_cm", sd.detuning_per_cm}});
    network["couplings"] = json::array();
    for (const auto& c : net.couplings)
        network["couplings"].push_back(
            {{"sites", json::array({c.first + 1, c.second + 1})}, {"coupling_per_cm", c.coupling_per_cm}});
    network["input_site"] = net.input_site + 1;
    network["target_site"] = net.target_site + 1;
    network["dispersion"] = {{"center_wavelength_nm", d.center_nm},
                             {"beta0_per_cm", d.beta0_per_cm},
                             {"detuning_law", detail::law_name(d.detuning_law)},
                             {"detuning_slope_per_nm", d.detuning_slope_per_nm},
                             {"coupling_slope_per_nm", d.coupling_slope_per_nm},
                             {"note", "slopes are placeholders; no measured device dispersion"}};
    if (net.sink)
        network["sink"] = {{"n_sink", net.sink->n_sink},
                           {"trap_coupling_per_cm", net.sink->c_trap},
                           {"chain_coupling_per_cm", net.sink->c_sink}};
    else
        network["sink"] = nullptr;
    network["omitted_couplings_per_cm"] = json::array();
    for (const auto& c : cfg.omitted_couplings)
        network["omitted_couplings_per_cm"].push_back(
            {{"sites", json::array({c.first + 1, c.second + 1})}, {"coupling_per_cm", c.coupling_per_cm}});

    const auto& s = cfg.spectrum;
    json spectrum = {{"shape", detail::shape_name(s.shape)}, {"center_wavelength_nm", s.center_nm}};
    if (s.shape == SpectrumShape::tophat || s.shape == SpectrumShape::gaussian) spectrum["fwhm_nm"] = s.fwhm_nm;
    if (s.shape == SpectrumShape::discrete) {
        spectrum["lines"] = json::array();
        for (const auto& l : s.lines) spectrum["lines"].push_back({{"wavelength_nm", l.wavelength_nm}, {"weight", l.weight}});
    }

    const auto& e = cfg.experiment;
    json experiment = {{"z_cm", e.z_cm},
                       {"z_max_cm", e.z_max_cm},
                       {"z_step_cm", e.z_step_cm},
                       {"wavelength_min_nm", e.wavelength_min_nm},
                       {"wavelength_max_nm", e.wavelength_max_nm},
                       {"wavelength_step_nm", e.wavelength_step_nm},
                       {"bandwidth_max_nm", e.bandwidth_max_nm},
                       {"bandwidth_step_nm", e.bandwidth_step_nm},
                       {"gamma_max_per_cm", e.gamma_max_per_cm},
                       {"gamma_step_per_cm", e.gamma_step_per_cm},
                       {"extended_z_max_cm", e.extended_z_max_cm},
                       {"extended_z_step_cm", e.extended_z_step_cm},
                       {"extended_gamma_max_per_cm", e.extended_gamma_max_per_cm},
                       {"extended_gamma_step_per_cm", e.extended_gamma_step_per_cm}};
    experiment["kappa_per_cm"] = e.kappa_per_cm ? json(*e.kappa_per_cm) : json(nullptr);
    experiment["dephasing_site"] = e.dephasing_site ? json(*e.dephasing_site + 1) : json(nullptr);
    experiment["dephasing_mode"] = detail::mode_name(e.dephasing_mode);
    experiment["envelope_fraction"] = e.envelope_fraction;

    const auto& n = cfg.numerics;
    json numerics = {{"quadrature_nodes", n.quadrature_nodes},
                     {"convergence_nodes", n.convergence_nodes},
                     {"convergence_tolerance", n.convergence_tolerance},
                     {"lindblad_tolerance", n.lindblad_tolerance},
                     {"lindblad_initial_step_cm", n.lindblad_initial_step_cm},
                     {"lindblad_max_step_cm", n.lindblad_max_step_cm},
                     {"band_average_step_nm", n.band_average_step_nm},
                     {"no_return_threshold", n.no_return_threshold},
                     {"no_return_samples", n.no_return_samples}};

    return {{"network", network},
            {"spectrum", spectrum},
            {"experiment", experiment},
            {"numerics", numerics},
            {"output", {{"directory", cfg.output_directory}}}};
}

}  // namespace enaqt::cli
