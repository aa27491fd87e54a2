#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "enaqt/cli/run.hpp"

namespace fs = std::filesystem;
using namespace enaqt;
using namespace enaqt::cli;

namespace {

std::string source_dir() {
    const char* env = std::getenv("ENAQT_SOURCE_DIR");
    return env ? env : ".";
}

std::string bundled_config() { return source_dir() + "/configs/paper_network.json"; }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("enaqt_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv(output_env_var);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    int cli(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

std::string config_error(const std::string& text) {
    try {
        parse_config_json(json::parse(text));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseConfig, BundledNetwork) {
    const auto cfg = parse_config(bundled_config());
    EXPECT_EQ(describe(cfg.network), describe(enaqt4_network(1.0, 1.0, SinkSpec{})));
    EXPECT_EQ(cfg.omitted_couplings.size(), 3u);
    EXPECT_EQ(cfg.spectrum.shape, SpectrumShape::tophat);
    EXPECT_EQ(cfg.spectrum.fwhm_nm, 95.0);
}

TEST(ParseConfig, PresetMatchesExplicitForm) {
    const auto cfg = parse_config_json(json::parse(R"({"network": {"preset": "enaqt4"}})"));
    EXPECT_EQ(describe(cfg.network), describe(parse_config(bundled_config()).network));
    const auto no_sink = parse_config_json(json::parse(R"({"network": {"preset": "enaqt4", "sink": null}})"));
    EXPECT_FALSE(no_sink.network.sink.has_value());
}

TEST(ParseConfig, DefaultsRoundTrip) {
    const auto echo = to_json(default_config());
    const auto again = to_json(parse_config_json(echo));
    EXPECT_EQ(echo.dump(), again.dump());
    const auto bundled = parse_config(bundled_config());
    EXPECT_EQ(to_json(parse_config_json(to_json(bundled))).dump(), to_json(bundled).dump());
}

TEST(ParseConfig, ErrorsNameTheKey) {
    EXPECT_NE(config_error("{}").find("network"), std::string::npos);
    EXPECT_NE(config_error(R"({"network": {"preset": "enaqt4", "coupling_per_cm": -1}})").find("network.coupling_per_cm"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"network": {"n_sites": 2, "couplings": [{"sites": [1, 2], "coupling_per_cm": -1}],
                                           "input_site": 1, "target_site": 2}})")
                  .find("network.couplings[0].coupling_per_cm"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"network": {"preset": "enaqt4", "sink": {"n_sink": 10, "bogus": 1}}})")
                  .find("network.sink.bogus"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"network": {"preset": "enaqt4"}, "spectrum": {"shape": "lorentzian"}})")
                  .find("spectrum.shape"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"network": {"n_sites": 2, "couplings": [], "input_site": 3, "target_site": 2}})")
                  .find("network.input_site"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"network": {"preset": "enaqt4"}, "numerics": {"quadrature_nodes": 0}})")
                  .find("numerics.quadrature_nodes"),
              std::string::npos);
}

TEST_F(CliTest, ExitCodesForBadInput) {
    EXPECT_EQ(cli({"simulate", path("missing.json")}), exit_usage);
    const auto empty = write("empty.json", "");
    EXPECT_EQ(cli({"simulate", empty}), exit_usage);
    EXPECT_NE(err_.str().find("network"), std::string::npos);
    const auto bad = write("bad.json", "{not json");
    EXPECT_EQ(cli({"simulate", bad}), exit_usage);
    EXPECT_EQ(cli({"frobnicate"}), exit_usage);
    EXPECT_EQ(cli({}), exit_usage);
    EXPECT_EQ(cli({"sweep-wavelength", "--workers", "0"}), exit_usage);
}

TEST_F(CliTest, PrintDefaultsIsAValidConfig) {
    EXPECT_EQ(cli({"--print-defaults"}), exit_ok);
    const auto cfg = parse_config_json(json::parse(out_.str()));
    EXPECT_EQ(describe(cfg.network), describe(default_config().network));
}

TEST_F(CliTest, NumericalFailureExitsThree) {
    const auto cfg = write("tight.json", R"({"network": {"preset": "enaqt4"},
        "experiment": {"gamma_max_per_cm": 0.01, "z_max_cm": 2},
        "numerics": {"lindblad_tolerance": 1e-30}})");
    EXPECT_EQ(cli({"map", cfg, "--output", path("out")}), exit_failure);
    EXPECT_NE(err_.str().find("underflow"), std::string::npos);
}

TEST_F(CliTest, SweepWavelengthDefaultGrid) {
    ASSERT_EQ(cli({"sweep-wavelength", bundled_config(), "--output", path("out")}), exit_ok) << err_.str();
    std::istringstream csv(slurp(path("out/sweep-wavelength.csv")));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "wavelength_nm,efficiency");
    std::vector<std::string> rows;
    while (std::getline(csv, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 91u);
    EXPECT_EQ(rows.front().substr(0, 4), "745,");
    EXPECT_EQ(rows.back().substr(0, 4), "835,");

    const auto manifest = json::parse(slurp(path("out/sweep-wavelength.manifest.json")));
    EXPECT_EQ(manifest.at("kind"), manifest_kind);
    EXPECT_EQ(manifest.at("version"), std::string(version));
    EXPECT_EQ(manifest.at("outputs").at(0).at("file"), "sweep-wavelength.csv");
    EXPECT_TRUE(manifest.contains("started_utc"));
    EXPECT_TRUE(manifest.contains("wall_time_s"));
    EXPECT_EQ(manifest.at("config").dump(), to_json(parse_config(bundled_config())).dump());
}

TEST_F(CliTest, IdenticalBytesAcrossWorkerCounts) {
    const auto cfg = write("small.json", R"({"network": {"preset": "enaqt4"},
        "experiment": {"bandwidth_max_nm": 40, "bandwidth_step_nm": 10, "wavelength_step_nm": 5,
                       "z_max_cm": 5, "z_step_cm": 0.5, "gamma_max_per_cm": 0.02, "gamma_step_per_cm": 0.005}})");
    for (const std::string sub : {"sweep-wavelength", "sweep-bandwidth", "map", "simulate"}) {
        std::map<std::string, std::string> reference;
        for (const std::string workers : {"1", "2", "8"}) {
            const auto out = path("w" + workers);
            ASSERT_EQ(cli({sub, cfg, "--workers", workers, "--output", out}), exit_ok) << err_.str();
            const auto manifest = json::parse(slurp(out + "/" + sub + ".manifest.json"));
            for (const auto& f : manifest.at("outputs")) {
                const std::string name = f.at("file");
                const auto bytes = slurp(out + "/" + name);
                if (workers == "1")
                    reference[name] = bytes;
                else
                    EXPECT_EQ(bytes, reference[name]) << sub << " " << name << " workers " << workers;
            }
        }
    }
}

TEST_F(CliTest, ManifestRerunReproducesBytes) {
    const auto cfg = write("small.json", R"({"network": {"preset": "enaqt4"},
        "experiment": {"bandwidth_max_nm": 30, "bandwidth_step_nm": 15}})");
    ASSERT_EQ(cli({"sweep-bandwidth", cfg, "--output", path("a")}), exit_ok) << err_.str();
    ASSERT_EQ(cli({"sweep-bandwidth", path("a/sweep-bandwidth.manifest.json"), "--output", path("b")}), exit_ok)
        << err_.str();
    EXPECT_EQ(slurp(path("a/sweep-bandwidth.csv")), slurp(path("b/sweep-bandwidth.csv")));

    // a manifest from one subcommand cannot drive another
    EXPECT_EQ(cli({"map", path("a/sweep-bandwidth.manifest.json"), "--output", path("c")}), exit_usage);
}

TEST_F(CliTest, ExtendedMapRecordedInManifest) {
    const auto cfg = write("ext.json", R"({"network": {"preset": "enaqt4"},
        "experiment": {"extended_z_max_cm": 20, "extended_z_step_cm": 10,
                       "extended_gamma_max_per_cm": 0.5, "extended_gamma_step_per_cm": 0.25}})");
    ASSERT_EQ(cli({"map", cfg, "--extended", "--output", path("a")}), exit_ok) << err_.str();
    const auto first = slurp(path("a/map.csv"));
    EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 1 + 3 * 3);
    ASSERT_EQ(cli({"map", path("a/map.manifest.json"), "--output", path("b")}), exit_ok);
    EXPECT_EQ(slurp(path("b/map.csv")), first);
}

TEST_F(CliTest, OutputDirectoryPrecedence) {
    const auto cfg = write("cfg.json", "{\"network\": {\"preset\": \"enaqt4\"}, \"output\": {\"directory\": \"" +
                                           path("from_config") + "\"}}");
    ASSERT_EQ(cli({"sweep-wavelength", cfg}), exit_ok);
    EXPECT_TRUE(fs::exists(path("from_config/sweep-wavelength.csv")));

    setenv(output_env_var, path("from_env").c_str(), 1);
    ASSERT_EQ(cli({"sweep-wavelength", cfg}), exit_ok);
    EXPECT_TRUE(fs::exists(path("from_env/sweep-wavelength.csv")));

    ASSERT_EQ(cli({"sweep-wavelength", cfg, "--output", path("from_flag")}), exit_ok);
    EXPECT_TRUE(fs::exists(path("from_flag/sweep-wavelength.csv")));
    unsetenv(output_env_var);
}

TEST_F(CliTest, CheckPassesOnReferenceNetwork) {
    EXPECT_EQ(cli({"check", bundled_config(), "--output", path("out")}), exit_ok) << out_.str() << err_.str();
    EXPECT_EQ(out_.str().find("FAIL"), std::string::npos);
    EXPECT_NE(out_.str().find("PASS no_return"), std::string::npos);
    EXPECT_NE(out_.str().find("PASS quadrature_convergence"), std::string::npos);
    EXPECT_NE(out_.str().find("PASS dark_state_bound"), std::string::npos);
}

TEST_F(CliTest, CheckFailsOnShortSink) {
    const auto cfg = write("short.json", R"({"network": {"preset": "enaqt4", "sink": {"n_sink": 8}}})");
    EXPECT_EQ(cli({"check", cfg, "--output", path("out")}), exit_failure);
    EXPECT_NE(out_.str().find("FAIL no_return"), std::string::npos);
}

TEST_F(CliTest, CheckFlagsLargeOmittedCoupling) {
    const auto cfg = write("tb.json", R"({"network": {"preset": "enaqt4",
        "omitted_couplings_per_cm": [{"sites": [1, 3], "coupling_per_cm": 0.2}]}})");
    EXPECT_EQ(cli({"check", cfg, "--output", path("out")}), exit_failure);
    EXPECT_NE(out_.str().find("FAIL tight_binding"), std::string::npos);
}

TEST_F(CliTest, CalibrateRecoversExponential) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "separation_um,coupling_per_cm\n";
    for (double s : {10.0, 12.0, 14.0, 16.0}) csv << s << ',' << 50.0 * std::exp(-s / 4.0) << '\n';
    const auto samples = write("samples.csv", csv.str());
    ASSERT_EQ(cli({"calibrate", samples, "--output", path("a")}), exit_ok) << err_.str();
    const auto fit = json::parse(slurp(path("a/calibrate.json")));
    EXPECT_NEAR(fit.at("amplitude_per_cm").get<double>(), 50.0, 1e-9);
    EXPECT_NEAR(fit.at("decay_length_um").get<double>(), 4.0, 1e-12);

    ASSERT_EQ(cli({"calibrate", path("a/calibrate.manifest.json"), "--output", path("b")}), exit_ok) << err_.str();
    EXPECT_EQ(slurp(path("a/calibrate.json")), slurp(path("b/calibrate.json")));

    const auto bad = write("bad.csv", "separation_um,coupling_per_cm\n10,1\n12,abc\n");
    EXPECT_EQ(cli({"calibrate", bad, "--output", path("c")}), exit_usage);
    const auto nonpositive = write("neg.csv", "10,1\n12,-1\n");
    EXPECT_EQ(cli({"calibrate", nonpositive, "--output", path("c")}), exit_failure);
}

TEST_F(CliTest, SimulateWritesBothModels) {
    const auto cfg = write("sim.json", R"({"network": {"preset": "enaqt4"},
        "spectrum": {"shape": "delta"}, "experiment": {"z_max_cm": 15, "z_step_cm": 0.5}})");
    ASSERT_EQ(cli({"simulate", cfg, "--output", path("out")}), exit_ok) << err_.str();
    for (const char* name : {"simulate_explicit.csv", "simulate_effective.csv"}) {
        const auto text = slurp(path("out/") + name);
        EXPECT_EQ(text.substr(0, text.find('\n')),
                  "z_cm,population_site1,population_site2,population_site3,population_site4,efficiency");
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 32);
    }
}
