#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

const char* kTomlConfig = R"cfg(
# benchmark map study
[model]
R_s = 8.9462
lambda = 0.1144
L_d = 0.2055
L_q = 0.332
pole_pairs = 3
I_max = 0.18
V_max = 36.0

[[space.param]]
name = "R_s"
nominal = 8.9462
rel_halfwidth = 0.05

[[space.param]]
name = "lambda"
nominal = 0.1144
rel_halfwidth = 0.05

[[space.param]]
name = "L_d"
nominal = 0.2055
rel_halfwidth = 0.05

[[space.param]]
name = "L_q"
nominal = 0.332
rel_halfwidth = 0.05

[operating]
kind = "grid"
t_min = 0.0
t_max = 0.09
n_t = 8
omega_min = 0.0
omega_max = 150.0
n_omega = 29
clip_to_envelope = true

[method]
kind = "pce"
degree = 2
oversampling = 2.0
seed = 42

[reduction]
threshold = 0.01
fixed = ["L_d", "L_q"]

[output]
directory = "out/map_study"
)cfg";

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("TOML-style config round trip") {
    const auto dir = testkit::scratch_dir("config_toml");
    const auto path = write_file(dir, "run.toml", kTomlConfig);
    const auto cfg = emuq::load_config(path);

    CHECK(cfg.model.r_s == 8.9462);
    CHECK(cfg.model.i_max == 0.18);
    CHECK(cfg.model.pole_pairs == 3);
    REQUIRE(cfg.space.size() == 4);
    CHECK(cfg.space.param(0).name == "R_s");
    CHECK(cfg.space.param(3).name == "L_q");  // declaration order preserved
    CHECK(cfg.grid_mode);
    CHECK(cfg.grid.n_t == 8);
    CHECK(cfg.grid.n_omega == 29);
    CHECK(cfg.grid.clip_to_envelope);
    CHECK(cfg.method.method == emuq::GsaMethod::Pce);
    CHECK(cfg.method.degree == 2);
    CHECK(cfg.method.seed == 42);
    CHECK(cfg.reduction_threshold == 0.01);
    REQUIRE(cfg.reduction_fixed.size() == 2);
    CHECK(cfg.reduction_fixed[0] == "L_d");
    CHECK(cfg.output_dir == std::filesystem::path("out/map_study"));
}

TEST_CASE("JSON config is accepted equivalently") {
    const auto dir = testkit::scratch_dir("config_json");
    const char* body = R"({
      "space": {"param": [
        {"name": "R_s", "nominal": 8.9462, "rel_halfwidth": 0.05},
        {"name": "lambda", "nominal": 0.1144, "lower": 0.10868, "upper": 0.12012}
      ]},
      "operating": {"kind": "grid", "t_min": 0.0, "t_max": 0.05,
                    "n_t": 4, "omega_min": 0.0, "omega_max": 100.0, "n_omega": 4},
      "method": {"kind": "mc", "n_samples": 100, "seed": 7}
    })";
    const auto cfg = emuq::load_config(write_file(dir, "run.json", body));
    CHECK(cfg.space.size() == 2);
    CHECK(cfg.space.param(1).lower == 0.10868);
    CHECK(cfg.method.method == emuq::GsaMethod::MonteCarlo);
    CHECK(cfg.method.n_samples == 100);
    CHECK(cfg.method.strategy == emuq::SampleStrategy::PseudoRandom);
}

TEST_CASE("config validation names the offending key") {
    const auto dir = testkit::scratch_dir("config_errors");

    SECTION("missing space block") {
        const char* body = R"({"operating": {"kind": "grid", "t_min": 0, "t_max": 1,
                                "n_t": 2, "omega_min": 0, "omega_max": 1, "n_omega": 2}})";
        CHECK_THROWS_MATCHES(emuq::load_config(write_file(dir, "a.json", body)),
                             emuq::config_error,
                             Catch::Matchers::MessageMatches(ContainsSubstring("space")));
    }

    SECTION("unknown model key") {
        std::string body = kTomlConfig;
        body += "\n[model]\nR_x = 1.0\n";
        CHECK_THROWS_MATCHES(emuq::load_config(write_file(dir, "b.toml", body)),
                             emuq::config_error,
                             Catch::Matchers::MessageMatches(ContainsSubstring("model.R_x")));
    }

    SECTION("mc without a sample size") {
        const char* body = R"({
          "space": {"param": [{"name": "R_s", "nominal": 8.9, "rel_halfwidth": 0.05}]},
          "operating": {"kind": "grid", "t_min": 0, "t_max": 1, "n_t": 2,
                        "omega_min": 0, "omega_max": 1, "n_omega": 2},
          "method": {"kind": "mc"}
        })";
        CHECK_THROWS_MATCHES(
            emuq::load_config(write_file(dir, "c.json", body)), emuq::config_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("method.n_samples")));
    }

    SECTION("bad parameter entry names its index") {
        const char* body = R"({
          "space": {"param": [{"name": "R_s", "nominal": 8.9, "rel_halfwidth": 0.05},
                              {"name": "lambda", "nominal": 0.1}]},
          "operating": {"kind": "grid", "t_min": 0, "t_max": 1, "n_t": 2,
                        "omega_min": 0, "omega_max": 1, "n_omega": 2}
        })";
        CHECK_THROWS_MATCHES(
            emuq::load_config(write_file(dir, "d.json", body)), emuq::config_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("space.param[1]")));
    }

    SECTION("fixed names must exist in the space") {
        std::string body(kTomlConfig);
        const auto pos = body.find("fixed = [\"L_d\", \"L_q\"]");
        body.replace(pos, std::string("fixed = [\"L_d\", \"L_q\"]").size(),
                     "fixed = [\"L_x\"]");
        CHECK_THROWS_MATCHES(emuq::load_config(write_file(dir, "e.toml", body)),
                             emuq::config_error,
                             Catch::Matchers::MessageMatches(ContainsSubstring("L_x")));
    }

    SECTION("unknown top-level key") {
        const char* body = R"({"spacex": {}})";
        CHECK_THROWS_AS(emuq::load_config(write_file(dir, "f.json", body)), emuq::config_error);
    }

    SECTION("missing file is an io error") {
        CHECK_THROWS_AS(emuq::load_config(dir / "missing.toml"), emuq::io_error);
    }
}

TEST_CASE("toml-lite parser details") {
    SECTION("comments, arrays, and booleans") {
        std::istringstream in(
            "a = 1       # trailing comment\n"
            "b = \"x # not a comment\"\n"
            "c = [1, 2.5, \"s\"]\n"
            "flag = true\n");
        const auto doc = emuq::toml_lite::parse(in);
        CHECK(doc["a"].get<int>() == 1);
        CHECK(doc["b"].get<std::string>() == "x # not a comment");
        CHECK(doc["c"].size() == 3);
        CHECK(doc["c"][1].get<double>() == 2.5);
        CHECK(doc["flag"].get<bool>() == true);
    }

    SECTION("nested tables and arrays of tables") {
        std::istringstream in(
            "[a.b]\n"
            "x = 1\n"
            "[[list.item]]\n"
            "v = 1\n"
            "[[list.item]]\n"
            "v = 2\n");
        const auto doc = emuq::toml_lite::parse(in);
        CHECK(doc["a"]["b"]["x"].get<int>() == 1);
        REQUIRE(doc["list"]["item"].size() == 2);
        CHECK(doc["list"]["item"][1]["v"].get<int>() == 2);
    }

    SECTION("malformed lines carry the line number") {
        std::istringstream in("a = 1\nwhat is this\n");
        CHECK_THROWS_MATCHES(emuq::toml_lite::parse(in), emuq::io_error,
                             Catch::Matchers::MessageMatches(ContainsSubstring("line 2")));
    }
}
