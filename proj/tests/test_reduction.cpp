#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using Catch::Matchers::WithinAbs;

namespace {

emuq::SensitivityResult fake_result(std::vector<std::string> names, std::vector<double> g_total) {
    emuq::SensitivityResult r;
    r.n_params = names.size();
    r.n_components = 1;
    r.param_names = std::move(names);
    r.generalized_total = std::move(g_total);
    r.generalized_first = r.generalized_total;
    return r;
}

}  // namespace

TEST_CASE("select_noninfluential") {
    const auto r = fake_result({"R_s", "lambda", "L_d", "L_q"}, {0.45, 0.52, 0.002, 0.008});

    SECTION("default threshold picks the negligible pair, ascending") {
        const auto fixed = emuq::select_noninfluential(r, 0.01);
        REQUIRE(fixed.size() == 2);
        CHECK(fixed[0] == "L_d");
        CHECK(fixed[1] == "L_q");
    }

    SECTION("nothing below the threshold gives an empty list") {
        CHECK(emuq::select_noninfluential(r, 0.001).empty());
    }

    SECTION("a threshold above one selects everything") {
        const auto fixed = emuq::select_noninfluential(r, 1.0 + 1e-9);
        CHECK(fixed.size() == 4);
        CHECK(fixed[0] == "L_d");  // still ascending by index value
    }
}

TEST_CASE("mean_absolute_error basics") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> b = {1.5, 2.0, 2.0};
    const std::vector<std::uint8_t> mask = {1, 1, 1};
    CHECK_THAT(emuq::mean_absolute_error(a, b, mask), WithinAbs(0.5, 1e-15));
    CHECK(emuq::mean_absolute_error(a, a, mask) == 0.0);
    // symmetric in the fields
    CHECK(emuq::mean_absolute_error(a, b, mask) == emuq::mean_absolute_error(b, a, mask));
    const std::vector<std::uint8_t> partial = {0, 1, 0};
    CHECK(emuq::mean_absolute_error(a, b, partial) == 0.0);
    CHECK_THROWS_AS(emuq::mean_absolute_error(a, b, {0, 0, 0}), emuq::numerical_error);
}

TEST_CASE("fixing nothing reproduces the run exactly") {
    const auto ecm = testkit::bench_machine();
    const auto space = testkit::bench_space();
    const auto opset = emuq::build_grid({0.01, 0.08, 3, 20.0, 100.0, 4, true}, ecm);
    emuq::UqSettings settings;
    settings.method = emuq::GsaMethod::Pce;
    settings.degree = 2;
    settings.oversampling = 2.0;
    settings.seed = 7;
    emuq::CostReport cost;
    const auto report = emuq::reduce_and_compare(ecm, space, opset, settings, {}, cost);
    CHECK(report.mae_mean == 0.0);
    CHECK(report.mae_std == 0.0);
}

TEST_CASE("fixing every parameter zeroes the reduced std") {
    const auto ecm = testkit::bench_machine();
    const auto space = testkit::bench_space();
    const auto opset = emuq::build_grid({0.01, 0.08, 3, 20.0, 100.0, 4, true}, ecm);
    emuq::UqSettings settings;
    settings.method = emuq::GsaMethod::MonteCarlo;
    settings.n_samples = 24;
    settings.seed = 11;
    emuq::CostReport cost;
    const auto report = emuq::reduce_and_compare(ecm, space, opset, settings,
                                                 {"R_s", "lambda", "L_d", "L_q"}, cost);
    double mean_abs_std = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < opset.size(); ++m) {
        if (!report.common_mask[m]) continue;
        CHECK(report.reduced.std_dev[m] == 0.0);
        mean_abs_std += std::abs(report.full.std_dev[m]);
        ++count;
    }
    REQUIRE(count > 0);
    CHECK_THAT(report.mae_std, WithinAbs(mean_abs_std / double(count), 1e-15));
}

TEST_CASE("pinning preserves the surviving columns (common random numbers)") {
    // a parameter the model never reads: pinning it changes nothing, exactly
    const emuq::ParameterSpace space({emuq::RandomParameter{"used", 0.0, -1.0, 1.0},
                                      emuq::RandomParameter{"dummy", 0.0, -1.0, 1.0}});
    const auto samples = emuq::sample(space, 200, 17);
    auto pinned = samples;
    for (std::size_t i = 0; i < pinned.rows(); ++i) pinned(i, 1) = 0.0;

    const auto fn = testkit::scalar_model([](std::span<const double> x) { return x[0] * x[0]; });
    const auto full = testkit::evaluate_function(samples, fn);
    const auto reduced = testkit::evaluate_function(pinned, fn);
    const auto f1 = emuq::moments(full);
    const auto f2 = emuq::moments(reduced);
    CHECK(emuq::mean_absolute_error(f1.mean, f2.mean, {1}) == 0.0);
    CHECK(emuq::mean_absolute_error(f1.std_dev, f2.std_dev, {1}) == 0.0);
}

TEST_CASE("reduced PCE fits run in the surviving subspace") {
    const auto ecm = testkit::bench_machine();
    const auto space = testkit::bench_space();
    const auto opset = emuq::build_grid({0.02, 0.08, 3, 30.0, 90.0, 3, true}, ecm);
    emuq::UqSettings settings;
    settings.method = emuq::GsaMethod::Pce;
    settings.degree = 2;
    settings.oversampling = 2.0;
    settings.seed = 23;
    emuq::CostReport cost;
    const auto run = emuq::estimate_moments(ecm, space, opset, settings, cost, 0, {"L_d", "L_q"});
    REQUIRE(run.pce.has_value());
    CHECK(run.pce->space.size() == 2);
    CHECK(run.pce->space.param(0).name == "R_s");
    CHECK(run.pce->space.param(1).name == "lambda");
    // sample size still follows the full four-parameter study
    CHECK(run.qoi.n_samples == 30);
}

TEST_CASE("unknown fixed names are rejected") {
    const auto ecm = testkit::bench_machine();
    const auto space = testkit::bench_space();
    const auto opset = emuq::build_grid({0.02, 0.08, 3, 30.0, 90.0, 3, true}, ecm);
    emuq::UqSettings settings;
    settings.method = emuq::GsaMethod::MonteCarlo;
    settings.n_samples = 8;
    emuq::CostReport cost;
    CHECK_THROWS_AS(
        emuq::reduce_and_compare(ecm, space, opset, settings, {"bogus"}, cost),
        emuq::config_error);
}
