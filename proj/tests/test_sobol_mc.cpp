#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using Fn = std::function<std::vector<double>(std::span<const double>)>;

struct McRun {
    emuq::QoiMatrix f_a, f_b;
    std::vector<emuq::QoiMatrix> f_ab;
};

McRun evaluate_design(const emuq::ParameterSpace& space, std::size_t n_samples,
                      std::uint64_t seed, const Fn& fn) {
    const auto design = emuq::pick_freeze(space, n_samples, seed);
    McRun run;
    run.f_a = testkit::evaluate_function(design.a, fn);
    run.f_b = testkit::evaluate_function(design.b, fn);
    for (const auto& m : design.ab) run.f_ab.push_back(testkit::evaluate_function(m, fn));
    return run;
}

emuq::ParameterSpace symmetric_space(std::size_t n) {
    std::vector<emuq::RandomParameter> params;
    for (std::size_t i = 0; i < n; ++i)
        params.push_back({"x" + std::to_string(i + 1), 0.0, -1.0, 1.0});
    return emuq::ParameterSpace(std::move(params));
}

}  // namespace

TEST_CASE("pass-through model: all variance on the used input") {
    const auto space = symmetric_space(2);
    const auto run = evaluate_design(space, 100000, 17,
                                     testkit::scalar_model([](std::span<const double> x) {
                                         return x[0];
                                     }));
    const auto r = emuq::mc_sobol(run.f_a, run.f_b, run.f_ab);
    CHECK_THAT(r.first_at(0, 0), WithinAbs(1.0, 0.01));
    CHECK_THAT(r.total_at(0, 0), WithinAbs(1.0, 0.01));
    // the frozen column cancels exactly in both estimators
    CHECK_THAT(r.first_at(1, 0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.total_at(1, 0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("additive model Y = X1 + 2 X2 on U(-1,1)") {
    const auto space = symmetric_space(2);
    const auto run = evaluate_design(space, 100000, 23,
                                     testkit::scalar_model([](std::span<const double> x) {
                                         return x[0] + 2.0 * x[1];
                                     }));
    const auto r = emuq::mc_sobol(run.f_a, run.f_b, run.f_ab);
    CHECK_THAT(r.first_at(0, 0), WithinAbs(0.2, 0.01));
    CHECK_THAT(r.first_at(1, 0), WithinAbs(0.8, 0.01));
    // additive: total equals first within Monte Carlo tolerance
    CHECK_THAT(r.total_at(0, 0), WithinAbs(r.first_at(0, 0), 0.01));
    CHECK_THAT(r.total_at(1, 0), WithinAbs(r.first_at(1, 0), 0.01));
}

TEST_CASE("Ishigami indices against the analytic oracle") {
    const auto ref = testkit::ishigami_analytic();
    const auto run =
        evaluate_design(testkit::ishigami_space(), 100000, 31,
                        testkit::scalar_model([](std::span<const double> x) {
                            return testkit::ishigami(x);
                        }));
    const auto r = emuq::mc_sobol(run.f_a, run.f_b, run.f_ab);
    CHECK_THAT(r.first_at(0, 0), WithinAbs(ref.s1, 0.01));
    CHECK_THAT(r.first_at(1, 0), WithinAbs(ref.s2, 0.01));
    CHECK_THAT(r.first_at(2, 0), WithinAbs(ref.s3, 0.01));
    CHECK_THAT(r.total_at(0, 0), WithinAbs(ref.st1, 0.01));
    CHECK_THAT(r.total_at(1, 0), WithinAbs(ref.st2, 0.01));
    CHECK_THAT(r.total_at(2, 0), WithinAbs(ref.st3, 0.01));
}

TEST_CASE("generalized indices") {
    const auto space = symmetric_space(2);

    SECTION("M = 1 reduces exactly to the scalar Sobol' indices") {
        const auto run = evaluate_design(space, 2000, 5,
                                         testkit::scalar_model([](std::span<const double> x) {
                                             return x[0] + 0.5 * x[1] + x[0] * x[1];
                                         }));
        const auto sob = emuq::mc_sobol(run.f_a, run.f_b, run.f_ab);
        const auto gen = emuq::mc_generalized(run.f_a, run.f_b, run.f_ab);
        for (std::size_t n = 0; n < 2; ++n) {
            CHECK(gen.generalized_first[n] == sob.first_at(n, 0));
            CHECK(gen.generalized_total[n] == sob.total_at(n, 0));
        }
    }

    SECTION("equal-variance components split the trace evenly") {
        const auto run = evaluate_design(space, 50000, 41, [](std::span<const double> x) {
            return std::vector<double>{x[0], x[1]};
        });
        const auto gen = emuq::mc_generalized(run.f_a, run.f_b, run.f_ab);
        CHECK_THAT(gen.generalized_first[0], WithinAbs(0.5, 0.01));
        CHECK_THAT(gen.generalized_first[1], WithinAbs(0.5, 0.01));
    }

    SECTION("components (X1, 3 X2) weight as 0.1 / 0.9") {
        const auto run = evaluate_design(space, 100000, 43, [](std::span<const double> x) {
            return std::vector<double>{x[0], 3.0 * x[1]};
        });
        const auto gen = emuq::mc_generalized(run.f_a, run.f_b, run.f_ab);
        CHECK_THAT(gen.generalized_first[0], WithinAbs(0.1, 0.01));
        CHECK_THAT(gen.generalized_first[1], WithinAbs(0.9, 0.01));
        CHECK_THAT(gen.generalized_total[0], WithinAbs(0.1, 0.01));
        CHECK_THAT(gen.generalized_total[1], WithinAbs(0.9, 0.01));
    }
}

TEST_CASE("aggregation identity holds by construction") {
    const auto space = symmetric_space(3);
    const auto run = evaluate_design(space, 4000, 77, [](std::span<const double> x) {
        return std::vector<double>{x[0] + x[1] * x[2], 2.0 * x[1] + x[0] * x[0],
                                   0.3 * x[2] + x[0]};
    });
    const auto gen = emuq::mc_generalized(run.f_a, run.f_b, run.f_ab);
    for (std::size_t n = 0; n < 3; ++n) {
        emuq::KahanSum num, den;
        for (std::size_t m = 0; m < 3; ++m) {
            num.add(gen.component_variance[m] * gen.first_at(n, m));
            den.add(gen.component_variance[m]);
        }
        CHECK_THAT(gen.generalized_first[n], WithinAbs(num.value() / den.value(), 1e-12));
    }
}

TEST_CASE("index estimates are scale-equivariant") {
    const auto space = symmetric_space(2);
    const Fn base = [](std::span<const double> x) {
        return std::vector<double>{x[0] + 0.4 * x[1], x[1] * x[0]};
    };
    const Fn scaled = [&base](std::span<const double> x) {
        auto y = base(x);
        for (double& v : y) v *= 1000.0;
        return y;
    };
    const auto run1 = evaluate_design(space, 5000, 7, base);
    const auto run2 = evaluate_design(space, 5000, 7, scaled);
    const auto r1 = emuq::mc_generalized(run1.f_a, run1.f_b, run1.f_ab);
    const auto r2 = emuq::mc_generalized(run2.f_a, run2.f_b, run2.f_ab);
    for (std::size_t n = 0; n < 2; ++n) {
        for (std::size_t m = 0; m < 2; ++m) {
            CHECK_THAT(r2.first_at(n, m), WithinRel(r1.first_at(n, m), 1e-12));
            CHECK_THAT(r2.total_at(n, m), WithinRel(r1.total_at(n, m), 1e-12));
        }
        CHECK_THAT(r2.generalized_first[n], WithinRel(r1.generalized_first[n], 1e-12));
    }
}

TEST_CASE("zero-variance components are flagged and excluded from traces") {
    const auto space = symmetric_space(2);
    const Fn with_const = [](std::span<const double> x) {
        return std::vector<double>{x[0], 0.75, 2.0 * x[1]};
    };
    const Fn without = [](std::span<const double> x) {
        return std::vector<double>{x[0], 2.0 * x[1]};
    };
    const auto run1 = evaluate_design(space, 3000, 9, with_const);
    const auto run2 = evaluate_design(space, 3000, 9, without);
    const auto r1 = emuq::mc_generalized(run1.f_a, run1.f_b, run1.f_ab);
    const auto r2 = emuq::mc_generalized(run2.f_a, run2.f_b, run2.f_ab);

    CHECK(r1.degenerate[1] == 1);
    CHECK(std::isnan(r1.first_at(0, 1)));
    for (std::size_t n = 0; n < 2; ++n) {
        CHECK(r1.generalized_first[n] == r2.generalized_first[n]);
        CHECK(r1.generalized_total[n] == r2.generalized_total[n]);
    }
}

TEST_CASE("estimator contract errors") {
    const auto space = symmetric_space(2);
    const auto run = evaluate_design(space, 64, 3,
                                     testkit::scalar_model([](std::span<const double> x) {
                                         return x[0];
                                     }));

    SECTION("mismatched shapes") {
        auto bad = run.f_b;
        bad.n_components = 2;
        bad.values.resize(bad.n_samples * 2);
        bad.mask = {1, 1};
        CHECK_THROWS_AS(emuq::mc_sobol(run.f_a, bad, run.f_ab), std::invalid_argument);
    }

    SECTION("all components degenerate -> zero total variance") {
        const auto const_run = evaluate_design(
            space, 64, 3, testkit::scalar_model([](std::span<const double>) { return 1.0; }));
        CHECK_THROWS_AS(emuq::mc_generalized(const_run.f_a, const_run.f_b, const_run.f_ab),
                        emuq::numerical_error);
    }
}
