#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

emuq::EcmParameters table_machine() {
    emuq::EcmParameters ecm;  // benchmark circuit values, default ratings
    return ecm;
}

}  // namespace

TEST_CASE("d-q voltages") {
    const auto ecm = table_machine();

    SECTION("zero current leaves only the back-EMF") {
        const auto v = emuq::dq_voltages(ecm, 0.0, 0.0, 100.0);
        CHECK(v.v_d == 0.0);
        CHECK_THAT(v.v_q, WithinRel(300.0 * 0.1144, 1e-12));
    }

    SECTION("standstill leaves only the resistive terms") {
        const auto v = emuq::dq_voltages(ecm, 1.0, 1.0, 0.0);
        CHECK_THAT(v.v_d, WithinAbs(8.9462, 1e-12));
        CHECK_THAT(v.v_q, WithinAbs(8.9462, 1e-12));
    }

    SECTION("hand-evaluated mixed case") {
        const auto v = emuq::dq_voltages(ecm, 0.0, 0.5, 100.0);
        CHECK_THAT(v.v_d, WithinAbs(-49.8, 1e-9));
        CHECK_THAT(v.v_q, WithinAbs(38.7931, 1e-9));
    }
}

TEST_CASE("torque expression") {
    const auto ecm = table_machine();

    SECTION("no q-current, no torque") {
        CHECK(emuq::torque(ecm, 3.0, 0.0) == 0.0);
        CHECK(emuq::torque(ecm, -3.0, 0.0) == 0.0);
    }

    SECTION("magnet torque at unit q-current") {
        CHECK_THAT(emuq::torque(ecm, 0.0, 1.0), WithinAbs(0.5148, 1e-12));
    }

    SECTION("symmetric inductances remove the reluctance term") {
        auto sym = ecm;
        sym.l_d = sym.l_q = 0.25;
        CHECK_THAT(emuq::torque(sym, 2.0, 1.5), WithinRel(emuq::torque(sym, -2.0, 1.5), 1e-14));
    }
}

TEST_CASE("loss budget") {
    auto ecm = table_machine();

    SECTION("no excitation, no loss") {
        const auto l = emuq::losses(ecm, 0.0, 0.0, 0.0);
        CHECK(l.p_elec == 0.0);
        CHECK(l.p_magn == 0.0);
        CHECK(l.p_mech == 0.0);
    }

    SECTION("copper loss from the current magnitude") {
        const auto l = emuq::losses(ecm, 3.0, 4.0, 50.0);
        CHECK_THAT(l.p_elec, WithinAbs(335.4825, 1e-9));
        CHECK(l.p_magn == 0.0);
        CHECK(l.p_mech == 0.0);
    }

    SECTION("mechanical loss from the friction coefficient") {
        ecm.k_fric = 0.01;
        const auto l = emuq::losses(ecm, 0.0, 0.0, 100.0);
        CHECK_THAT(l.p_mech, WithinAbs(1.0, 1e-12));
    }

    SECTION("iron loss is normalized to coefficients in watts at nominal flux") {
        ecm.k_hyst = 2.0;
        ecm.k_eddy = 0.0;
        // zero current: flux = lambda, normalized psi^2 = 1
        const auto l = emuq::losses(ecm, 0.0, 0.0, 1.0);
        CHECK_THAT(l.p_magn, WithinRel(2.0 * ecm.pole_pairs * 1.0, 1e-12));
    }
}

TEST_CASE("operating-point solve: basic contracts") {
    const auto ecm = testkit::bench_machine();

    SECTION("null operating point") {
        const auto sol = emuq::solve_operating_point(ecm, {0.0, 0.0});
        CHECK(sol.feasible);
        CHECK(sol.idle);
        CHECK(sol.i_d == 0.0);
        CHECK(sol.i_q == 0.0);
        CHECK(sol.losses.total() == 0.0);
        CHECK(sol.efficiency == 1.0);
    }

    SECTION("torque above the envelope is infeasible") {
        const auto env = emuq::torque_envelope(ecm, std::vector<double>{50.0});
        const auto sol = emuq::solve_operating_point(ecm, {env[0] * 1.2, 50.0});
        CHECK_FALSE(sol.feasible);
    }

    SECTION("achieved torque matches the request") {
        const auto sol = emuq::solve_operating_point(ecm, {0.08, 120.0});
        REQUIRE(sol.feasible);
        CHECK_THAT(emuq::torque(ecm, sol.i_d, sol.i_q), WithinAbs(0.08, 1e-9));
    }

    SECTION("energy bookkeeping in motoring mode") {
        const auto sol = emuq::solve_operating_point(ecm, {0.09, 130.0});
        REQUIRE(sol.feasible);
        REQUIRE_FALSE(sol.idle);
        CHECK_THAT(sol.efficiency * (sol.p_out + sol.losses.total()),
                   WithinRel(sol.p_out, 1e-12));
        CHECK(sol.efficiency > 0.0);
        CHECK(sol.efficiency <= 1.0);
    }

    SECTION("constraints are independently re-checkable") {
        const auto sol = emuq::solve_operating_point(ecm, {0.09, 100.0});
        REQUIRE(sol.feasible);
        CHECK(sol.i_d * sol.i_d + sol.i_q * sol.i_q <= ecm.i_max * ecm.i_max * (1.0 + 1e-12));
        const auto v = emuq::dq_voltages(ecm, sol.i_d, sol.i_q, 100.0);
        CHECK(v.v_d * v.v_d + v.v_q * v.v_q <= ecm.v_max * ecm.v_max * (1.0 + 1e-8));
    }

    SECTION("identical inputs give bit-identical solutions") {
        const auto a = emuq::solve_operating_point(ecm, {0.07, 80.0});
        const auto b = emuq::solve_operating_point(ecm, {0.07, 80.0});
        CHECK(a.i_d == b.i_d);
        CHECK(a.i_q == b.i_q);
        CHECK(a.efficiency == b.efficiency);
    }

    SECTION("generating mode mirrors the q-current") {
        const auto sol = emuq::solve_operating_point(ecm, {-0.08, 120.0});
        REQUIRE(sol.feasible);
        CHECK(sol.i_q < 0.0);
        CHECK(sol.p_out < 0.0);
        CHECK_THAT(emuq::torque(ecm, sol.i_d, sol.i_q), WithinAbs(-0.08, 1e-9));
        // generating-mode efficiency definition
        CHECK_THAT(sol.efficiency,
                   WithinRel((std::abs(sol.p_out) - sol.losses.total()) / std::abs(sol.p_out),
                             1e-12));
    }
}

TEST_CASE("symmetric machine with copper-only losses centers on i_d = 0") {
    auto ecm = testkit::bench_machine();
    ecm.l_d = ecm.l_q = 0.26;
    const auto sol = emuq::solve_operating_point(ecm, {0.06, 100.0});
    REQUIRE(sol.feasible);
    // loss-minimal solution for fixed torque has minimal current magnitude
    CHECK_THAT(sol.i_d, WithinAbs(0.0, 1e-6));
    const double eff_oracle = testkit::brute_force_efficiency(ecm, {0.06, 100.0});
    CHECK_THAT(sol.efficiency, WithinAbs(eff_oracle, 1e-4));
}

TEST_CASE("solver matches the brute-force current-grid oracle") {
    // randomized machines and operating points; acceptance runs the full set
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int rep = 0; checked < 12 && rep < 40; ++rep) {
        auto ecm = testkit::bench_machine();
        ecm.r_s *= 0.8 + 0.4 * unit(gen);
        ecm.lambda *= 0.8 + 0.4 * unit(gen);
        ecm.l_d *= 0.8 + 0.4 * unit(gen);
        ecm.l_q *= 0.8 + 0.4 * unit(gen);
        ecm.k_hyst = rep % 3 == 0 ? 0.002 * unit(gen) : 0.0;
        ecm.k_eddy = rep % 3 == 0 ? 1e-5 * unit(gen) : 0.0;
        ecm.k_fric = rep % 4 == 0 ? 1e-4 * unit(gen) : 0.0;
        const double omega = 20.0 + 400.0 * unit(gen);
        const auto env = emuq::torque_envelope(ecm, std::vector<double>{omega});
        if (env[0] <= 0.0) continue;
        const double torque = (0.15 + 0.75 * unit(gen)) * env[0];
        const auto sol = emuq::solve_operating_point(ecm, {torque, omega});
        REQUIRE(sol.feasible);
        const double oracle = testkit::brute_force_efficiency(ecm, {torque, omega});
        REQUIRE(std::isfinite(oracle));
        CHECK_THAT(sol.efficiency, WithinAbs(oracle, 1e-4));
        ++checked;
    }
    CHECK(checked >= 12);
}

TEST_CASE("torque envelope") {
    const auto ecm = testkit::bench_machine();

    SECTION("at standstill the voltage limit is inactive: MTPA at I_max") {
        const auto env = emuq::torque_envelope(ecm, std::vector<double>{0.0});
        // dense reference scan over the current circle
        double best = 0.0;
        for (int k = 1; k < 20000; ++k) {
            const double beta = testkit::kPi * k / 20000.0;
            best = std::max(best, emuq::torque(ecm, ecm.i_max * std::cos(beta),
                                               ecm.i_max * std::sin(beta)));
        }
        CHECK_THAT(env[0], WithinRel(best, 1e-7));
    }

    SECTION("envelope is non-increasing beyond the base speed") {
        std::vector<double> omegas;
        for (int k = 0; k <= 40; ++k) omegas.push_back(25.0 * k);
        const auto env = emuq::torque_envelope(ecm, omegas);
        // find base speed: first drop below the standstill value
        const double t0 = env[0];
        std::size_t base = 0;
        for (std::size_t k = 1; k < env.size(); ++k)
            if (env[k] < 0.999 * t0) {
                base = k;
                break;
            }
        REQUIRE(base > 0);
        for (std::size_t k = base; k + 1 < env.size(); ++k)
            CHECK(env[k + 1] <= env[k] * (1.0 + 1e-9));
    }

    SECTION("vanishing current rating collapses the envelope") {
        auto tiny = ecm;
        tiny.i_max = 1e-12;
        const auto env = emuq::torque_envelope(tiny, std::vector<double>{0.0, 50.0});
        CHECK(env[0] < 1e-9);
        CHECK(env[1] < 1e-9);
    }
}
