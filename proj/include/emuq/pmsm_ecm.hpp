#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/numeric.hpp"

namespace emuq {

/// Steady-state PMSM equivalent-circuit parameters in the d-q frame.
/// Circuit values default to the benchmark machine; ratings and loss
/// coefficients are configuration.
struct EcmParameters {
    double r_s = 8.9462;     // phase resistance, Ohm
    double lambda = 0.1144;  // magnet flux linkage, Wb
    double l_d = 0.2055;     // d-axis inductance, H
    double l_q = 0.332;      // q-axis inductance, H
    int pole_pairs = 3;
    double i_max = 6.0;    // peak phase current, A
    double v_max = 400.0;  // peak phase voltage, V
    double k_hyst = 0.0;   // hysteresis iron-loss coefficient, W*s/rad (at nominal flux)
    double k_eddy = 0.0;   // eddy iron-loss coefficient, W*s^2/rad^2 (at nominal flux)
    double k_fric = 0.0;   // friction coefficient, W*s/rad
    double k_wind = 0.0;   // windage coefficient, W*s^3/rad^3

    void validate() const {
        auto positive = [](double v, const char* key) {
            if (!(v > 0.0)) throw config_error(std::string("model.") + key + ": must be > 0");
        };
        positive(r_s, "R_s");
        positive(lambda, "lambda");
        positive(l_d, "L_d");
        positive(l_q, "L_q");
        positive(i_max, "I_max");
        positive(v_max, "V_max");
        if (pole_pairs < 1) throw config_error("model.pole_pairs: must be >= 1");
        auto nonneg = [](double v, const char* key) {
            if (v < 0.0) throw config_error(std::string("model.") + key + ": must be >= 0");
        };
        nonneg(k_hyst, "k_hyst");
        nonneg(k_eddy, "k_eddy");
        nonneg(k_fric, "k_fric");
        nonneg(k_wind, "k_wind");
    }
};

struct OperatingPoint {
    double torque = 0.0;   // N*m, negative in generating mode
    double omega_m = 0.0;  // mechanical angular speed, rad/s (>= 0)
};

struct LossBreakdown {
    double p_elec = 0.0;  // copper, W
    double p_magn = 0.0;  // iron, W
    double p_mech = 0.0;  // friction + windage, W
    double total() const noexcept { return p_elec + p_magn + p_mech; }
};

struct DqVoltages {
    double v_d = 0.0;
    double v_q = 0.0;
};

/// Output of the per-operating-point optimal-current solve.
/// efficiency is P_out/(P_out + P_loss) in motoring mode and
/// (|P_out| - P_loss)/|P_out| in generating mode; points with
/// |P_out| below the idle threshold report efficiency 1 with idle set.
struct OperatingSolution {
    double i_d = 0.0;
    double i_q = 0.0;
    double v_d = 0.0;
    double v_q = 0.0;
    LossBreakdown losses;
    double p_out = 0.0;
    double efficiency = 1.0;
    bool feasible = true;
    bool idle = false;
};

/// Mechanical power below which a point is treated as idle (efficiency 1).
inline constexpr double kIdlePowerWatts = 1.0;

inline DqVoltages dq_voltages(const EcmParameters& ecm, double i_d, double i_q, double omega_m) {
    const double omega_e = ecm.pole_pairs * omega_m;
    return {ecm.r_s * i_d - omega_e * ecm.l_q * i_q,
            ecm.r_s * i_q + omega_e * (ecm.l_d * i_d + ecm.lambda)};
}

inline double torque(const EcmParameters& ecm, double i_d, double i_q) {
    return 1.5 * ecm.pole_pairs * (ecm.lambda * i_q + (ecm.l_d - ecm.l_q) * i_d * i_q);
}

inline LossBreakdown losses(const EcmParameters& ecm, double i_d, double i_q, double omega_m) {
    const double omega_e = ecm.pole_pairs * omega_m;
    LossBreakdown l;
    l.p_elec = 1.5 * ecm.r_s * (i_d * i_d + i_q * i_q);
    // stator flux magnitude squared, normalized so the coefficients are watts
    // at nominal flux and unit electrical speed
    const double psi_d = ecm.l_d * i_d + ecm.lambda;
    const double psi_q = ecm.l_q * i_q;
    const double psi2 = (psi_d * psi_d + psi_q * psi_q) / (ecm.lambda * ecm.lambda);
    l.p_magn = (ecm.k_hyst * std::abs(omega_e) + ecm.k_eddy * omega_e * omega_e) * psi2;
    l.p_mech = ecm.k_fric * omega_m + ecm.k_wind * omega_m * omega_m * omega_m;
    return l;
}

namespace detail {

// Voltage magnitude squared along the ray (i_d, i_q) = I * (u_d, u_q) is the
// convex quadratic A*I^2 + B*I + C.
struct VoltageQuad {
    double a, b, c;
    double eval(double i) const noexcept { return (a * i + b) * i + c; }
};

inline VoltageQuad voltage_quad(const EcmParameters& ecm, double u_d, double u_q,
                                double omega_e) {
    const double vd_coef = ecm.r_s * u_d - omega_e * ecm.l_q * u_q;
    const double vq_coef = ecm.r_s * u_q + omega_e * ecm.l_d * u_d;
    const double vq_const = omega_e * ecm.lambda;
    return {vd_coef * vd_coef + vq_coef * vq_coef, 2.0 * vq_const * vq_coef,
            vq_const * vq_const};
}

// Admissible current interval [lo, hi] within [0, i_cap] under the voltage
// limit; returns false when empty.
inline bool voltage_interval(const VoltageQuad& q, double v_max, double i_cap, double& lo,
                             double& hi) {
    const double vv = v_max * v_max;
    lo = 0.0;
    hi = i_cap;
    if (q.a <= 0.0) {  // omega = 0 and r_s = 0 cannot occur; a > 0 in practice
        return q.c <= vv;
    }
    const double disc = q.b * q.b - 4.0 * q.a * (q.c - vv);
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    const double r0 = (-q.b - sq) / (2.0 * q.a);
    const double r1 = (-q.b + sq) / (2.0 * q.a);
    lo = std::max(0.0, r0);
    hi = std::min(i_cap, r1);
    return lo <= hi;
}

// Current magnitudes solving a*I + b*I^2 = t (a >= 0, t > 0). Writes up to
// two positive roots, ascending; returns the count. With b < 0 both roots
// deliver the torque and the larger one may still win on total loss once
// iron losses reward the weaker flux.
inline int torque_roots(double a, double b, double t, double roots[2]) {
    if (std::abs(b) < 1e-300) {
        if (!(a > 0.0)) return 0;
        roots[0] = t / a;
        return 1;
    }
    const double disc = a * a + 4.0 * b * t;
    if (disc < 0.0) return 0;  // b < 0 and torque above the ray's peak
    const double sq = std::sqrt(disc);
    if (b > 0.0) {
        roots[0] = (-a + sq) / (2.0 * b);
        return roots[0] >= 0.0 ? 1 : 0;
    }
    const double lo = (-a + sq) / (2.0 * b);
    const double hi = (-a - sq) / (2.0 * b);
    int count = 0;
    if (lo >= 0.0) roots[count++] = lo;
    if (hi >= 0.0 && hi != lo) roots[count++] = hi;
    return count;
}

struct BetaCandidate {
    double current = -1.0;  // magnitude; < 0 when infeasible
    double loss = std::numeric_limits<double>::infinity();
};

// Loss along the constant-torque locus at angle beta in (0, pi); u_q carries
// the torque sign. Voltage slack of kVoltTol absorbs roundoff at the limit.
inline constexpr double kVoltTol = 1e-9;

inline BetaCandidate eval_beta(const EcmParameters& ecm, double beta, double torque_mag,
                               double sign_q, double omega_m) {
    BetaCandidate cand;
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    if (sb <= 0.0) return cand;
    const double c1 = 1.5 * ecm.pole_pairs * ecm.lambda;
    const double c2 = 1.5 * ecm.pole_pairs * (ecm.l_d - ecm.l_q);
    double roots[2];
    const int count = torque_roots(c1 * sb, c2 * sb * cb, torque_mag, roots);
    const double u_d = cb, u_q = sign_q * sb;
    const double omega_e = ecm.pole_pairs * omega_m;
    const auto vq = voltage_quad(ecm, u_d, u_q, omega_e);
    const double v_limit = ecm.v_max * ecm.v_max * (1.0 + kVoltTol);
    for (int r = 0; r < count; ++r) {
        const double i = roots[r];
        if (i > ecm.i_max) continue;
        if (vq.eval(i) > v_limit) continue;
        const double loss = losses(ecm, i * u_d, i * u_q, omega_m).total();
        if (loss < cand.loss) {
            cand.current = i;
            cand.loss = loss;
        }
    }
    return cand;
}

inline OperatingSolution finish_solution(const EcmParameters& ecm, const OperatingPoint& op,
                                         double i_d, double i_q) {
    OperatingSolution sol;
    sol.i_d = i_d;
    sol.i_q = i_q;
    const auto v = dq_voltages(ecm, i_d, i_q, op.omega_m);
    sol.v_d = v.v_d;
    sol.v_q = v.v_q;
    sol.losses = losses(ecm, i_d, i_q, op.omega_m);
    sol.p_out = op.torque * op.omega_m;
    const double loss = sol.losses.total();
    if (std::abs(sol.p_out) < kIdlePowerWatts) {
        sol.efficiency = 1.0;
        sol.idle = true;
    } else if (sol.p_out > 0.0) {
        sol.efficiency = sol.p_out / (sol.p_out + loss);
    } else {
        sol.efficiency = (std::abs(sol.p_out) - loss) / std::abs(sol.p_out);
    }
    sol.feasible = true;
    return sol;
}

// Zero-torque optimum: i_q = 0, i_d in [-I_max, 0]. Nonzero i_d only pays
// off when iron losses reward flux weakening.
inline OperatingSolution solve_zero_torque(const EcmParameters& ecm, const OperatingPoint& op) {
    const double omega_e = ecm.pole_pairs * op.omega_m;
    const auto vq = voltage_quad(ecm, -1.0, 0.0, omega_e);  // ray along negative d-axis
    double lo, hi;
    if (!voltage_interval(vq, ecm.v_max, ecm.i_max, lo, hi)) {
        OperatingSolution sol;
        sol.feasible = false;
        sol.efficiency = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }
    auto loss_at = [&](double demag) { return losses(ecm, -demag, 0.0, op.omega_m).total(); };
    double best = lo;
    if (ecm.k_hyst > 0.0 || ecm.k_eddy > 0.0) {
        best = golden_minimize(loss_at, lo, hi, 1e-10);
        if (loss_at(lo) <= loss_at(best)) best = lo;
    }
    return finish_solution(ecm, op, -best, 0.0);
}

}  // namespace detail

/// Finds the admissible (i_d, i_q) delivering op.torque with minimal total
/// loss. The current vector is parameterized by its angle; the magnitude
/// follows from the torque equation (quadratic in the magnitude, solved in
/// closed form) and the angle by golden-section search over the feasible arc.
inline OperatingSolution solve_operating_point(const EcmParameters& ecm,
                                               const OperatingPoint& op) {
    ecm.validate();
    if (op.omega_m < 0.0) throw config_error("operating point: omega_m must be >= 0");

    if (op.torque == 0.0) return detail::solve_zero_torque(ecm, op);

    const double torque_mag = std::abs(op.torque);
    const double sign_q = op.torque > 0.0 ? 1.0 : -1.0;

    // Coarse scan locates the basin; golden section refines the angle to 1e-10.
    constexpr int kScan = 96;
    constexpr double kPi = 3.14159265358979323846;
    const double step = kPi / (kScan + 1);
    int best_k = -1;
    double best_loss = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kScan; ++k) {
        const auto cand = detail::eval_beta(ecm, k * step, torque_mag, sign_q, op.omega_m);
        if (cand.loss < best_loss) {
            best_loss = cand.loss;
            best_k = k;
        }
    }
    if (best_k < 0) {
        // Narrow feasible arcs near the torque envelope can slip through the
        // coarse scan; retry once at finer resolution before declaring the
        // point infeasible.
        constexpr int kFine = 1024;
        const double fine_step = kPi / (kFine + 1);
        for (int k = 1; k <= kFine; ++k) {
            const auto cand = detail::eval_beta(ecm, k * fine_step, torque_mag, sign_q, op.omega_m);
            if (cand.loss < best_loss) {
                best_loss = cand.loss;
                best_k = k;
            }
        }
        if (best_k < 0) {
            OperatingSolution sol;
            sol.feasible = false;
            sol.efficiency = std::numeric_limits<double>::quiet_NaN();
            sol.p_out = op.torque * op.omega_m;
            return sol;
        }
        const double lo = std::max(fine_step, (best_k - 1) * fine_step);
        const double hi = std::min(kPi - fine_step, (best_k + 1) * fine_step);
        const double beta = golden_minimize(
            [&](double b) { return detail::eval_beta(ecm, b, torque_mag, sign_q, op.omega_m).loss; },
            lo, hi, 1e-10);
        const auto cand = detail::eval_beta(ecm, beta, torque_mag, sign_q, op.omega_m);
        if (cand.current < 0.0) {
            OperatingSolution sol;
            sol.feasible = false;
            sol.efficiency = std::numeric_limits<double>::quiet_NaN();
            sol.p_out = op.torque * op.omega_m;
            return sol;
        }
        return detail::finish_solution(ecm, op, cand.current * std::cos(beta),
                                       cand.current * sign_q * std::sin(beta));
    }

    const double lo = std::max(step * 0.5, (best_k - 1) * step);
    const double hi = std::min(kPi - step * 0.5, (best_k + 1) * step);
    const double beta = golden_minimize(
        [&](double b) { return detail::eval_beta(ecm, b, torque_mag, sign_q, op.omega_m).loss; },
        lo, hi, 1e-10);
    auto cand = detail::eval_beta(ecm, beta, torque_mag, sign_q, op.omega_m);
    double beta_final = beta;
    if (cand.current < 0.0 || cand.loss > best_loss) {
        beta_final = best_k * step;  // golden landed on an infeasible edge
        cand = detail::eval_beta(ecm, beta_final, torque_mag, sign_q, op.omega_m);
    }
    return detail::finish_solution(ecm, op, cand.current * std::cos(beta_final),
                                   cand.current * sign_q * std::sin(beta_final));
}

/// Maximum deliverable torque at each speed under the current and voltage
/// limits, by bounded search over the current angle. Raw values, no smoothing.
inline std::vector<double> torque_envelope(const EcmParameters& ecm,
                                           std::span<const double> omega_list) {
    ecm.validate();
    std::vector<double> envelope;
    envelope.reserve(omega_list.size());
    const double c1 = 1.5 * ecm.pole_pairs * ecm.lambda;
    const double c2 = 1.5 * ecm.pole_pairs * (ecm.l_d - ecm.l_q);
    constexpr double kPi = 3.14159265358979323846;

    for (double omega_m : omega_list) {
        if (omega_m < 0.0) throw config_error("torque_envelope: omega values must be >= 0");
        const double omega_e = ecm.pole_pairs * omega_m;

        // Max torque along the ray at angle beta, over the admissible current
        // interval.
        auto ray_max = [&](double beta) -> double {
            const double sb = std::sin(beta), cb = std::cos(beta);
            if (sb <= 0.0) return -1.0;
            const auto vq = detail::voltage_quad(ecm, cb, sb, omega_e);
            double lo, hi;
            if (!detail::voltage_interval(vq, ecm.v_max, ecm.i_max, lo, hi)) return -1.0;
            const double a = c1 * sb, b = c2 * sb * cb;
            auto t_of = [&](double i) { return a * i + b * i * i; };
            double best = std::max(t_of(lo), t_of(hi));
            if (b < 0.0) {
                const double vertex = -a / (2.0 * b);
                if (vertex > lo && vertex < hi) best = std::max(best, t_of(vertex));
            }
            return best;
        };

        constexpr int kScan = 180;
        const double step = kPi / (kScan + 1);
        double best_t = -1.0;
        int best_k = -1;
        for (int k = 1; k <= kScan; ++k) {
            const double t = ray_max(k * step);
            if (t > best_t) {
                best_t = t;
                best_k = k;
            }
        }
        if (best_k < 0) {
            envelope.push_back(0.0);
            continue;
        }
        const double lo = std::max(step * 0.5, (best_k - 1) * step);
        const double hi = std::min(kPi - step * 0.5, (best_k + 1) * step);
        const double beta = golden_minimize([&](double b) { return -ray_max(b); }, lo, hi, 1e-10);
        envelope.push_back(std::max(0.0, std::max(best_t, ray_max(beta))));
    }
    return envelope;
}

}  // namespace emuq
