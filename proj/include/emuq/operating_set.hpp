#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/pmsm_ecm.hpp"

namespace emuq {

enum class OperatingSetKind { MapGrid, CycleProfile };

/// Ordered list of (T, omega_m) operating points: either a torque-speed map
/// grid or a time-ordered driving-cycle profile.
struct OperatingSet {
    std::vector<OperatingPoint> points;
    OperatingSetKind kind = OperatingSetKind::MapGrid;
    std::optional<std::pair<std::size_t, std::size_t>> grid_shape;  // (n_t, n_omega)

    std::size_t size() const noexcept { return points.size(); }
};

struct GridSpec {
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t n_t = 0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::size_t n_omega = 0;
    bool clip_to_envelope = true;
};

/// Uniform tensor grid over the torque-speed rectangle; with clipping,
/// points above the nominal-parameter torque envelope are dropped.
inline OperatingSet build_grid(const GridSpec& spec, const EcmParameters& ecm_nominal) {
    if (spec.n_t < 2 || spec.n_omega < 2)
        throw config_error("operating.grid: n_t and n_omega must be >= 2");
    if (!(spec.t_min < spec.t_max))
        throw config_error("operating.grid: requires t_min < t_max");
    if (!(spec.omega_min < spec.omega_max) || spec.omega_min < 0.0)
        throw config_error("operating.grid: requires 0 <= omega_min < omega_max");

    std::vector<double> omegas(spec.n_omega);
    for (std::size_t k = 0; k < spec.n_omega; ++k)
        omegas[k] = spec.omega_min +
                    (spec.omega_max - spec.omega_min) * static_cast<double>(k) /
                        static_cast<double>(spec.n_omega - 1);
    std::vector<double> envelope;
    if (spec.clip_to_envelope) envelope = torque_envelope(ecm_nominal, omegas);

    OperatingSet set;
    set.kind = OperatingSetKind::MapGrid;
    set.grid_shape = {spec.n_t, spec.n_omega};
    for (std::size_t r = 0; r < spec.n_t; ++r) {
        const double t = spec.t_min + (spec.t_max - spec.t_min) * static_cast<double>(r) /
                                          static_cast<double>(spec.n_t - 1);
        for (std::size_t k = 0; k < spec.n_omega; ++k) {
            if (spec.clip_to_envelope && t > envelope[k]) continue;
            set.points.push_back({t, omegas[k]});
        }
    }
    if (set.points.empty()) throw config_error("operating.grid: empty grid after clipping");
    return set;
}

/// Longitudinal vehicle model for converting a speed trace to motor torque
/// and speed: F = m*a + m*g*c_rr + 0.5*rho*cd_a*v^2, through an ideal
/// single-ratio driveline.
struct VehicleParams {
    double mass_kg = 0.0;
    double wheel_radius_m = 0.0;
    double gear_ratio = 1.0;  // motor speed / wheel speed
    double c_rr = 0.0;
    double cd_a = 0.0;  // drag coefficient times frontal area, m^2
    double air_density = 1.225;

    void validate() const {
        if (!(mass_kg > 0.0)) throw config_error("operating.vehicle.mass_kg: must be > 0");
        if (!(wheel_radius_m > 0.0))
            throw config_error("operating.vehicle.wheel_radius_m: must be > 0");
        if (!(gear_ratio > 0.0)) throw config_error("operating.vehicle.gear_ratio: must be > 0");
        if (c_rr < 0.0) throw config_error("operating.vehicle.c_rr: must be >= 0");
        if (cd_a < 0.0) throw config_error("operating.vehicle.cd_a: must be >= 0");
        if (!(air_density > 0.0))
            throw config_error("operating.vehicle.air_density: must be > 0");
    }
};

namespace detail {

inline std::string trim(std::string_view sv) {
    const auto begin = sv.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = sv.find_last_not_of(" \t\r");
    return std::string(sv.substr(begin, end - begin + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

inline double parse_number(const std::string& field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw io_error("cycle file: malformed number '" + field + "' at line " +
                       std::to_string(line_no));
    return value;
}

}  // namespace detail

/// Parses a driving-cycle CSV. Two schemas are accepted:
///   time_s,torque_Nm,omega_rad_s  -- direct operating points
///   time_s,speed_mps              -- converted through the vehicle model
/// Time must be strictly increasing. Acceleration for the speed schema uses
/// central differences in the interior and one-sided differences at the ends.
inline OperatingSet parse_cycle(std::istream& in, const std::optional<VehicleParams>& vehicle) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw io_error("cycle file: empty file");
    ++line_no;
    const auto header = detail::split_csv_line(line);

    enum class Schema { Direct, Speed } schema;
    if (header == std::vector<std::string>{"time_s", "torque_Nm", "omega_rad_s"}) {
        schema = Schema::Direct;
    } else if (header == std::vector<std::string>{"time_s", "speed_mps"}) {
        schema = Schema::Speed;
        if (!vehicle)
            throw config_error(
                "cycle file uses the speed_mps schema but no operating.vehicle block is "
                "configured");
        vehicle->validate();
    } else {
        throw io_error(
            "cycle file: header must be 'time_s,torque_Nm,omega_rad_s' or 'time_s,speed_mps'");
    }

    std::vector<double> times, col1, col2;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        const std::size_t expect = schema == Schema::Direct ? 3 : 2;
        if (fields.size() != expect)
            throw io_error("cycle file: expected " + std::to_string(expect) +
                           " fields at line " + std::to_string(line_no));
        times.push_back(detail::parse_number(fields[0], line_no));
        col1.push_back(detail::parse_number(fields[1], line_no));
        if (schema == Schema::Direct) col2.push_back(detail::parse_number(fields[2], line_no));
        if (times.size() >= 2 && !(times[times.size() - 2] < times.back()))
            throw io_error("cycle file: time_s not strictly increasing at line " +
                           std::to_string(line_no));
    }
    if (times.empty()) throw io_error("cycle file: no data rows");

    OperatingSet set;
    set.kind = OperatingSetKind::CycleProfile;
    set.points.reserve(times.size());

    if (schema == Schema::Direct) {
        for (std::size_t i = 0; i < times.size(); ++i) set.points.push_back({col1[i], col2[i]});
        return set;
    }

    const VehicleParams& veh = *vehicle;
    const std::size_t n = times.size();
    constexpr double kGravity = 9.80665;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = col1[i];
        double accel = 0.0;
        if (n > 1) {
            if (i == 0)
                accel = (col1[1] - col1[0]) / (times[1] - times[0]);
            else if (i == n - 1)
                accel = (col1[n - 1] - col1[n - 2]) / (times[n - 1] - times[n - 2]);
            else
                accel = (col1[i + 1] - col1[i - 1]) / (times[i + 1] - times[i - 1]);
        }
        const double rolling = v > 0.0 ? veh.mass_kg * kGravity * veh.c_rr : 0.0;
        const double drag = 0.5 * veh.air_density * veh.cd_a * v * v;
        const double force = veh.mass_kg * accel + rolling + drag;
        const double wheel_torque = force * veh.wheel_radius_m;
        set.points.push_back(
            {wheel_torque / veh.gear_ratio, veh.gear_ratio * v / veh.wheel_radius_m});
    }
    return set;
}

inline OperatingSet load_cycle(const std::filesystem::path& path,
                               const std::optional<VehicleParams>& vehicle = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw io_error("cycle file: cannot open '" + path.string() + "'");
    return parse_cycle(in, vehicle);
}

}  // namespace emuq
