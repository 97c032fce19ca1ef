#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "emuq/errors.hpp"
#include "emuq/pce.hpp"
#include "emuq/qoi.hpp"
#include "emuq/reduction.hpp"
#include "emuq/sobol_mc.hpp"

namespace emuq {

using ordered_json = nlohmann::ordered_json;

/// Round-trip-safe numeric formatting: 17 significant digits, NaN normalized.
inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-identical reruns
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace detail

/// Long-format per-point CSV over an operating set: torque_Nm,omega_rad_s
/// plus one column per named field.
inline void write_point_csv(const std::filesystem::path& path, const OperatingSet& opset,
                            const std::vector<std::string>& value_names,
                            const std::vector<const std::vector<double>*>& columns) {
    for (const auto* col : columns)
        if (col->size() != opset.size())
            throw std::invalid_argument("write_point_csv: column length mismatch");
    auto out = detail::open_for_write(path);
    out << "torque_Nm,omega_rad_s";
    for (const auto& name : value_names) out << ',' << name;
    out << '\n';
    for (std::size_t m = 0; m < opset.size(); ++m) {
        out << fmt17(opset.points[m].torque) << ',' << fmt17(opset.points[m].omega_m);
        for (const auto* col : columns) out << ',' << fmt17((*col)[m]);
        out << '\n';
    }
}

inline void write_point_csv(const std::filesystem::path& path, const OperatingSet& opset,
                            const std::string& value_name, const std::vector<double>& values) {
    write_point_csv(path, opset, std::vector<std::string>{value_name}, {&values});
}

/// Sidecar metadata for a point CSV: set kind, grid shape, feasibility mask.
inline void write_opset_metadata(const std::filesystem::path& path, const OperatingSet& opset,
                                 const std::vector<std::uint8_t>& mask) {
    ordered_json meta;
    meta["kind"] = opset.kind == OperatingSetKind::MapGrid ? "map-grid" : "cycle-profile";
    meta["n_op"] = opset.size();
    if (opset.grid_shape) {
        meta["grid_shape"] = {{"n_t", opset.grid_shape->first},
                              {"n_omega", opset.grid_shape->second}};
    }
    if (!mask.empty()) {
        ordered_json jm = ordered_json::array();
        for (auto b : mask) jm.push_back(b != 0);
        meta["mask"] = std::move(jm);
    }
    auto out = detail::open_for_write(path);
    out << meta.dump(2) << '\n';
}

inline void write_envelope_csv(const std::filesystem::path& path,
                               std::span<const double> omegas, std::span<const double> torques) {
    if (omegas.size() != torques.size())
        throw std::invalid_argument("write_envelope_csv: length mismatch");
    auto out = detail::open_for_write(path);
    out << "omega_rad_s,torque_Nm\n";
    for (std::size_t i = 0; i < omegas.size(); ++i)
        out << fmt17(omegas[i]) << ',' << fmt17(torques[i]) << '\n';
}

namespace detail {

inline ordered_json number_array(std::span<const double> values) {
    ordered_json arr = ordered_json::array();
    for (double v : values) {
        if (std::isnan(v))
            arr.push_back(nullptr);  // JSON has no NaN; degenerate entries export as null
        else
            arr.push_back(v);
    }
    return arr;
}

}  // namespace detail

/// Sensitivity export: one record per parameter with per-component and
/// generalized indices, plus the component mask and degeneracy flags.
inline ordered_json sensitivity_to_json(const SensitivityResult& r) {
    ordered_json doc;
    doc["method"] = r.method == GsaMethod::Pce ? "pce" : "mc";
    doc["n_components"] = r.n_components;
    ordered_json params = ordered_json::array();
    for (std::size_t n = 0; n < r.n_params; ++n) {
        ordered_json entry;
        entry["parameter"] = r.param_names.empty() ? "x" + std::to_string(n + 1)
                                                   : r.param_names[n];
        entry["G_first"] = r.generalized_first.empty() ? ordered_json(nullptr)
                                                       : ordered_json(r.generalized_first[n]);
        entry["G_total"] = r.generalized_total.empty() ? ordered_json(nullptr)
                                                       : ordered_json(r.generalized_total[n]);
        entry["S_first"] = detail::number_array(
            std::span<const double>(r.first.data() + n * r.n_components, r.n_components));
        entry["S_total"] = detail::number_array(
            std::span<const double>(r.total.data() + n * r.n_components, r.n_components));
        params.push_back(std::move(entry));
    }
    doc["parameters"] = std::move(params);
    ordered_json mask = ordered_json::array(), degen = ordered_json::array();
    for (auto b : r.mask) mask.push_back(b != 0);
    for (auto b : r.degenerate) degen.push_back(b != 0);
    doc["mask"] = std::move(mask);
    doc["degenerate"] = std::move(degen);
    doc["component_variance"] = detail::number_array(r.component_variance);
    return doc;
}

inline ordered_json cost_to_json(const CostReport& cost) {
    ordered_json doc;
    doc["model_evaluations"] = cost.total();
    doc["breakdown"] = {{"sampling", cost.sampling()},
                        {"pick_freeze", cost.pick_freeze()},
                        {"pce_fit", cost.pce_fit()}};
    return doc;
}

inline ordered_json reduction_to_json(const ReductionReport& r) {
    ordered_json doc;
    doc["fixed_parameters"] = r.fixed_parameters;
    doc["threshold"] = r.threshold;
    doc["mae_mean"] = r.mae_mean;
    doc["mae_std"] = r.mae_std;
    doc["full"] = {{"mean", detail::number_array(r.full.mean)},
                   {"std", detail::number_array(r.full.std_dev)}};
    doc["reduced"] = {{"mean", detail::number_array(r.reduced.mean)},
                      {"std", detail::number_array(r.reduced.std_dev)}};
    ordered_json mask = ordered_json::array();
    for (auto b : r.common_mask) mask.push_back(b != 0);
    doc["common_mask"] = std::move(mask);
    return doc;
}

/// PCE model serialization for reuse without refitting.
inline ordered_json pce_to_json(const PceModel& model) {
    ordered_json doc;
    doc["degree"] = model.multi_indices.degree();
    doc["n_params"] = model.multi_indices.n_params();
    doc["n_terms"] = model.multi_indices.size();
    doc["n_components"] = model.n_components;
    ordered_json space = ordered_json::array();
    for (const auto& p : model.space.params())
        space.push_back({{"name", p.name},
                         {"nominal", p.nominal},
                         {"lower", p.lower},
                         {"upper", p.upper}});
    doc["space"] = std::move(space);
    ordered_json indices = ordered_json::array();
    for (std::size_t k = 0; k < model.multi_indices.size(); ++k) {
        ordered_json mi = ordered_json::array();
        for (unsigned e : model.multi_indices.at(k)) mi.push_back(e);
        indices.push_back(std::move(mi));
    }
    doc["multi_indices"] = std::move(indices);
    doc["coefficients"] = detail::number_array(model.coefficients);
    ordered_json mask = ordered_json::array();
    for (auto b : model.mask) mask.push_back(b != 0);
    doc["mask"] = std::move(mask);
    doc["diagnostics"] = {{"condition_estimate", model.diagnostics.condition_estimate},
                          {"oversampling", model.diagnostics.oversampling},
                          {"n_samples", model.diagnostics.n_samples},
                          {"ill_conditioned", model.diagnostics.ill_conditioned},
                          {"residual_norm", detail::number_array(model.diagnostics.residual_norm)}};
    return doc;
}

inline PceModel pce_from_json(const ordered_json& doc) {
    PceModel model;
    const std::size_t n_params = doc.at("n_params").get<std::size_t>();
    const unsigned degree = doc.at("degree").get<unsigned>();
    std::vector<unsigned> flat;
    for (const auto& mi : doc.at("multi_indices"))
        for (const auto& e : mi) flat.push_back(e.get<unsigned>());
    model.multi_indices = MultiIndexSet(n_params, degree, std::move(flat));
    model.n_components = doc.at("n_components").get<std::size_t>();
    std::vector<RandomParameter> params;
    for (const auto& p : doc.at("space"))
        params.push_back({p.at("name").get<std::string>(), p.at("nominal").get<double>(),
                          p.at("lower").get<double>(), p.at("upper").get<double>()});
    model.space = ParameterSpace(std::move(params));
    model.coefficients.clear();
    for (const auto& c : doc.at("coefficients"))
        model.coefficients.push_back(c.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                 : c.get<double>());
    model.mask.clear();
    for (const auto& b : doc.at("mask")) model.mask.push_back(b.get<bool>() ? 1 : 0);
    if (doc.contains("diagnostics")) {
        const auto& d = doc["diagnostics"];
        model.diagnostics.condition_estimate = d.at("condition_estimate").get<double>();
        model.diagnostics.oversampling = d.at("oversampling").get<double>();
        model.diagnostics.n_samples = d.at("n_samples").get<std::size_t>();
        model.diagnostics.ill_conditioned = d.at("ill_conditioned").get<bool>();
        for (const auto& r : d.at("residual_norm"))
            model.diagnostics.residual_norm.push_back(r.get<double>());
    }
    if (model.coefficients.size() != model.multi_indices.size() * model.n_components)
        throw io_error("pce model: coefficient array size mismatch");
    return model;
}

inline void write_json(const std::filesystem::path& path, const ordered_json& doc) {
    auto out = detail::open_for_write(path);
    out << doc.dump(2) << '\n';
}

inline ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    try {
        return ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw io_error("JSON parse failure in '" + path.string() + "': " + e.what());
    }
}

}  // namespace emuq
