#pragma once

#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "emuq/artifacts.hpp"
#include "emuq/config.hpp"
#include "emuq/errors.hpp"
#include "emuq/operating_set.hpp"
#include "emuq/parallel.hpp"
#include "emuq/pce.hpp"
#include "emuq/qoi.hpp"
#include "emuq/reduction.hpp"
#include "emuq/sobol_mc.hpp"

namespace emuq {

namespace detail {

inline EcmParameters nominal_machine(const RunConfig& cfg) {
    return apply_sample(cfg.model, cfg.space, cfg.space.nominal_point());
}

inline OperatingSet make_opset(const RunConfig& cfg) {
    if (cfg.grid_mode) return build_grid(cfg.grid, nominal_machine(cfg));
    return load_cycle(cfg.cycle_file, cfg.vehicle);
}

inline ordered_json run_meta(const RunConfig& cfg, const std::string& subcommand,
                             const OperatingSet& opset, std::size_t n_samples) {
    ordered_json meta;
    meta["tool"] = "emuq";
    meta["subcommand"] = subcommand;
    meta["n_op"] = opset.size();
    meta["n_samples"] = n_samples;
    ordered_json method;
    method["kind"] = cfg.method.method == GsaMethod::Pce ? "pce" : "mc";
    method["seed"] = cfg.method.seed;
    method["strategy"] =
        cfg.method.strategy == SampleStrategy::LatinHypercube ? "lhs" : "pseudo";
    if (cfg.method.method == GsaMethod::Pce) {
        method["degree"] = cfg.method.degree;
        method["oversampling"] = cfg.method.oversampling;
        method["n_terms"] = total_degree_cardinality(cfg.space.size(), cfg.method.degree);
    }
    meta["method"] = std::move(method);
    ordered_json space = ordered_json::array();
    for (const auto& p : cfg.space.params())
        space.push_back({{"name", p.name},
                         {"nominal", p.nominal},
                         {"lower", p.lower},
                         {"upper", p.upper}});
    meta["space"] = std::move(space);
    ordered_json model;
    model["R_s"] = cfg.model.r_s;
    model["lambda"] = cfg.model.lambda;
    model["L_d"] = cfg.model.l_d;
    model["L_q"] = cfg.model.l_q;
    model["pole_pairs"] = cfg.model.pole_pairs;
    model["I_max"] = cfg.model.i_max;
    model["V_max"] = cfg.model.v_max;
    model["k_hyst"] = cfg.model.k_hyst;
    model["k_eddy"] = cfg.model.k_eddy;
    model["k_fric"] = cfg.model.k_fric;
    model["k_wind"] = cfg.model.k_wind;
    meta["model"] = std::move(model);
    return meta;
}

inline void ensure_outdir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw io_error("cannot create output directory '" + cfg.output_dir.string() + "'");
}

}  // namespace detail

struct MapResult {
    OperatingSet opset;
    std::vector<double> efficiency;       // NaN where the nominal solve is infeasible
    std::vector<std::uint8_t> feasible;   // per point
    std::vector<double> envelope_omegas;
    std::vector<double> envelope_torques;
};

/// Nominal efficiency map plus torque envelope.
inline MapResult run_map(const RunConfig& cfg) {
    detail::ensure_outdir(cfg);
    MapResult res;
    res.opset = detail::make_opset(cfg);
    const EcmParameters ecm = detail::nominal_machine(cfg);

    res.efficiency.assign(res.opset.size(), std::numeric_limits<double>::quiet_NaN());
    res.feasible.assign(res.opset.size(), 0);
    parallel_for(res.opset.size(), cfg.workers, [&](std::size_t m) {
        const OperatingSolution sol = solve_operating_point(ecm, res.opset.points[m]);
        if (sol.feasible) {
            res.efficiency[m] = sol.efficiency;
            res.feasible[m] = 1;
        }
    });

    // envelope over the grid's speed axis, or over the profile's speed range
    if (cfg.grid_mode) {
        res.envelope_omegas.resize(cfg.grid.n_omega);
        for (std::size_t k = 0; k < cfg.grid.n_omega; ++k)
            res.envelope_omegas[k] =
                cfg.grid.omega_min + (cfg.grid.omega_max - cfg.grid.omega_min) *
                                         static_cast<double>(k) /
                                         static_cast<double>(cfg.grid.n_omega - 1);
    } else {
        double omega_max = 0.0;
        for (const auto& p : res.opset.points) omega_max = std::max(omega_max, p.omega_m);
        const std::size_t n = 101;
        res.envelope_omegas.resize(n);
        for (std::size_t k = 0; k < n; ++k)
            res.envelope_omegas[k] =
                omega_max * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    res.envelope_torques = torque_envelope(ecm, res.envelope_omegas);

    write_point_csv(cfg.output_dir / "map.csv", res.opset, "efficiency", res.efficiency);
    write_opset_metadata(cfg.output_dir / "map.csv.meta.json", res.opset, res.feasible);
    write_envelope_csv(cfg.output_dir / "envelope.csv", res.envelope_omegas,
                       res.envelope_torques);
    write_json(cfg.output_dir / "run_meta.json", detail::run_meta(cfg, "map", res.opset, 0));
    return res;
}

struct UqResult {
    OperatingSet opset;
    MomentField field;
    CostReport cost;
    std::optional<PceModel> pce;
    std::optional<MomentField> compare_field;   // the other method, compare mode
    std::vector<double> compare_mean_abs_diff;  // |mean - mean_other|
    std::vector<double> compare_std_abs_diff;
};

/// Mean/std fields of the efficiency QoI by the configured method; with
/// compare enabled, both methods run and the pointwise absolute differences
/// are exported as well.
inline UqResult run_uq(const RunConfig& cfg) {
    detail::ensure_outdir(cfg);
    UqResult res;
    res.opset = detail::make_opset(cfg);

    if (cfg.method.method == GsaMethod::MonteCarlo && cfg.method.n_samples < 10)
        std::fprintf(stderr,
                     "warning: method.n_samples = %zu is very small; std estimates will be "
                     "noisy\n",
                     cfg.method.n_samples);

    UqRun run = estimate_moments(cfg.model, cfg.space, res.opset, cfg.method, res.cost,
                                 cfg.workers);
    res.field = run.field;
    res.pce = std::move(run.pce);

    const std::size_t n_samples = cfg.method.resolve_samples(cfg.space.size());
    write_point_csv(cfg.output_dir / "mean.csv", res.opset, "mean", res.field.mean);
    write_point_csv(cfg.output_dir / "std.csv", res.opset, "std", res.field.std_dev);
    write_opset_metadata(cfg.output_dir / "mean.csv.meta.json", res.opset, res.field.mask);
    write_opset_metadata(cfg.output_dir / "std.csv.meta.json", res.opset, res.field.mask);
    if (res.pce) write_json(cfg.output_dir / "pce_model.json", pce_to_json(*res.pce));

    if (cfg.compare) {
        UqSettings other = cfg.method;
        other.method = cfg.method.method == GsaMethod::Pce ? GsaMethod::MonteCarlo
                                                           : GsaMethod::Pce;
        if (other.method == GsaMethod::MonteCarlo && other.n_samples == 0)
            throw config_error(
                "config: 'method.n_samples' is required for the Monte Carlo side of --compare");
        UqRun other_run =
            estimate_moments(cfg.model, cfg.space, res.opset, other, res.cost, cfg.workers);
        res.compare_field = other_run.field;
        res.compare_mean_abs_diff.assign(res.opset.size(), 0.0);
        res.compare_std_abs_diff.assign(res.opset.size(), 0.0);
        for (std::size_t m = 0; m < res.opset.size(); ++m) {
            res.compare_mean_abs_diff[m] =
                std::abs(res.field.mean[m] - other_run.field.mean[m]);
            res.compare_std_abs_diff[m] =
                std::abs(res.field.std_dev[m] - other_run.field.std_dev[m]);
        }
        write_point_csv(cfg.output_dir / "compare_mean.csv", res.opset, "abs_diff",
                        res.compare_mean_abs_diff);
        write_point_csv(cfg.output_dir / "compare_std.csv", res.opset, "abs_diff",
                        res.compare_std_abs_diff);
    }

    write_json(cfg.output_dir / "cost.json", cost_to_json(res.cost));
    write_json(cfg.output_dir / "run_meta.json",
               detail::run_meta(cfg, "uq", res.opset, n_samples));
    return res;
}

struct GsaResult {
    OperatingSet opset;
    SensitivityResult sensitivity;
    CostReport cost;
    std::optional<PceModel> pce;
};

/// Per-component Sobol' maps plus generalized indices, by MC pick-and-freeze
/// or PCE post-processing.
inline GsaResult run_gsa(const RunConfig& cfg) {
    detail::ensure_outdir(cfg);
    GsaResult res;
    res.opset = detail::make_opset(cfg);

    if (cfg.method.method == GsaMethod::Pce) {
        UqRun run = estimate_moments(cfg.model, cfg.space, res.opset, cfg.method, res.cost,
                                     cfg.workers);
        res.sensitivity = pce_generalized(*run.pce);
        res.pce = std::move(run.pce);
    } else {
        const std::size_t n_s = cfg.method.resolve_samples(cfg.space.size());
        const PickFreezeDesign design = pick_freeze(cfg.space, n_s, cfg.method.seed);
        QoiMatrix f_a = evaluate_qoi(cfg.model, cfg.space, design.a, res.opset, res.cost,
                                     CostReport::Phase::PickFreeze, cfg.workers);
        QoiMatrix f_b = evaluate_qoi(cfg.model, cfg.space, design.b, res.opset, res.cost,
                                     CostReport::Phase::PickFreeze, cfg.workers);
        std::vector<QoiMatrix> f_ab;
        f_ab.reserve(cfg.space.size());
        for (std::size_t n = 0; n < cfg.space.size(); ++n)
            f_ab.push_back(evaluate_qoi(cfg.model, cfg.space, design.ab[n], res.opset, res.cost,
                                        CostReport::Phase::PickFreeze, cfg.workers));
        std::vector<QoiMatrix*> mats = {&f_a, &f_b};
        for (auto& q : f_ab) mats.push_back(&q);
        unify_masks(mats);
        res.sensitivity = mc_generalized(f_a, f_b, f_ab);
        res.sensitivity.param_names.clear();
        for (const auto& p : cfg.space.params()) res.sensitivity.param_names.push_back(p.name);
    }

    for (std::size_t n = 0; n < cfg.space.size(); ++n) {
        const std::string& name = cfg.space.param(n).name;
        std::vector<double> s_first(res.opset.size()), s_total(res.opset.size());
        for (std::size_t m = 0; m < res.opset.size(); ++m) {
            s_first[m] = res.sensitivity.first_at(n, m);
            s_total[m] = res.sensitivity.total_at(n, m);
        }
        write_point_csv(cfg.output_dir / ("sobol_" + name + ".csv"), res.opset,
                        std::vector<std::string>{"s_first", "s_total"}, {&s_first, &s_total});
    }
    write_json(cfg.output_dir / "indices.json", sensitivity_to_json(res.sensitivity));
    if (res.pce) write_json(cfg.output_dir / "pce_model.json", pce_to_json(*res.pce));
    write_json(cfg.output_dir / "cost.json", cost_to_json(res.cost));
    write_json(cfg.output_dir / "run_meta.json",
               detail::run_meta(cfg, "gsa", res.opset,
                                cfg.method.resolve_samples(cfg.space.size())));
    return res;
}

struct ReduceResult {
    OperatingSet opset;
    ReductionReport report;
    CostReport cost;
};

/// Fixes the configured (or GSA-selected) non-influential parameters at
/// nominal and validates the reduction by MAE of the moment fields.
inline ReduceResult run_reduce(const RunConfig& cfg) {
    detail::ensure_outdir(cfg);
    ReduceResult res;
    res.opset = detail::make_opset(cfg);

    std::vector<std::string> fixed = cfg.reduction_fixed;
    if (fixed.empty()) {
        // select from a GSA run with the same method settings
        if (cfg.method.method == GsaMethod::Pce) {
            UqRun run = estimate_moments(cfg.model, cfg.space, res.opset, cfg.method, res.cost,
                                         cfg.workers);
            fixed = select_noninfluential(pce_generalized(*run.pce), cfg.reduction_threshold);
        } else {
            RunConfig gsa_cfg = cfg;
            gsa_cfg.output_dir = cfg.output_dir / "gsa_selection";
            GsaResult gsa = run_gsa(gsa_cfg);
            res.cost = gsa.cost;
            fixed = select_noninfluential(gsa.sensitivity, cfg.reduction_threshold);
        }
    }

    res.report = reduce_and_compare(cfg.model, cfg.space, res.opset, cfg.method, fixed, res.cost,
                                    cfg.workers);
    res.report.threshold = cfg.reduction_threshold;

    write_json(cfg.output_dir / "reduction.json", reduction_to_json(res.report));
    write_json(cfg.output_dir / "cost.json", cost_to_json(res.cost));
    write_json(cfg.output_dir / "run_meta.json",
               detail::run_meta(cfg, "reduce", res.opset,
                                cfg.method.resolve_samples(cfg.space.size())));
    return res;
}

}  // namespace emuq
