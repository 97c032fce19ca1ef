#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/pce.hpp"
#include "emuq/qoi.hpp"
#include "emuq/sampling.hpp"
#include "emuq/sobol_mc.hpp"

namespace emuq {

/// How a UQ or GSA run estimates its statistics.
struct UqSettings {
    GsaMethod method = GsaMethod::Pce;
    std::size_t n_samples = 0;  // 0 with PCE: auto, ceil(oversampling * K)
    std::uint64_t seed = 42;
    unsigned degree = 2;
    double oversampling = 2.0;
    SampleStrategy strategy = SampleStrategy::PseudoRandom;

    std::size_t resolve_samples(std::size_t n_params) const {
        if (method == GsaMethod::Pce) {
            const double k = static_cast<double>(total_degree_cardinality(n_params, degree));
            const auto auto_n = static_cast<std::size_t>(std::ceil(oversampling * k));
            return n_samples == 0 ? auto_n : n_samples;
        }
        if (n_samples == 0) throw config_error("method.n_samples: required for the mc method");
        return n_samples;
    }
};

/// One moment-estimation run; keeps the ingredients around for reuse
/// (GSA post-processing, artifact export).
struct UqRun {
    MomentField field;
    QoiMatrix qoi;
    SampleMatrix samples;
    std::optional<PceModel> pce;
};

namespace detail {

inline std::vector<std::size_t> free_indices(const ParameterSpace& space,
                                             const std::vector<std::string>& fixed) {
    for (const auto& name : fixed)
        if (!space.contains(name))
            throw config_error("reduction.fixed: parameter '" + name + "' not in the space");
    std::vector<std::size_t> keep;
    for (std::size_t n = 0; n < space.size(); ++n) {
        const auto& name = space.param(n).name;
        if (std::find(fixed.begin(), fixed.end(), name) == fixed.end()) keep.push_back(n);
    }
    return keep;
}

inline SampleMatrix pin_columns(const SampleMatrix& samples, const ParameterSpace& space,
                                const std::vector<std::size_t>& keep) {
    SampleMatrix pinned = samples;
    std::vector<std::uint8_t> is_free(space.size(), 0);
    for (std::size_t n : keep) is_free[n] = 1;
    for (std::size_t n = 0; n < space.size(); ++n) {
        if (is_free[n]) continue;
        const double nominal = space.param(n).nominal;
        for (std::size_t i = 0; i < pinned.rows(); ++i) pinned(i, n) = nominal;
    }
    return pinned;
}

inline SampleMatrix extract_columns(const SampleMatrix& samples, const ParameterSpace& sub,
                                    const std::vector<std::size_t>& keep) {
    SampleMatrix out(samples.rows(), keep.size(), sub, samples.seed(), samples.strategy());
    for (std::size_t i = 0; i < samples.rows(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) out(i, j) = samples(i, keep[j]);
    return out;
}

}  // namespace detail

/// Estimates mean/std of the efficiency QoI by the chosen method, optionally
/// with some parameters pinned at their nominal values. The full-dimension
/// sample is drawn once and pinned columns are overwritten, so a reduced run
/// shares the surviving columns with the full run (common random numbers).
inline UqRun estimate_moments(const EcmParameters& ecm, const ParameterSpace& space,
                              const OperatingSet& opset, const UqSettings& settings,
                              CostReport& cost, unsigned workers = 0,
                              const std::vector<std::string>& fixed = {}) {
    const std::size_t n_free = space.size() - fixed.size();
    const auto keep = detail::free_indices(space, fixed);
    if (keep.size() != n_free)
        throw config_error("reduction.fixed: duplicate names in the fixed list");

    // Sample size always follows the full dimension, so full and reduced
    // comparison runs share N_s.
    const std::size_t n_samples = settings.resolve_samples(space.size());

    SampleMatrix samples = sample(space, n_samples, settings.seed, settings.strategy);
    if (!fixed.empty()) samples = detail::pin_columns(samples, space, keep);

    UqRun run;
    const auto phase =
        settings.method == GsaMethod::Pce ? CostReport::Phase::PceFit : CostReport::Phase::Sampling;
    run.qoi = evaluate_qoi(ecm, space, samples, opset, cost, phase, workers);
    run.samples = std::move(samples);

    if (settings.method == GsaMethod::MonteCarlo || keep.empty()) {
        // All-pinned PCE runs degenerate to a deterministic model; sample
        // moments give the exact constant field.
        run.field = moments(run.qoi);
        return run;
    }

    if (keep.size() == space.size()) {
        run.pce = fit_pce(space, run.samples, run.qoi, settings.degree, settings.oversampling);
    } else {
        const ParameterSpace sub = space.subspace(keep);
        const SampleMatrix sub_samples = detail::extract_columns(run.samples, sub, keep);
        run.pce = fit_pce(sub, sub_samples, run.qoi, settings.degree, settings.oversampling);
    }
    run.field = pce_moments(*run.pce);
    return run;
}

/// Parameters whose generalized total index falls below the threshold,
/// sorted ascending by that index.
inline std::vector<std::string> select_noninfluential(const SensitivityResult& result,
                                                      double threshold) {
    if (result.generalized_total.size() != result.n_params)
        throw std::invalid_argument("select_noninfluential: generalized indices missing");
    std::vector<std::size_t> picked;
    for (std::size_t n = 0; n < result.n_params; ++n)
        if (result.generalized_total[n] < threshold) picked.push_back(n);
    std::sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
        return result.generalized_total[a] < result.generalized_total[b];
    });
    std::vector<std::string> names;
    names.reserve(picked.size());
    for (std::size_t n : picked)
        names.push_back(result.param_names.empty() ? "x" + std::to_string(n + 1)
                                                   : result.param_names[n]);
    return names;
}

/// Validation of a sensitivity-guided reduction: moments of the full model
/// against a run with the fixed parameters pinned at nominal.
struct ReductionReport {
    std::vector<std::string> fixed_parameters;
    double threshold = 0.0;  // the selection threshold, when auto-selected
    double mae_mean = 0.0;
    double mae_std = 0.0;
    MomentField full;
    MomentField reduced;
    std::vector<std::uint8_t> common_mask;
};

/// Mean absolute difference over components unmasked in both fields.
inline double mean_absolute_error(const std::vector<double>& a, const std::vector<double>& b,
                                  const std::vector<std::uint8_t>& mask) {
    if (a.size() != b.size() || a.size() != mask.size())
        throw std::invalid_argument("mean_absolute_error: field size mismatch");
    KahanSum acc;
    std::size_t count = 0;
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (!mask[m]) continue;
        acc.add(std::abs(a[m] - b[m]));
        ++count;
    }
    if (count == 0) throw numerical_error("mean_absolute_error: no unmasked components");
    return acc.value() / static_cast<double>(count);
}

/// Runs the full and reduced models with the same method, seed, and sample
/// size and reports MAE of the mean and std fields over the commonly
/// unmasked components.
inline ReductionReport reduce_and_compare(const EcmParameters& ecm, const ParameterSpace& space,
                                          const OperatingSet& opset, const UqSettings& settings,
                                          const std::vector<std::string>& fixed,
                                          CostReport& cost, unsigned workers = 0) {
    ReductionReport report;
    report.fixed_parameters = fixed;

    const UqRun full = estimate_moments(ecm, space, opset, settings, cost, workers);
    const UqRun reduced = estimate_moments(ecm, space, opset, settings, cost, workers, fixed);

    report.common_mask.assign(opset.size(), 1);
    for (std::size_t m = 0; m < opset.size(); ++m)
        report.common_mask[m] = full.field.mask[m] && reduced.field.mask[m] ? 1 : 0;

    report.mae_mean = mean_absolute_error(full.field.mean, reduced.field.mean, report.common_mask);
    report.mae_std =
        mean_absolute_error(full.field.std_dev, reduced.field.std_dev, report.common_mask);
    report.full = full.field;
    report.reduced = reduced.field;
    return report;
}

}  // namespace emuq
