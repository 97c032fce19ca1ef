#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/numeric.hpp"
#include "emuq/qoi.hpp"

namespace emuq {

/// Variance guard: components whose sample variance falls below this are
/// flagged degenerate, reported as NaN, and excluded from the generalized
/// traces. Operationalizes the observation that indices at near-zero output
/// variance are numerical artifacts, not sensitivity information.
inline constexpr double kDegenerateVariance = 1e-14;

enum class GsaMethod { MonteCarlo, Pce };

/// First/total Sobol' indices per output component plus trace-aggregated
/// generalized indices per parameter. Raw estimates are reported unclipped so
/// estimator bias stays visible.
struct SensitivityResult {
    std::size_t n_params = 0;
    std::size_t n_components = 0;
    std::vector<std::string> param_names;            // may be empty for synthetic runs
    std::vector<double> first;                       // S_n, n_params x n_components
    std::vector<double> total;                       // S_Tn, n_params x n_components
    std::vector<double> first_effect;                // raw V_n, n_params x n_components
    std::vector<double> total_effect;                // raw V_Tn, n_params x n_components
    std::vector<double> component_variance;          // per component (denominator V)
    std::vector<double> generalized_first;           // per parameter
    std::vector<double> generalized_total;           // per parameter
    std::vector<std::uint8_t> mask;                  // per component
    std::vector<std::uint8_t> degenerate;            // per component (V below guard)
    GsaMethod method = GsaMethod::MonteCarlo;

    double first_at(std::size_t n, std::size_t m) const { return first[n * n_components + m]; }
    double total_at(std::size_t n, std::size_t m) const { return total[n * n_components + m]; }

    bool component_active(std::size_t m) const {
        return mask[m] != 0 && degenerate[m] == 0;
    }
};

namespace detail {

inline void check_pick_freeze_shapes(const QoiMatrix& f_a, const QoiMatrix& f_b,
                                     const std::vector<QoiMatrix>& f_ab) {
    auto same = [&](const QoiMatrix& q) {
        return q.n_samples == f_a.n_samples && q.n_components == f_a.n_components &&
               q.mask == f_a.mask;
    };
    if (!same(f_b))
        throw std::invalid_argument("mc_sobol: f_B shape/mask does not match f_A");
    for (const auto& q : f_ab)
        if (!same(q))
            throw std::invalid_argument("mc_sobol: an f_AB batch shape/mask does not match f_A");
    if (f_ab.empty()) throw std::invalid_argument("mc_sobol: no column-swapped batches given");
    if (f_a.n_samples < 2) throw std::invalid_argument("mc_sobol: needs at least 2 samples");
}

}  // namespace detail

/// Trace-ratio aggregation over components: G_n = sum_m V_n^(m) / sum_m V^(m)
/// from the raw variance contributions, which makes it the variance-weighted
/// average of the per-component indices and collapses to the scalar Sobol'
/// index at M = 1. Masked and degenerate components do not enter the traces.
inline void aggregate_generalized(SensitivityResult& r) {
    const std::size_t n_params = r.n_params, m_count = r.n_components;
    r.generalized_first.assign(n_params, 0.0);
    r.generalized_total.assign(n_params, 0.0);
    KahanSum trace;
    for (std::size_t m = 0; m < m_count; ++m)
        if (r.component_active(m)) trace.add(r.component_variance[m]);
    const double denom = trace.value();
    if (!(denom > 0.0))
        throw numerical_error("generalized indices: zero total variance across components");
    for (std::size_t n = 0; n < n_params; ++n) {
        KahanSum num_first, num_total;
        for (std::size_t m = 0; m < m_count; ++m) {
            if (!r.component_active(m)) continue;
            num_first.add(r.first_effect[n * m_count + m]);
            num_total.add(r.total_effect[n * m_count + m]);
        }
        r.generalized_first[n] = num_first.value() / denom;
        r.generalized_total[n] = num_total.value() / denom;
    }
}

/// Monte Carlo Sobol' estimation from a pick-and-freeze evaluation triple.
/// Per component m: V is the unbiased sample variance of f_A; the first-order
/// effect uses the Saltelli (2010) estimator mean(f_B .* (f_AB[n] - f_A)) with
/// f_B centered on its sample mean (same expectation, but the estimator noise
/// then scales with the column variance instead of the squared mean, which
/// keeps low-variance map regions from polluting the index), and the total
/// effect the Jansen (1999) estimator mean((f_A - f_AB[n])^2)/2.
inline SensitivityResult mc_sobol(const QoiMatrix& f_a, const QoiMatrix& f_b,
                                  const std::vector<QoiMatrix>& f_ab) {
    detail::check_pick_freeze_shapes(f_a, f_b, f_ab);
    const std::size_t n_params = f_ab.size();
    const std::size_t m_count = f_a.n_components;
    const std::size_t n_s = f_a.n_samples;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    SensitivityResult r;
    r.n_params = n_params;
    r.n_components = m_count;
    r.method = GsaMethod::MonteCarlo;
    r.mask = f_a.mask;
    r.degenerate.assign(m_count, 0);
    r.component_variance.assign(m_count, 0.0);
    r.first.assign(n_params * m_count, nan);
    r.total.assign(n_params * m_count, nan);
    r.first_effect.assign(n_params * m_count, 0.0);
    r.total_effect.assign(n_params * m_count, 0.0);

    for (std::size_t m = 0; m < m_count; ++m) {
        if (!r.mask[m]) continue;
        KahanSum mean_acc;
        for (std::size_t s = 0; s < n_s; ++s) mean_acc.add(f_a(s, m));
        const double mean_a = mean_acc.value() / static_cast<double>(n_s);
        KahanSum var_acc;
        for (std::size_t s = 0; s < n_s; ++s) {
            const double d = f_a(s, m) - mean_a;
            var_acc.add(d * d);
        }
        const double variance = var_acc.value() / static_cast<double>(n_s - 1);
        r.component_variance[m] = variance;
        if (variance < kDegenerateVariance) {
            r.degenerate[m] = 1;
            continue;
        }
        KahanSum mean_b_acc;
        for (std::size_t s = 0; s < n_s; ++s) mean_b_acc.add(f_b(s, m));
        const double mean_b = mean_b_acc.value() / static_cast<double>(n_s);
        for (std::size_t n = 0; n < n_params; ++n) {
            const QoiMatrix& hybrid = f_ab[n];
            KahanSum saltelli, jansen;
            for (std::size_t s = 0; s < n_s; ++s) {
                const double fa = f_a(s, m);
                const double fab = hybrid(s, m);
                saltelli.add((f_b(s, m) - mean_b) * (fab - fa));
                const double d = fa - fab;
                jansen.add(d * d);
            }
            const double v_n = saltelli.value() / static_cast<double>(n_s);
            const double e_n = jansen.value() / (2.0 * static_cast<double>(n_s));
            r.first_effect[n * m_count + m] = v_n;
            r.total_effect[n * m_count + m] = e_n;
            r.first[n * m_count + m] = v_n / variance;
            r.total[n * m_count + m] = e_n / variance;
        }
    }
    return r;
}

/// Generalized (trace-aggregated) indices from the same pick-and-freeze
/// evaluations: G_n = sum_m V_n^(m) / sum_m V^(m), and the analogous total.
inline SensitivityResult mc_generalized(const QoiMatrix& f_a, const QoiMatrix& f_b,
                                        const std::vector<QoiMatrix>& f_ab) {
    SensitivityResult r = mc_sobol(f_a, f_b, f_ab);
    aggregate_generalized(r);
    return r;
}

}  // namespace emuq
