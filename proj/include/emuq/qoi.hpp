#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/numeric.hpp"
#include "emuq/operating_set.hpp"
#include "emuq/parallel.hpp"
#include "emuq/parameter_space.hpp"
#include "emuq/pmsm_ecm.hpp"
#include "emuq/sampling.hpp"

namespace emuq {

/// Model-evaluation accounting, by pipeline phase. The Monte Carlo GSA count
/// comes to (N+2)*N_s*N_op and the PCE count to N_s*N_op.
class CostReport {
public:
    enum class Phase { Sampling, PickFreeze, PceFit };

    void add(Phase phase, std::uint64_t evals) noexcept {
        switch (phase) {
            case Phase::Sampling: sampling_ += evals; break;
            case Phase::PickFreeze: pick_freeze_ += evals; break;
            case Phase::PceFit: pce_fit_ += evals; break;
        }
    }
    std::uint64_t sampling() const noexcept { return sampling_; }
    std::uint64_t pick_freeze() const noexcept { return pick_freeze_; }
    std::uint64_t pce_fit() const noexcept { return pce_fit_; }
    std::uint64_t total() const noexcept { return sampling_ + pick_freeze_ + pce_fit_; }

private:
    std::uint64_t sampling_ = 0;
    std::uint64_t pick_freeze_ = 0;
    std::uint64_t pce_fit_ = 0;
};

/// N_s x M efficiency samples over an operating set. A column is masked out
/// (mask=false) when any sample makes it infeasible or pushes its efficiency
/// out of (0, 1], which keeps the matrix rectangular and the output
/// covariance well-defined.
struct QoiMatrix {
    std::size_t n_samples = 0;
    std::size_t n_components = 0;
    std::vector<double> values;  // row-major, n_samples x n_components
    std::vector<std::uint8_t> mask;
    OperatingSet opset;

    double operator()(std::size_t s, std::size_t m) const {
        return values[s * n_components + m];
    }
    double& operator()(std::size_t s, std::size_t m) { return values[s * n_components + m]; }

    std::vector<double> column(std::size_t m) const {
        std::vector<double> c(n_samples);
        for (std::size_t s = 0; s < n_samples; ++s) c[s] = (*this)(s, m);
        return c;
    }

    std::size_t unmasked_count() const noexcept {
        std::size_t k = 0;
        for (auto b : mask) k += b ? 1 : 0;
        return k;
    }
};

/// Columnwise sample mean and unbiased standard deviation.
struct MomentField {
    std::vector<double> mean;
    std::vector<double> std_dev;
    std::vector<std::uint8_t> mask;
};

namespace detail {

/// Name-to-field binding for the uncertain circuit parameters.
inline double EcmParameters::* ecm_field(const std::string& name) {
    static const std::map<std::string, double EcmParameters::*> bindings = {
        {"R_s", &EcmParameters::r_s},
        {"lambda", &EcmParameters::lambda},
        {"L_d", &EcmParameters::l_d},
        {"L_q", &EcmParameters::l_q},
    };
    const auto it = bindings.find(name);
    if (it == bindings.end())
        throw config_error("space: parameter '" + name +
                           "' does not name an uncertain model field (expected one of R_s, "
                           "lambda, L_d, L_q)");
    return it->second;
}

}  // namespace detail

/// Applies one sample row to the base parameters.
inline EcmParameters apply_sample(const EcmParameters& base, const ParameterSpace& space,
                                  std::span<const double> row) {
    EcmParameters ecm = base;
    for (std::size_t n = 0; n < space.size(); ++n)
        ecm.*detail::ecm_field(space.param(n).name) = row[n];
    return ecm;
}

/// Evaluates the efficiency QoI for every (sample, operating point) pair.
/// Parallelized over disjoint slots; the result is independent of the worker
/// count. Adds N_s * N_op model evaluations to the cost report.
inline QoiMatrix evaluate_qoi(const EcmParameters& ecm_base, const ParameterSpace& space,
                              const SampleMatrix& samples, const OperatingSet& opset,
                              CostReport& cost, CostReport::Phase phase,
                              unsigned workers = 0) {
    if (samples.cols() != space.size())
        throw config_error("evaluate_qoi: sample matrix does not match the parameter space");
    for (std::size_t n = 0; n < space.size(); ++n)
        detail::ecm_field(space.param(n).name);  // validate the binding up front
    if (opset.points.empty()) throw config_error("evaluate_qoi: empty operating set");

    QoiMatrix q;
    q.n_samples = samples.rows();
    q.n_components = opset.size();
    q.values.assign(q.n_samples * q.n_components, 0.0);
    q.mask.assign(q.n_components, 1);
    q.opset = opset;

    std::vector<std::uint8_t> ok(q.n_samples * q.n_components, 1);
    parallel_for(q.n_samples, workers, [&](std::size_t s) {
        const EcmParameters ecm = apply_sample(ecm_base, space, samples.row(s));
        for (std::size_t m = 0; m < q.n_components; ++m) {
            const OperatingSolution sol = solve_operating_point(ecm, opset.points[m]);
            const std::size_t slot = s * q.n_components + m;
            if (!sol.feasible || !(sol.efficiency > 0.0) || sol.efficiency > 1.0) {
                ok[slot] = 0;
                q.values[slot] = sol.feasible ? sol.efficiency : 0.0;
            } else {
                q.values[slot] = sol.efficiency;
            }
        }
    });
    for (std::size_t m = 0; m < q.n_components; ++m)
        for (std::size_t s = 0; s < q.n_samples; ++s)
            if (!ok[s * q.n_components + m]) {
                q.mask[m] = 0;
                break;
            }

    cost.add(phase, static_cast<std::uint64_t>(q.n_samples) * q.n_components);
    return q;
}

/// Columnwise sample mean and unbiased (N_s - 1) standard deviation.
inline MomentField moments(const QoiMatrix& q) {
    if (q.n_samples < 2)
        throw std::invalid_argument("moments: needs at least 2 samples for the std estimate");
    MomentField f;
    f.mean.assign(q.n_components, 0.0);
    f.std_dev.assign(q.n_components, 0.0);
    f.mask = q.mask;
    for (std::size_t m = 0; m < q.n_components; ++m) {
        // constant columns (idle or pinned runs) get exact moments
        bool constant = true;
        for (std::size_t s = 1; s < q.n_samples && constant; ++s)
            constant = q(s, m) == q(0, m);
        if (constant) {
            f.mean[m] = q(0, m);
            f.std_dev[m] = 0.0;
            continue;
        }
        KahanSum acc;
        for (std::size_t s = 0; s < q.n_samples; ++s) acc.add(q(s, m));
        const double mean = acc.value() / static_cast<double>(q.n_samples);
        KahanSum sq;
        for (std::size_t s = 0; s < q.n_samples; ++s) {
            const double d = q(s, m) - mean;
            sq.add(d * d);
        }
        f.mean[m] = mean;
        f.std_dev[m] = std::sqrt(sq.value() / static_cast<double>(q.n_samples - 1));
    }
    return f;
}

/// Intersects the masks of several QoI matrices (pick-and-freeze batches must
/// share one mask before estimation).
inline void unify_masks(std::vector<QoiMatrix*> mats) {
    if (mats.empty()) return;
    const std::size_t m_count = mats.front()->n_components;
    std::vector<std::uint8_t> common(m_count, 1);
    for (const QoiMatrix* q : mats)
        for (std::size_t m = 0; m < m_count; ++m)
            if (!q->mask[m]) common[m] = 0;
    for (QoiMatrix* q : mats) q->mask = common;
}

}  // namespace emuq
