#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/numeric.hpp"
#include "emuq/parameter_space.hpp"
#include "emuq/qoi.hpp"
#include "emuq/sampling.hpp"
#include "emuq/sobol_mc.hpp"

namespace emuq {

/// Total-degree multi-index set {alpha : |alpha| <= P} in graded
/// lexicographic order (by total degree, then leading exponents first).
/// Cardinality K = (N+P)! / (N! P!).
class MultiIndexSet {
public:
    MultiIndexSet() = default;
    MultiIndexSet(std::size_t n_params, unsigned degree, std::vector<unsigned> flat)
        : n_params_(n_params), degree_(degree), flat_(std::move(flat)) {}

    std::size_t n_params() const noexcept { return n_params_; }
    unsigned degree() const noexcept { return degree_; }
    std::size_t size() const noexcept { return n_params_ ? flat_.size() / n_params_ : 0; }

    std::span<const unsigned> at(std::size_t k) const {
        return {flat_.data() + k * n_params_, n_params_};
    }
    const std::vector<unsigned>& flat() const noexcept { return flat_; }

    unsigned order_sum(std::size_t k) const {
        unsigned s = 0;
        for (unsigned e : at(k)) s += e;
        return s;
    }

private:
    std::size_t n_params_ = 0;
    unsigned degree_ = 0;
    std::vector<unsigned> flat_;  // size() * n_params_, row-major
};

inline std::uint64_t total_degree_cardinality(std::size_t n_params, unsigned degree) {
    // K = C(N + P, P), computed without factorial overflow
    std::uint64_t k = 1;
    for (unsigned i = 1; i <= degree; ++i) {
        k = k * (n_params + i) / i;  // exact at every step: C(n+i, i) is integral
    }
    return k;
}

inline MultiIndexSet total_degree_multi_indices(std::size_t n_params, unsigned degree) {
    if (n_params < 1) throw config_error("multi-index set: n_params must be >= 1");
    std::vector<unsigned> flat;
    flat.reserve(total_degree_cardinality(n_params, degree) * n_params);
    std::vector<unsigned> alpha(n_params, 0);
    for (unsigned d = 0; d <= degree; ++d) {
        // compositions of d into n_params parts, leading exponents first
        std::fill(alpha.begin(), alpha.end(), 0u);
        alpha[0] = d;
        while (true) {
            flat.insert(flat.end(), alpha.begin(), alpha.end());
            if (alpha.back() == d) break;
            // classic next-composition step
            std::size_t i = n_params - 2;
            while (alpha[i] == 0) --i;
            --alpha[i];
            unsigned rest = alpha.back() + 1;
            alpha.back() = 0;
            alpha[i + 1] = rest;
            // moving the remainder just after position i keeps graded-lex order
        }
    }
    return MultiIndexSet(n_params, degree, std::move(flat));
}

/// Legendre polynomial P_k(z) by the three-term recurrence.
inline double legendre(unsigned k, double z) {
    if (k == 0) return 1.0;
    if (k == 1) return z;
    double p_prev = 1.0, p = z;
    for (unsigned j = 2; j <= k; ++j) {
        const double p_next = ((2.0 * j - 1.0) * z * p - (j - 1.0) * p_prev) / j;
        p_prev = p;
        p = p_next;
    }
    return p;
}

/// Orthonormal 1-D basis under the uniform measure on [-1, 1]:
/// psi_k(z) = sqrt(2k+1) P_k(z), so E[psi_j psi_k] = delta_jk.
inline double legendre_orthonormal(unsigned k, double z) {
    return std::sqrt(2.0 * k + 1.0) * legendre(k, z);
}

/// Tensorized orthonormal basis function evaluated at a standardized point.
inline double basis_eval(std::span<const unsigned> multi_index, std::span<const double> z) {
    if (multi_index.size() != z.size())
        throw std::invalid_argument("basis_eval: index/point dimension mismatch");
    double v = 1.0;
    for (std::size_t n = 0; n < z.size(); ++n) {
        if (z[n] < -1.0 || z[n] > 1.0)
            throw std::domain_error("basis_eval: point outside [-1, 1]^N");
        if (multi_index[n] > 0) v *= legendre_orthonormal(multi_index[n], z[n]);
    }
    return v;
}

struct PceDiagnostics {
    std::vector<double> residual_norm;  // per output component
    double condition_estimate = 0.0;
    double oversampling = 0.0;  // achieved N_s / K
    std::size_t n_samples = 0;
    bool ill_conditioned = false;
};

/// Least-squares polynomial chaos surrogate of a multivariate output:
/// coefficients are per-component, on the orthonormal-basis scale.
struct PceModel {
    MultiIndexSet multi_indices;
    std::size_t n_components = 0;
    std::vector<double> coefficients;  // K x M, row-major (term-major)
    ParameterSpace space;
    std::vector<std::uint8_t> mask;  // per component; masked -> zero coefficients
    PceDiagnostics diagnostics;

    double coeff(std::size_t k, std::size_t m) const {
        return coefficients[k * n_components + m];
    }
};

/// Design matrix of the regression: Phi[i][k] = Psi_k(z_i).
inline Eigen::MatrixXd pce_design_matrix(const MultiIndexSet& mis, const ParameterSpace& space,
                                         const SampleMatrix& samples) {
    const std::size_t n_s = samples.rows();
    const std::size_t terms = mis.size();
    Eigen::MatrixXd phi(n_s, terms);
    for (std::size_t i = 0; i < n_s; ++i) {
        const auto z = space.standardize(samples.row(i));
        for (std::size_t k = 0; k < terms; ++k) phi(i, k) = basis_eval(mis.at(k), z);
    }
    return phi;
}

/// Fits the expansion by least squares over one shared rank-revealing QR
/// factorization, reused for all M component right-hand sides. Masked
/// components get zero coefficients. Throws when the problem is
/// underdetermined (N_s < K); a condition estimate above 1e12 sets the
/// ill-conditioning flag in the diagnostics.
inline PceModel fit_pce(const ParameterSpace& space, const SampleMatrix& samples,
                        const QoiMatrix& evals, unsigned degree, double oversampling) {
    if (samples.cols() != space.size())
        throw config_error("fit_pce: sample matrix does not match the parameter space");
    if (samples.rows() != evals.n_samples)
        throw std::invalid_argument("fit_pce: samples and evaluations disagree on N_s");
    if (oversampling < 1.0) throw config_error("method.oversampling: must be >= 1");

    const MultiIndexSet mis = total_degree_multi_indices(space.size(), degree);
    const std::size_t terms = mis.size();
    const std::size_t n_s = samples.rows();
    if (n_s < terms)
        throw config_error("fit_pce: underdetermined regression, N_s = " + std::to_string(n_s) +
                           " < K = " + std::to_string(terms));

    const Eigen::MatrixXd phi = pce_design_matrix(mis, space, samples);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);

    PceModel model;
    model.multi_indices = mis;
    model.n_components = evals.n_components;
    model.space = space;
    model.mask = evals.mask;
    model.coefficients.assign(terms * evals.n_components, 0.0);
    model.diagnostics.residual_norm.assign(evals.n_components, 0.0);
    model.diagnostics.n_samples = n_s;
    model.diagnostics.oversampling = static_cast<double>(n_s) / static_cast<double>(terms);

    const auto& r_diag = qr.matrixR().diagonal();
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(r_diag.size(), terms); ++i) {
        const double v = std::abs(r_diag(i));
        rmax = std::max(rmax, v);
        rmin = std::min(rmin, v);
    }
    model.diagnostics.condition_estimate = rmin > 0.0 ? rmax / rmin
                                                      : std::numeric_limits<double>::infinity();
    model.diagnostics.ill_conditioned = model.diagnostics.condition_estimate > 1e12;

    Eigen::VectorXd y(n_s);
    for (std::size_t m = 0; m < evals.n_components; ++m) {
        if (!evals.mask[m]) continue;
        for (std::size_t s = 0; s < n_s; ++s) y(s) = evals(s, m);
        const Eigen::VectorXd c = qr.solve(y);
        for (std::size_t k = 0; k < terms; ++k) model.coefficients[k * evals.n_components + m] = c(k);
        model.diagnostics.residual_norm[m] = (phi * c - y).norm();
    }
    return model;
}

/// Moments read off the coefficients: mean is the constant-term coefficient,
/// variance the sum of squares of the remaining ones.
inline MomentField pce_moments(const PceModel& model) {
    MomentField f;
    const std::size_t m_count = model.n_components;
    f.mean.assign(m_count, 0.0);
    f.std_dev.assign(m_count, 0.0);
    f.mask = model.mask;
    for (std::size_t m = 0; m < m_count; ++m) {
        f.mean[m] = model.coeff(0, m);
        KahanSum var;
        for (std::size_t k = 1; k < model.multi_indices.size(); ++k) {
            const double c = model.coeff(k, m);
            var.add(c * c);
        }
        f.std_dev[m] = std::sqrt(var.value());
    }
    return f;
}

/// Surrogate evaluation at a physical point (mainly for validation).
inline std::vector<double> pce_eval(const PceModel& model, std::span<const double> point) {
    const auto z = model.space.standardize(point);
    std::vector<double> out(model.n_components, 0.0);
    for (std::size_t k = 0; k < model.multi_indices.size(); ++k) {
        const double psi = basis_eval(model.multi_indices.at(k), z);
        for (std::size_t m = 0; m < model.n_components; ++m)
            out[m] += model.coeff(k, m) * psi;
    }
    return out;
}

/// Sobol' indices by coefficient partition: V_n sums the squared coefficients
/// of terms in X_n alone, V_Tn of all terms involving X_n. The [0,1] bounds
/// and S_n <= S_Tn hold by construction.
inline SensitivityResult pce_sobol(const PceModel& model) {
    const std::size_t n_params = model.space.size();
    const std::size_t m_count = model.n_components;
    const std::size_t terms = model.multi_indices.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    SensitivityResult r;
    r.n_params = n_params;
    r.n_components = m_count;
    r.method = GsaMethod::Pce;
    r.mask = model.mask;
    r.degenerate.assign(m_count, 0);
    r.component_variance.assign(m_count, 0.0);
    r.first.assign(n_params * m_count, nan);
    r.total.assign(n_params * m_count, nan);
    r.first_effect.assign(n_params * m_count, 0.0);
    r.total_effect.assign(n_params * m_count, 0.0);
    r.param_names.reserve(n_params);
    for (std::size_t n = 0; n < n_params; ++n) r.param_names.push_back(model.space.param(n).name);

    // classify terms once: sole-variable terms and involvement bitmask rows
    std::vector<int> sole(terms, -1);  // n when alpha has only alpha_n > 0
    std::vector<std::vector<std::uint8_t>> involves(terms,
                                                    std::vector<std::uint8_t>(n_params, 0));
    for (std::size_t k = 1; k < terms; ++k) {
        const auto alpha = model.multi_indices.at(k);
        int only = -1;
        int count = 0;
        for (std::size_t n = 0; n < n_params; ++n) {
            if (alpha[n] > 0) {
                involves[k][n] = 1;
                only = static_cast<int>(n);
                ++count;
            }
        }
        sole[k] = count == 1 ? only : -1;
    }

    for (std::size_t m = 0; m < m_count; ++m) {
        if (!r.mask[m]) continue;
        KahanSum var;
        for (std::size_t k = 1; k < terms; ++k) {
            const double c = model.coeff(k, m);
            var.add(c * c);
        }
        const double variance = var.value();
        r.component_variance[m] = variance;
        if (variance < kDegenerateVariance) {
            r.degenerate[m] = 1;
            continue;
        }
        for (std::size_t n = 0; n < n_params; ++n) {
            KahanSum v_n, v_tn;
            for (std::size_t k = 1; k < terms; ++k) {
                if (!involves[k][n]) continue;
                const double c2 = model.coeff(k, m) * model.coeff(k, m);
                v_tn.add(c2);
                if (sole[k] == static_cast<int>(n)) v_n.add(c2);
            }
            r.first_effect[n * m_count + m] = v_n.value();
            r.total_effect[n * m_count + m] = v_tn.value();
            r.first[n * m_count + m] = v_n.value() / variance;
            r.total[n * m_count + m] = v_tn.value() / variance;
        }
    }
    return r;
}

/// Generalized indices from the PCE coefficient partition.
inline SensitivityResult pce_generalized(const PceModel& model) {
    SensitivityResult r = pce_sobol(model);
    aggregate_generalized(r);
    return r;
}

}  // namespace emuq
