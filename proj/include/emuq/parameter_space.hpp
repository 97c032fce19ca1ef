#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "emuq/errors.hpp"

namespace emuq {

/// One independent uniform random input X_n on [lower, upper].
/// Uniform is the only marginal family in scope; the tag keeps other
/// families an explicit extension point rather than a silent assumption.
enum class Marginal { Uniform };

struct RandomParameter {
    std::string name;
    double nominal = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    Marginal marginal = Marginal::Uniform;

    /// Bounds as nominal * (1 -+ rel_halfwidth), e.g. +-5% -> rel_halfwidth = 0.05.
    static RandomParameter relative(std::string name, double nominal, double rel_halfwidth) {
        const double lo = nominal * (1.0 - rel_halfwidth);
        const double hi = nominal * (1.0 + rel_halfwidth);
        return RandomParameter{std::move(name), nominal, std::min(lo, hi), std::max(lo, hi)};
    }

    double width() const noexcept { return upper - lower; }
    double midpoint() const noexcept { return 0.5 * (lower + upper); }
};

/// Ordered vector of independent uniform inputs; the joint density is the
/// product of the marginals.
class ParameterSpace {
public:
    ParameterSpace() = default;

    explicit ParameterSpace(std::vector<RandomParameter> params) : params_(std::move(params)) {
        validate();
    }

    std::size_t size() const noexcept { return params_.size(); }
    const RandomParameter& param(std::size_t n) const { return params_.at(n); }
    const std::vector<RandomParameter>& params() const noexcept { return params_; }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t n = 0; n < params_.size(); ++n)
            if (params_[n].name == name) return n;
        throw config_error("parameter space: unknown parameter name '" + name + "'");
    }

    bool contains(const std::string& name) const noexcept {
        for (const auto& p : params_)
            if (p.name == name) return true;
        return false;
    }

    /// Sub-space of the named parameters, in this space's order.
    ParameterSpace subspace(const std::vector<std::size_t>& keep) const {
        std::vector<RandomParameter> sub;
        sub.reserve(keep.size());
        for (std::size_t n : keep) sub.push_back(param(n));
        return ParameterSpace(std::move(sub));
    }

    /// Affine map of a physical point to the standardized cube [-1, 1]^N.
    std::vector<double> standardize(std::span<const double> point) const {
        check_dim(point.size());
        std::vector<double> z(params_.size());
        for (std::size_t n = 0; n < params_.size(); ++n) {
            const auto& p = params_[n];
            if (point[n] < p.lower || point[n] > p.upper)
                throw std::domain_error("standardize: component '" + p.name +
                                        "' is outside [lower, upper]");
            z[n] = (2.0 * point[n] - p.lower - p.upper) / p.width();
        }
        return z;
    }

    /// Inverse of standardize.
    std::vector<double> destandardize(std::span<const double> z) const {
        check_dim(z.size());
        std::vector<double> x(params_.size());
        for (std::size_t n = 0; n < params_.size(); ++n) {
            const auto& p = params_[n];
            if (z[n] < -1.0 || z[n] > 1.0)
                throw std::domain_error("destandardize: component '" + p.name +
                                        "' is outside [-1, 1]");
            x[n] = 0.5 * (z[n] * p.width() + p.lower + p.upper);
        }
        return x;
    }

    std::vector<double> nominal_point() const {
        std::vector<double> x(params_.size());
        for (std::size_t n = 0; n < params_.size(); ++n) x[n] = params_[n].nominal;
        return x;
    }

    void validate() const {
        if (params_.empty())
            throw config_error("parameter space: needs at least one parameter");
        std::unordered_set<std::string> seen;
        for (const auto& p : params_) {
            if (p.name.empty()) throw config_error("parameter space: empty parameter name");
            if (!seen.insert(p.name).second)
                throw config_error("parameter space: duplicate parameter name '" + p.name + "'");
            if (!(p.lower < p.upper))
                throw config_error("parameter '" + p.name + "': requires lower < upper");
            if (p.nominal < p.lower || p.nominal > p.upper)
                throw config_error("parameter '" + p.name + "': nominal outside [lower, upper]");
        }
    }

private:
    void check_dim(std::size_t got) const {
        if (got != params_.size())
            throw std::invalid_argument("point dimension " + std::to_string(got) +
                                        " does not match space dimension " +
                                        std::to_string(params_.size()));
    }

    std::vector<RandomParameter> params_;
};

}  // namespace emuq
