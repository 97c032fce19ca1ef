#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "emuq/errors.hpp"
#include "emuq/parameter_space.hpp"
#include "emuq/rng.hpp"

namespace emuq {

enum class SampleStrategy { PseudoRandom, LatinHypercube };

/// N_s x N matrix of physical-coordinate sample points, row-major.
/// Regeneration with the same (space, n_samples, seed, strategy) is
/// bit-identical.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t rows, std::size_t cols, ParameterSpace space, std::uint64_t seed,
                 SampleStrategy strategy)
        : rows_(rows), cols_(cols), values_(rows * cols), space_(std::move(space)), seed_(seed),
          strategy_(strategy) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::uint64_t seed() const noexcept { return seed_; }
    SampleStrategy strategy() const noexcept { return strategy_; }
    const ParameterSpace& space() const noexcept { return space_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    std::vector<double> column(std::size_t j) const {
        std::vector<double> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    const std::vector<double>& data() const noexcept { return values_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> values_;
    ParameterSpace space_;
    std::uint64_t seed_ = 0;
    SampleStrategy strategy_ = SampleStrategy::PseudoRandom;
};

namespace detail {

// Column j of a plain design draws from stream j; LHS uses stream N + j for
// the stratum shuffle so jitter and shuffle never collide.
inline void fill_pseudo_random(SampleMatrix& m) {
    const auto& sp = m.space();
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const CounterRng rng(m.seed(), j);
        const auto& p = sp.param(j);
        for (std::size_t i = 0; i < m.rows(); ++i)
            m(i, j) = p.lower + rng.uniform01(i) * p.width();
    }
}

inline void fill_latin_hypercube(SampleMatrix& m) {
    const auto& sp = m.space();
    const std::size_t n = m.rows();
    std::vector<std::uint32_t> perm(n);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const CounterRng jitter(m.seed(), j);
        const CounterRng shuffle(m.seed(), sp.size() + j);
        std::iota(perm.begin(), perm.end(), 0u);
        // Fisher-Yates keyed on the shuffle stream
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t k = shuffle.below(i, i);
            std::swap(perm[i - 1], perm[k]);
        }
        const auto& p = sp.param(j);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[i]) + jitter.uniform01(i)) /
                             static_cast<double>(n);
            m(i, j) = p.lower + u * p.width();
        }
    }
}

}  // namespace detail

/// Draws n_samples i.i.d.-uniform points (or an LHS-stratified design) from
/// the space. Pure in its arguments; safe to call concurrently.
inline SampleMatrix sample(const ParameterSpace& space, std::size_t n_samples, std::uint64_t seed,
                           SampleStrategy strategy = SampleStrategy::PseudoRandom) {
    space.validate();
    if (n_samples < 1) throw config_error("sample: n_samples must be >= 1");
    SampleMatrix m(n_samples, space.size(), space, seed, strategy);
    if (strategy == SampleStrategy::LatinHypercube)
        detail::fill_latin_hypercube(m);
    else
        detail::fill_pseudo_random(m);
    return m;
}

/// Saltelli/Jansen pick-and-freeze design: independent base matrices A and B
/// plus the N column-swapped hybrids AB[n] (= A with column n taken from B).
/// Total rows: (N + 2) * N_s.
struct PickFreezeDesign {
    SampleMatrix a;
    SampleMatrix b;
    std::vector<SampleMatrix> ab;

    std::size_t total_rows() const noexcept {
        return a.rows() * (2 + ab.size());
    }
};

inline PickFreezeDesign pick_freeze(const ParameterSpace& space, std::size_t n_samples,
                                    std::uint64_t seed) {
    if (n_samples < 2) throw config_error("pick_freeze: n_samples must be >= 2");
    PickFreezeDesign d;
    d.a = sample(space, n_samples, derive_seed(seed, 0xA));
    d.b = sample(space, n_samples, derive_seed(seed, 0xB));
    d.ab.reserve(space.size());
    for (std::size_t n = 0; n < space.size(); ++n) {
        SampleMatrix hybrid = d.a;
        for (std::size_t i = 0; i < n_samples; ++i) hybrid(i, n) = d.b(i, n);
        d.ab.push_back(std::move(hybrid));
    }
    return d;
}

}  // namespace emuq
