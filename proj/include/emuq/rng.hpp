#pragma once

#include <cstdint>

namespace emuq {

namespace detail {

/// SplitMix64 finalizer: a bijective avalanche mix on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace detail

/// Counter-based random generator. Every draw is a pure function of
/// (seed, stream, index), so sample matrices regenerate bit-identically
/// regardless of evaluation order or thread count, and independent streams
/// are cheap to split off.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(detail::mix64(detail::mix64(seed + detail::kGolden) + detail::kGolden * (stream + 1))) {}

    std::uint64_t bits(std::uint64_t index) const noexcept {
        return detail::mix64(key_ + detail::kGolden * (index + 1));
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01(std::uint64_t index) const noexcept {
        return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t index, std::uint64_t bound) const noexcept {
        return bits(index) % bound;
    }

private:
    std::uint64_t key_;
};

/// Derives a child seed for a named substream (e.g. the A/B halves of a
/// pick-and-freeze design).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    return detail::mix64(detail::mix64(seed) ^ detail::mix64(salt + 0x5851f42d4c957f2dull));
}

}  // namespace emuq
