#pragma once

#include <cstdint>
#include <random>

namespace coopgov {

namespace detail {

// SplitMix64 finalizer. Mixes all input bits into the output.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Derives a child seed from a parent seed and an integer tag. Chaining
/// calls builds a stable seed tree: round seeds from the master seed,
/// per-agent decision streams from round seeds, and so on. Replay only
/// depends on the (seed, tag...) path, never on call order.
constexpr std::uint64_t seed_chain(std::uint64_t parent, std::uint64_t tag) noexcept {
    return detail::mix64(parent + 0x9e3779b97f4a7c15ull * (2 * tag + 1));
}

constexpr std::uint64_t seed_chain(std::uint64_t parent, std::uint64_t tag1,
                                   std::uint64_t tag2) noexcept {
    return seed_chain(seed_chain(parent, tag1), tag2);
}

constexpr std::uint64_t seed_chain(std::uint64_t parent, std::uint64_t tag1,
                                   std::uint64_t tag2, std::uint64_t tag3) noexcept {
    return seed_chain(seed_chain(parent, tag1, tag2), tag3);
}

// Tags naming the purpose of each derived stream.
inline constexpr std::uint64_t kSeedTagGraph = 0x11;
inline constexpr std::uint64_t kSeedTagRound = 0x22;
inline constexpr std::uint64_t kSeedTagDecision = 0x33;
inline constexpr std::uint64_t kSeedTagTier = 0x44;
inline constexpr std::uint64_t kSeedTagInit = 0x55;
inline constexpr std::uint64_t kSeedTagMicroval = 0x66;

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// the standard pins down exactly) and converts to doubles with a fixed
/// 53-bit recipe instead of std::uniform_real_distribution, which is
/// implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// True with probability p. Never true for p <= 0, always true for p >= 1.
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace coopgov
