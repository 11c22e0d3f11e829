#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>

namespace rsmhp {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Key of the child stream `tag` below `parent`.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept;

/// Key reached by walking `path` below `root`. The path length is mixed in,
/// so {} / {0} / {0, 0} give distinct keys.
std::uint64_t derive_key(std::uint64_t root, std::span<const std::uint64_t> path) noexcept;
std::uint64_t derive_key(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept;

/**
 * Counter-based random stream.
 *
 * The n-th output is a pure function of (key, n), so a stream can be
 * re-created anywhere from its key. Streams for tree nodes, trajectories and
 * replications are derived from a master seed with derive_key() rather than
 * passed around, which makes every result independent of evaluation order.
 *
 * Satisfies UniformRandomBitGenerator. The normal() sampler is implemented
 * here instead of using std::normal_distribution, whose output is not
 * specified by the standard.
 */
class RandomStream
{
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        ++counter_;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    /// Standard normal (Box-Muller, one output per call).
    double normal() noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }

    RandomStream child(std::uint64_t tag) const noexcept { return RandomStream(derive_key(key_, tag)); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Top-level stream namespaces. Keeping them distinct guarantees that, for
/// example, tree node draws never coincide with independent-path draws.
enum class StreamDomain : std::uint64_t {
    TreeNode = 0x7452'4545'0001ULL,
    TreeDepth = 0x7452'4545'0002ULL,
    TreeLeaf = 0x7452'4545'0003ULL,
    Independent = 0x7452'4545'0004ULL,
    Replication = 0x7452'4545'0005ULL,
    Scenario = 0x7452'4545'0006ULL,
    Episode = 0x7452'4545'0007ULL,
    Planner = 0x7452'4545'0008ULL,
};

inline std::uint64_t domain_key(std::uint64_t seed, StreamDomain domain) noexcept
{
    return derive_key(seed, static_cast<std::uint64_t>(domain));
}

} // namespace rsmhp
