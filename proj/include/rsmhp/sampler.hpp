#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "rsmhp/model.hpp"

namespace rsmhp {

enum class NoiseSharing {
    /// Every tree node draws its own N children; branches from different
    /// parents are independent.
    FreshPerNode,
    /// All nodes at a depth reuse the same N draws, x_{k+1}^{i,j} = f(x_k^i, u_k, w_k^j).
    SharedPerDepth,
};

struct SamplerConfig
{
    std::size_t branch_factor = 1;            // N
    std::optional<std::size_t> prune_width;   // M
    NoiseSharing noise_sharing = NoiseSharing::FreshPerNode;
    std::uint64_t master_seed = 0;
    /// Branch on the support points of a finite-support noise law instead of
    /// random draws (requires support size == N). Turns the tree into an
    /// exhaustive enumeration of the first H-1 disturbances.
    bool enumerate_support = false;
    /// Upper bound on the number of partial trajectories held at any depth.
    std::size_t tree_cap = 1'000'000;
    unsigned workers = 1;
};

/// N^{H-1}, or nullopt when it exceeds `limit`.
std::optional<std::size_t> tree_size(std::size_t branch_factor, std::size_t horizon, std::size_t limit);

/**
 * Full scenario tree. Transitions 0..H-2 branch N ways; the last transition
 * x_{H-1} -> x_H takes one fresh draw per leaf and records a step weight of 1
 * (it has no siblings to be ranked against). Trajectories come out in
 * lexicographic branch order.
 */
TrajectorySet sample_tree(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config);

/**
 * Scenario tree that keeps only the M partial trajectories of highest
 * likeliness at each depth. Ties are broken by lexicographic branch order.
 * Survivors stay in lexicographic order, so with M >= N^{H-1} the output
 * equals sample_tree().
 */
TrajectorySet sample_tree_pruned(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config);

/// N non-overlapping trajectories, each with H fresh draws.
TrajectorySet sample_independent(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config);

} // namespace rsmhp
