#include "rsmhp/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rsmhp/errors.hpp"
#include "rsmhp/parallel.hpp"

namespace rsmhp {

namespace {

std::uint64_t branch_key(std::uint64_t root, const std::vector<std::uint32_t>& branch)
{
    std::vector<std::uint64_t> path(branch.begin(), branch.end());
    return derive_key(root, path);
}

void validate(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config)
{
    model.validate();
    check_controls(model, controls);
    if (config.branch_factor < 1)
        throw ConfigError("branch_factor", "must be at least 1");
    if (config.prune_width && *config.prune_width < 1)
        throw ConfigError("prune_width", "must be at least 1");
    if (config.enumerate_support && model.noise.support().size() != config.branch_factor)
        throw ConfigError("enumerate_support",
                          "requires a finite-support noise law with exactly branch_factor points (have " +
                              std::to_string(model.noise.support().size()) + ")");
}

// Keeps the `width` entries of highest likeliness; ties go to the
// lexicographically smaller branch, which is the smaller index because
// partials are generated in lexicographic order. Survivors keep their order.
std::vector<Trajectory> prune(std::vector<Trajectory> partials, std::size_t width)
{
    if (partials.size() <= width)
        return partials;
    std::vector<std::size_t> order(partials.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (partials[a].raw_likeliness != partials[b].raw_likeliness)
            return partials[a].raw_likeliness > partials[b].raw_likeliness;
        return a < b;
    });
    order.resize(width);
    std::sort(order.begin(), order.end());
    std::vector<Trajectory> kept;
    kept.reserve(width);
    for (std::size_t i : order)
        kept.push_back(std::move(partials[i]));
    return kept;
}

TrajectorySet grow_tree(const StochasticModel& model,
                        const ControlSequence& controls,
                        const SamplerConfig& config,
                        std::optional<std::size_t> prune_width)
{
    const std::size_t horizon = model.horizon;
    const std::size_t n = config.branch_factor;
    const std::uint64_t node_root = domain_key(config.master_seed, StreamDomain::TreeNode);
    const std::uint64_t depth_root = domain_key(config.master_seed, StreamDomain::TreeDepth);
    const std::uint64_t leaf_root = domain_key(config.master_seed, StreamDomain::TreeLeaf);

    Trajectory root;
    root.states.reserve(horizon + 1);
    root.states.push_back(model.initial_state);
    std::vector<Trajectory> frontier{root};

    for (std::size_t k = 0; k + 1 < horizon; ++k) {
        std::vector<NoiseDraw> shared;
        if (config.enumerate_support) {
            shared.assign(model.noise.support().begin(), model.noise.support().end());
        } else if (config.noise_sharing == NoiseSharing::SharedPerDepth) {
            RandomStream rng(derive_key(depth_root, {k}));
            for (std::size_t j = 0; j < n; ++j)
                shared.push_back(model.noise.sample(rng));
        }

        std::vector<Trajectory> children(frontier.size() * n);
        parallel_for(frontier.size(), config.workers, [&](std::size_t p) {
            const Trajectory& parent = frontier[p];
            std::vector<NoiseDraw> fresh;
            if (shared.empty()) {
                RandomStream rng(branch_key(node_root, parent.branch));
                for (std::size_t j = 0; j < n; ++j)
                    fresh.push_back(model.noise.sample(rng));
            }
            const std::vector<NoiseDraw>& draws = shared.empty() ? fresh : shared;
            for (std::size_t j = 0; j < n; ++j) {
                Trajectory child = parent;
                child.states.push_back(model.transition(parent.states.back(), controls[k], draws[j].value));
                child.step_weights.push_back(draws[j].weight);
                child.raw_likeliness *= draws[j].weight;
                child.branch.push_back(static_cast<std::uint32_t>(j));
                children[p * n + j] = std::move(child);
            }
        });
        frontier = prune_width ? prune(std::move(children), *prune_width) : std::move(children);
    }

    parallel_for(frontier.size(), config.workers, [&](std::size_t i) {
        Trajectory& leaf = frontier[i];
        RandomStream rng(branch_key(leaf_root, leaf.branch));
        const NoiseDraw draw = model.noise.sample(rng);
        leaf.states.push_back(model.transition(leaf.states.back(), controls[horizon - 1], draw.value));
        leaf.step_weights.push_back(1.0);
        for (std::size_t s = 0; s < leaf.states.size(); ++s)
            if (leaf.states[s].size() != model.state_dim)
                throw DimensionError("states", s, static_cast<std::size_t>(model.state_dim),
                                     static_cast<std::size_t>(leaf.states[s].size()));
        leaf.cost = trajectory_cost(model, leaf.states, controls);
    });

    TrajectorySet set;
    set.trajectories = std::move(frontier);
    set.scheme = prune_width ? SamplingScheme::TreePruned : SamplingScheme::Tree;
    return set;
}

} // namespace

std::optional<std::size_t> tree_size(std::size_t branch_factor, std::size_t horizon, std::size_t limit)
{
    std::size_t count = 1;
    for (std::size_t k = 0; k + 1 < horizon; ++k) {
        if (branch_factor != 0 && count > limit / branch_factor)
            return std::nullopt;
        count *= branch_factor;
    }
    if (count > limit)
        return std::nullopt;
    return count;
}

TrajectorySet sample_tree(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config)
{
    validate(model, controls, config);
    if (config.prune_width)
        throw ConfigError("prune_width", "sample_tree does not prune; use sample_tree_pruned");
    if (!tree_size(config.branch_factor, model.horizon, config.tree_cap))
        throw CapacityError("scenario tree with N=" + std::to_string(config.branch_factor) +
                            ", H=" + std::to_string(model.horizon) + " exceeds the cap of " +
                            std::to_string(config.tree_cap) +
                            " trajectories; use sample_tree_pruned or sample_independent");
    return grow_tree(model, controls, config, std::nullopt);
}

TrajectorySet sample_tree_pruned(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config)
{
    validate(model, controls, config);
    if (!config.prune_width)
        throw ConfigError("prune_width", "sample_tree_pruned requires a prune width M");
    const std::size_t width = *config.prune_width;
    // Largest frontier ever held: min(N^{H-1}, M * N).
    const auto full = tree_size(config.branch_factor, model.horizon, config.tree_cap);
    const bool fits = full.has_value() ||
                      (width <= config.tree_cap / config.branch_factor && width * config.branch_factor <= config.tree_cap);
    if (!fits)
        throw CapacityError("pruned tree working set M*N exceeds the cap of " + std::to_string(config.tree_cap) +
                            " trajectories; reduce M or use sample_independent");
    return grow_tree(model, controls, config, width);
}

TrajectorySet sample_independent(const StochasticModel& model, const ControlSequence& controls, const SamplerConfig& config)
{
    validate(model, controls, config);
    const std::uint64_t root = domain_key(config.master_seed, StreamDomain::Independent);
    TrajectorySet set;
    set.scheme = SamplingScheme::Independent;
    set.trajectories.resize(config.branch_factor);
    parallel_for(config.branch_factor, config.workers, [&](std::size_t i) {
        RandomStream rng(derive_key(root, {i}));
        std::vector<NoiseDraw> draws;
        draws.reserve(model.horizon);
        for (std::size_t k = 0; k < model.horizon; ++k)
            draws.push_back(model.noise.sample(rng));
        set.trajectories[i] = rollout(model, controls, draws);
    });
    return set;
}

} // namespace rsmhp
