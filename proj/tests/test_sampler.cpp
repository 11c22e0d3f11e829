#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "rsmhp/errors.hpp"
#include "rsmhp/linear_analysis.hpp"
#include "rsmhp/sampler.hpp"
#include "support.hpp"

using namespace rsmhp;

namespace {

// x' = x + w, so the draw at step k is states[k+1] - states[k].
StochasticModel random_walk(NoiseLaw noise, std::size_t horizon)
{
    return testsupport::scalar_linear(1.0, 0.0, 1.0, 0.0, std::move(noise), horizon);
}

ControlSequence zeros(std::size_t h)
{
    return ControlSequence(h, Vector::Zero(1));
}

double draw_at(const Trajectory& t, std::size_t k)
{
    return t.states[k + 1](0) - t.states[k](0);
}

double partial_likeliness(const Trajectory& t, std::size_t depth)
{
    double w = 1.0;
    for (std::size_t k = 0; k < depth; ++k)
        w *= t.step_weights[k];
    return w;
}

bool identical(const Trajectory& a, const Trajectory& b)
{
    if (a.states.size() != b.states.size() || a.branch != b.branch || a.step_weights != b.step_weights)
        return false;
    for (std::size_t k = 0; k < a.states.size(); ++k)
        if (a.states[k] != b.states[k])
            return false;
    return a.cost == b.cost && a.raw_likeliness == b.raw_likeliness;
}

bool identical(const TrajectorySet& a, const TrajectorySet& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!identical(a.trajectories[i], b.trajectories[i]))
            return false;
    return true;
}

/// Brute-force pruning: start from the full tree, and at every branching
/// depth keep the M prefixes with the largest likeliness so far (ties to the
/// lexicographically smaller prefix).
std::vector<Trajectory> pruning_oracle(const TrajectorySet& full, std::size_t m, std::size_t branching_depths)
{
    using Prefix = std::vector<std::uint32_t>;
    std::set<Prefix> survivors{Prefix{}};
    for (std::size_t depth = 1; depth <= branching_depths; ++depth) {
        std::map<Prefix, double> candidates;
        for (const Trajectory& t : full.trajectories) {
            Prefix parent(t.branch.begin(), t.branch.begin() + static_cast<long>(depth - 1));
            if (!survivors.contains(parent))
                continue;
            Prefix prefix(t.branch.begin(), t.branch.begin() + static_cast<long>(depth));
            candidates[prefix] = partial_likeliness(t, depth);
        }
        std::vector<std::pair<Prefix, double>> ranked(candidates.begin(), candidates.end());
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        survivors.clear();
        for (std::size_t i = 0; i < std::min(m, ranked.size()); ++i)
            survivors.insert(ranked[i].first);
    }
    std::vector<Trajectory> out;
    for (const Trajectory& t : full.trajectories)
        if (survivors.contains(t.branch))
            out.push_back(t);
    return out;
}

} // namespace

TEST_CASE("tree size is N^(H-1)")
{
    const StochasticModel m2 = random_walk(NoiseLaw::gaussian(0.0, 1.0), 2);
    const StochasticModel m3 = random_walk(NoiseLaw::gaussian(0.0, 1.0), 3);
    SamplerConfig cfg;
    cfg.branch_factor = 3;
    CHECK(sample_tree(m2, zeros(2), cfg).size() == 3);
    CHECK(sample_tree(m3, zeros(3), cfg).size() == 9);
    CHECK(sample_tree(m3, zeros(3), cfg).scheme == SamplingScheme::Tree);
    CHECK(tree_size(3, 3, 100) == 9u);
    CHECK(tree_size(10, 8, 1'000'000) == std::nullopt);
    CHECK(tree_size(5, 1, 10) == 1u);
}

TEST_CASE("tree trajectories come out in lexicographic branch order")
{
    const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), 4);
    SamplerConfig cfg;
    cfg.branch_factor = 3;
    cfg.master_seed = 8;
    const TrajectorySet set = sample_tree(m, zeros(4), cfg);
    REQUIRE(set.size() == 27);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& b = set.trajectories[i].branch;
        REQUIRE(b.size() == 3);
        CHECK(b[0] * 9 + b[1] * 3 + b[2] == i);
        CHECK(set.trajectories[i].states[0] == m.initial_state);
        CHECK(set.trajectories[i].step_weights.back() == 1.0);
    }
    // Siblings share every state up to their common prefix.
    CHECK(set.trajectories[0].states[2] == set.trajectories[2].states[2]);
    CHECK(set.trajectories[0].states[1] == set.trajectories[8].states[1]);
    CHECK(set.trajectories[0].states[1] != set.trajectories[9].states[1]);
}

TEST_CASE("two-point law enumerates every sign sequence")
{
    const StochasticModel m = random_walk(NoiseLaw::discrete(std::vector<double>{-1.0, 1.0}, {0.5, 0.5}), 3);
    SamplerConfig cfg;
    cfg.branch_factor = 2;
    cfg.noise_sharing = NoiseSharing::SharedPerDepth;
    cfg.enumerate_support = true;
    const TrajectorySet set = sample_tree(m, zeros(3), cfg);
    REQUIRE(set.size() == 4);
    const double expected[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(draw_at(set.trajectories[i], 0) == expected[i][0]);
        CHECK(draw_at(set.trajectories[i], 1) == expected[i][1]);
        CHECK(set.trajectories[i].raw_likeliness == 0.25);
    }
}

TEST_CASE("enumeration requires a matching finite support")
{
    SamplerConfig cfg;
    cfg.branch_factor = 3;
    cfg.enumerate_support = true;
    const StochasticModel two = random_walk(NoiseLaw::discrete(std::vector<double>{-1.0, 1.0}, {0.5, 0.5}), 3);
    CHECK_THROWS_AS(sample_tree(two, zeros(3), cfg), ConfigError);
    const StochasticModel gauss = random_walk(NoiseLaw::gaussian(0.0, 1.0), 3);
    CHECK_THROWS_AS(sample_tree(gauss, zeros(3), cfg), ConfigError);
}

TEST_CASE("shared noise reuses the same draws across parents")
{
    // x' = w, so every state is exactly the draw that produced it.
    const StochasticModel m = testsupport::scalar_linear(0.0, 0.0, 1.0, 0.0, NoiseLaw::gaussian(0.0, 1.0), 3);
    const auto draw = [](const Trajectory& t, std::size_t k) { return t.states[k + 1](0); };
    SamplerConfig cfg;
    cfg.branch_factor = 3;
    cfg.master_seed = 21;
    cfg.noise_sharing = NoiseSharing::SharedPerDepth;
    const TrajectorySet shared = sample_tree(m, zeros(3), cfg);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(draw(shared.trajectories[j], 1) == draw(shared.trajectories[3 + j], 1));
        CHECK(draw(shared.trajectories[j], 1) == draw(shared.trajectories[6 + j], 1));
    }
    cfg.noise_sharing = NoiseSharing::FreshPerNode;
    const TrajectorySet fresh = sample_tree(m, zeros(3), cfg);
    CHECK(draw(fresh.trajectories[0], 1) != draw(fresh.trajectories[3], 1));
}

TEST_CASE("capacity errors")
{
    const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), 8);
    SamplerConfig cfg;
    cfg.branch_factor = 10;
    CHECK_THROWS_AS(sample_tree(m, zeros(8), cfg), CapacityError);
    cfg.tree_cap = 99;
    const StochasticModel small = random_walk(NoiseLaw::gaussian(0.0, 1.0), 3);
    CHECK_THROWS_AS(sample_tree(small, zeros(3), cfg), CapacityError);
    cfg.tree_cap = 1'000'000;
    cfg.prune_width = 5;
    CHECK(sample_tree_pruned(m, zeros(8), cfg).size() == 5);
    CHECK_THROWS_AS(sample_tree(m, zeros(8), cfg), ConfigError);
    cfg.prune_width.reset();
    CHECK_THROWS_AS(sample_tree_pruned(small, zeros(3), cfg), ConfigError);
    cfg.prune_width = 0;
    CHECK_THROWS_AS(sample_tree_pruned(small, zeros(3), cfg), ConfigError);
}

TEST_CASE("pruned tree matches the brute-force oracle")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (std::size_t h : {3u, 4u}) {
            for (std::size_t width : {1u, 2u, 4u, 5u}) {
                for (auto sharing : {NoiseSharing::FreshPerNode, NoiseSharing::SharedPerDepth}) {
                    const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), h);
                    SamplerConfig cfg;
                    cfg.branch_factor = 3;
                    cfg.master_seed = seed;
                    cfg.noise_sharing = sharing;
                    const TrajectorySet full = sample_tree(m, zeros(h), cfg);
                    cfg.prune_width = width;
                    const TrajectorySet pruned = sample_tree_pruned(m, zeros(h), cfg);
                    const std::vector<Trajectory> oracle = pruning_oracle(full, width, h - 1);
                    CHECK(pruned.scheme == SamplingScheme::TreePruned);
                    REQUIRE(pruned.size() == std::min<std::size_t>(width, full.size()));
                    REQUIRE(oracle.size() == pruned.size());
                    for (std::size_t i = 0; i < oracle.size(); ++i)
                        CHECK(identical(pruned.trajectories[i], oracle[i]));
                }
            }
        }
    }
}

TEST_CASE("survivors dominate everything pruned at the final depth")
{
    const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), 3);
    SamplerConfig cfg;
    cfg.branch_factor = 3;
    cfg.master_seed = 77;
    const TrajectorySet full = sample_tree(m, zeros(3), cfg);
    cfg.prune_width = 4;
    const TrajectorySet pruned = sample_tree_pruned(m, zeros(3), cfg);
    double weakest = 1e300;
    std::set<std::vector<std::uint32_t>> kept;
    for (const auto& t : pruned.trajectories) {
        weakest = std::min(weakest, t.raw_likeliness);
        kept.insert(t.branch);
    }
    for (const auto& t : full.trajectories)
        if (!kept.contains(t.branch))
            CHECK(t.raw_likeliness <= weakest);
}

TEST_CASE("ties are broken by lexicographic branch order")
{
    const StochasticModel m = random_walk(NoiseLaw::discrete(std::vector<double>{-1.0, 1.0}, {0.5, 0.5}), 3);
    SamplerConfig cfg;
    cfg.branch_factor = 3;
    cfg.prune_width = 4;
    cfg.master_seed = 5;
    const TrajectorySet set = sample_tree_pruned(m, zeros(3), cfg);
    REQUIRE(set.size() == 4);
    const std::vector<std::vector<std::uint32_t>> expected{{0, 0}, {0, 1}, {0, 2}, {1, 0}};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(set.trajectories[i].branch == expected[i]);
}

TEST_CASE("a single survivor follows the most likely draw at every depth")
{
    const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), 4);
    SamplerConfig cfg;
    cfg.branch_factor = 4;
    cfg.master_seed = 31;
    const TrajectorySet full = sample_tree(m, zeros(4), cfg);
    cfg.prune_width = 1;
    const TrajectorySet one = sample_tree_pruned(m, zeros(4), cfg);
    REQUIRE(one.size() == 1);
    std::vector<std::uint32_t> prefix;
    for (std::size_t depth = 0; depth < 3; ++depth) {
        double best = -1.0;
        std::uint32_t arg = 0;
        for (const auto& t : full.trajectories) {
            if (!std::equal(prefix.begin(), prefix.end(), t.branch.begin()))
                continue;
            if (t.step_weights[depth] > best) {
                best = t.step_weights[depth];
                arg = t.branch[depth];
            }
        }
        prefix.push_back(arg);
    }
    CHECK(one.trajectories[0].branch == prefix);
}

TEST_CASE("wide pruning reproduces the full tree exactly")
{
    for (std::size_t h : {1u, 2u, 3u, 4u}) {
        const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), h);
        SamplerConfig cfg;
        cfg.branch_factor = 3;
        cfg.master_seed = 100 + h;
        const TrajectorySet full = sample_tree(m, zeros(h), cfg);
        for (std::size_t width : {full.size(), full.size() + 1, 1000ul}) {
            cfg.prune_width = width;
            CHECK(identical(sample_tree_pruned(m, zeros(h), cfg), full));
        }
        cfg.prune_width.reset();
    }
}

TEST_CASE("independent sampling")
{
    const StochasticModel m = random_walk(NoiseLaw::gaussian(0.0, 1.0), 3);
    SamplerConfig cfg;
    cfg.branch_factor = 1;
    const TrajectorySet one = sample_independent(m, zeros(3), cfg);
    CHECK(one.size() == 1);
    CHECK(one.scheme == SamplingScheme::Independent);

    cfg.branch_factor = 50;
    cfg.master_seed = 4;
    const TrajectorySet many = sample_independent(m, zeros(3), cfg);
    std::set<double> first_draws;
    for (const auto& t : many.trajectories) {
        first_draws.insert(draw_at(t, 0));
        CHECK(t.branch.empty());
        CHECK(t.raw_likeliness > 0.0);
    }
    CHECK(first_draws.size() == 50);
}

TEST_CASE("zero-variance noise collapses every sample onto the nominal path")
{
    const StochasticModel m = lqg_model(LqgParams{0.5, 10.0, 1.0, 0.0, 0.0, 2});
    const ControlSequence u = scalar_controls({0.55, 0.17});
    const Trajectory nominal = nominal_rollout(m, u);
    SamplerConfig cfg;
    cfg.branch_factor = 1000;
    const TrajectorySet set = sample_independent(m, u, cfg);
    REQUIRE(set.size() == 1000);
    for (const auto& t : set.trajectories) {
        CHECK(t.states == nominal.states);
        CHECK(t.cost == nominal.cost);
    }
}

TEST_CASE("samplers are deterministic across runs and worker counts")
{
    const StochasticModel m = lqg_model(LqgParams{0.5, 10.0, 1.0, 1.0, 0.0, 4});
    const ControlSequence u = scalar_controls({0.55, 0.17, 0.1, 0.0});
    SamplerConfig cfg;
    cfg.branch_factor = 2;
    cfg.master_seed = 99;
    const TrajectorySet base = sample_independent(m, u, cfg);
    cfg.workers = 4;
    CHECK(identical(base, sample_independent(m, u, cfg)));
    cfg.workers = 1;
    CHECK(identical(base, sample_independent(m, u, cfg)));

    cfg.branch_factor = 5;
    for (auto sharing : {NoiseSharing::FreshPerNode, NoiseSharing::SharedPerDepth}) {
        cfg.noise_sharing = sharing;
        cfg.workers = 1;
        const TrajectorySet t1 = sample_tree(m, u, cfg);
        cfg.prune_width = 7;
        const TrajectorySet p1 = sample_tree_pruned(m, u, cfg);
        cfg.workers = 3;
        const TrajectorySet p3 = sample_tree_pruned(m, u, cfg);
        cfg.prune_width.reset();
        const TrajectorySet t3 = sample_tree(m, u, cfg);
        CHECK(identical(t1, t3));
        CHECK(identical(p1, p3));
    }
    cfg.workers = 1;
    cfg.master_seed = 100;
    CHECK_FALSE(identical(base, sample_independent(m, u, cfg)));
}

TEST_CASE("independent trajectory costs are uncorrelated")
{
    const LinearModel linear = LinearModel::scalar(0.5, 0.0, 1.0, 0.0, 1.0, 3);
    const StochasticModel m = to_stochastic_model(linear);
    const std::size_t reps = 4000;
    std::vector<double> a(reps), b(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        SamplerConfig cfg;
        cfg.branch_factor = 2;
        cfg.master_seed = r;
        const TrajectorySet set = sample_independent(m, zeros(3), cfg);
        a[r] = set.trajectories[0].cost;
        b[r] = set.trajectories[1].cost;
    }
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / reps;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / reps;
    std::vector<double> prod(reps);
    for (std::size_t r = 0; r < reps; ++r)
        prod[r] = (a[r] - ma) * (b[r] - mb);
    const double mp = std::accumulate(prod.begin(), prod.end(), 0.0) / reps;
    double ss = 0.0;
    for (double p : prod)
        ss += (p - mp) * (p - mp);
    const double se = std::sqrt(ss / (reps - 1) / reps);
    CHECK(std::abs(mp / se) < 2.576);
}
