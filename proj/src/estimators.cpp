#include "rsmhp/estimators.hpp"

#include <cmath>
#include <span>
#include <vector>

#include "rsmhp/errors.hpp"

namespace rsmhp {

namespace {

// Mean and unbiased variance, summed in index order.
std::pair<double, double> moments(std::span<const double> terms)
{
    const double n = static_cast<double>(terms.size());
    double sum = 0.0;
    for (double t : terms)
        sum += t;
    const double mean = sum / n;
    if (terms.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double t : terms)
        ss += (t - mean) * (t - mean);
    return {mean, ss / (n - 1.0)};
}

EstimatorScheme mean_scheme(SamplingScheme s)
{
    switch (s) {
    case SamplingScheme::Tree: return EstimatorScheme::MeanTree;
    case SamplingScheme::TreePruned: return EstimatorScheme::MeanPruned;
    case SamplingScheme::Independent: return EstimatorScheme::MeanIndependent;
    }
    return EstimatorScheme::MeanIndependent;
}

EstimatorScheme weighted_scheme(SamplingScheme s)
{
    switch (s) {
    case SamplingScheme::Tree: return EstimatorScheme::WeightedTree;
    case SamplingScheme::TreePruned: return EstimatorScheme::WeightedPruned;
    case SamplingScheme::Independent: return EstimatorScheme::WeightedIndependent;
    }
    return EstimatorScheme::WeightedIndependent;
}

} // namespace

std::string_view to_string(EstimatorScheme scheme)
{
    switch (scheme) {
    case EstimatorScheme::NBO: return "NBO";
    case EstimatorScheme::MeanTree: return "MeanTree";
    case EstimatorScheme::MeanPruned: return "MeanPruned";
    case EstimatorScheme::WeightedTree: return "WeightedTree";
    case EstimatorScheme::WeightedPruned: return "WeightedPruned";
    case EstimatorScheme::MeanIndependent: return "MeanIndependent";
    case EstimatorScheme::WeightedIndependent: return "WeightedIndependent";
    }
    return "?";
}

Estimate estimate_nbo(const StochasticModel& model, const ControlSequence& controls)
{
    model.validate();
    return {nominal_rollout(model, controls).cost, 1, 0.0, EstimatorScheme::NBO};
}

Estimate estimate_mean(const TrajectorySet& set)
{
    if (set.empty())
        throw ConfigError("set", "cannot estimate from an empty trajectory set");
    std::vector<double> costs;
    costs.reserve(set.size());
    for (const Trajectory& t : set.trajectories)
        costs.push_back(t.cost);
    const auto [mean, var] = moments(costs);
    return {mean, set.size(), var, mean_scheme(set.scheme)};
}

TrajectorySet normalize_weights(const TrajectorySet& set)
{
    if (set.empty())
        throw ConfigError("set", "cannot normalize an empty trajectory set");
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double raw = set.trajectories[i].raw_likeliness;
        if (!(raw >= 0.0) || !std::isfinite(raw))
            throw NumericalError("trajectory " + std::to_string(i) + " has invalid likeliness " + std::to_string(raw));
        total += raw;
    }
    if (!(total > 0.0))
        throw NumericalError("all trajectory likeliness values are zero");

    TrajectorySet out = set;
    const double scale = static_cast<double>(set.size()) / total;
    std::vector<double> q(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        q[i] = set.trajectories[i].raw_likeliness * scale;
    out.normalized_weights = std::move(q);
    return out;
}

Estimate estimate_weighted(const TrajectorySet& set)
{
    if (set.empty())
        throw ConfigError("set", "cannot estimate from an empty trajectory set");
    if (!set.normalized_weights)
        return estimate_weighted(normalize_weights(set));
    const std::vector<double>& q = *set.normalized_weights;
    if (q.size() != set.size())
        throw DimensionError("normalized_weights", 0, set.size(), q.size());

    std::vector<double> terms(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        terms[i] = q[i] * set.trajectories[i].cost;
    const auto [mean, var] = moments(terms);
    return {mean, set.size(), var, weighted_scheme(set.scheme)};
}

} // namespace rsmhp
