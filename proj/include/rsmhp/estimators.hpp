#pragma once

#include <cstddef>
#include <string_view>

#include "rsmhp/model.hpp"

namespace rsmhp {

enum class EstimatorScheme {
    NBO,
    MeanTree,
    MeanPruned,
    WeightedTree,
    WeightedPruned,
    MeanIndependent,
    WeightedIndependent,
};

std::string_view to_string(EstimatorScheme scheme);

struct Estimate
{
    double value = 0.0;
    std::size_t n_samples = 0;
    /// Unbiased sample variance of the averaged terms (g_i, or q_i * g_i for
    /// weighted estimators); 0 when n_samples == 1.
    double empirical_variance = 0.0;
    EstimatorScheme scheme = EstimatorScheme::NBO;
};

/// Cost of the nominal trajectory, w_k replaced by its mean at every step.
Estimate estimate_nbo(const StochasticModel& model, const ControlSequence& controls);

/// (1/n) sum g_i.
Estimate estimate_mean(const TrajectorySet& set);

/// Returns a copy with q_i = raw_i * n / sum_j raw_j.
TrajectorySet normalize_weights(const TrajectorySet& set);

/// (1/n) sum q_i g_i, normalizing first if the set carries no weights.
Estimate estimate_weighted(const TrajectorySet& set);

} // namespace rsmhp
