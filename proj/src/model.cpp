#include "rsmhp/model.hpp"

#include <cmath>
#include <string>

#include "rsmhp/errors.hpp"

namespace rsmhp {

DimensionError::DimensionError(std::string field, std::size_t index, std::size_t expected, std::size_t actual)
    : Error(field + "[" + std::to_string(index) + "]: expected size " + std::to_string(expected) + ", got " +
            std::to_string(actual)),
      field_(std::move(field)), index_(index), expected_(expected), actual_(actual)
{
}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error(field + ": " + message), field_(std::move(field))
{
}

std::string_view to_string(SamplingScheme scheme)
{
    switch (scheme) {
    case SamplingScheme::Tree: return "Tree";
    case SamplingScheme::TreePruned: return "TreePruned";
    case SamplingScheme::Independent: return "Independent";
    }
    return "?";
}

void StochasticModel::validate() const
{
    if (state_dim < 1 || state_dim > kMaxDim)
        throw ConfigError("state_dim", "must be in [1, " + std::to_string(kMaxDim) + "]");
    if (control_dim < 1 || control_dim > kMaxDim)
        throw ConfigError("control_dim", "must be in [1, " + std::to_string(kMaxDim) + "]");
    if (horizon < 1)
        throw ConfigError("horizon", "must be at least 1");
    if (!transition)
        throw ConfigError("transition", "missing");
    if (!stage_cost)
        throw ConfigError("stage_cost", "missing");
    if (initial_state.size() != state_dim)
        throw DimensionError("initial_state", 0, static_cast<std::size_t>(state_dim),
                             static_cast<std::size_t>(initial_state.size()));
}

void check_controls(const StochasticModel& model, const ControlSequence& controls)
{
    if (controls.size() != model.horizon)
        throw DimensionError("controls", 0, model.horizon, controls.size());
    for (std::size_t k = 0; k < controls.size(); ++k)
        if (controls[k].size() != model.control_dim)
            throw DimensionError("controls", k, static_cast<std::size_t>(model.control_dim),
                                 static_cast<std::size_t>(controls[k].size()));
}

Trajectory rollout(const StochasticModel& model, const ControlSequence& controls, std::span<const NoiseDraw> noise_draws)
{
    check_controls(model, controls);
    if (noise_draws.size() != model.horizon)
        throw DimensionError("noise_draws", 0, model.horizon, noise_draws.size());

    const std::size_t horizon = model.horizon;
    Trajectory traj;
    traj.states.reserve(horizon + 1);
    traj.step_weights.reserve(horizon);
    traj.states.push_back(model.initial_state);
    for (std::size_t k = 0; k < horizon; ++k) {
        const NoiseDraw& draw = noise_draws[k];
        if (draw.value.size() != model.noise.dim())
            throw DimensionError("noise_draws", k, static_cast<std::size_t>(model.noise.dim()),
                                 static_cast<std::size_t>(draw.value.size()));
        Vector next = model.transition(traj.states.back(), controls[k], draw.value);
        if (next.size() != model.state_dim)
            throw DimensionError("states", k + 1, static_cast<std::size_t>(model.state_dim),
                                 static_cast<std::size_t>(next.size()));
        traj.states.push_back(std::move(next));
        traj.step_weights.push_back(draw.weight);
        traj.raw_likeliness *= draw.weight;
    }
    traj.cost = trajectory_cost(model, traj.states, controls);
    return traj;
}

double stage_cost_sum(const StochasticModel& model,
                      std::span<const Vector> states,
                      const ControlSequence& controls,
                      std::size_t first,
                      std::size_t last)
{
    if (last > controls.size() || last > states.size() || first > last)
        throw DimensionError("states", last, controls.size(), states.size());
    double total = 0.0;
    for (std::size_t k = first; k < last; ++k)
        total += model.stage_cost(states[k], controls[k]);
    return total;
}

double trajectory_cost(const StochasticModel& model, std::span<const Vector> states, const ControlSequence& controls)
{
    if (states.size() != model.horizon + 1)
        throw DimensionError("states", 0, model.horizon + 1, states.size());
    if (controls.size() != model.horizon)
        throw DimensionError("controls", 0, model.horizon, controls.size());
    return stage_cost_sum(model, states, controls, 0, model.horizon) + model.terminal(states.back());
}

Trajectory nominal_rollout(const StochasticModel& model, const ControlSequence& controls)
{
    const NoiseDraw nominal{model.noise.mean(), 1.0};
    const std::vector<NoiseDraw> draws(model.horizon, nominal);
    return rollout(model, controls, draws);
}

} // namespace rsmhp
