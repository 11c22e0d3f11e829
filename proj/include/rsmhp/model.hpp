#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rsmhp/noise.hpp"

namespace rsmhp {

using ControlSequence = std::vector<Vector>;

/**
 * Finite-horizon stochastic control problem
 *
 *     x_{k+1} = f(x_k, u_k, w_k),   cost = sum_{k<H} g(x_k, u_k) + g_H(x_H).
 *
 * The terminal cost defaults to zero. `transition` and `stage_cost` must be
 * pure functions.
 */
struct StochasticModel
{
    using Transition = std::function<Vector(const Vector& state, const Vector& control, const Vector& noise)>;
    using StageCost = std::function<double(const Vector& state, const Vector& control)>;
    using TerminalCost = std::function<double(const Vector& state)>;

    int state_dim = 1;
    int control_dim = 1;
    Transition transition;
    StageCost stage_cost;
    TerminalCost terminal_cost;
    NoiseLaw noise = NoiseLaw::gaussian(0.0, 0.0);
    std::size_t horizon = 1;
    Vector initial_state = Vector::Zero(1);

    /// Throws ConfigError / DimensionError when the model is malformed.
    void validate() const;

    double terminal(const Vector& state) const { return terminal_cost ? terminal_cost(state) : 0.0; }
};

/// One sampled state path.
struct Trajectory
{
    std::vector<Vector> states;        // x_0 .. x_H
    std::vector<double> step_weights;  // one per transition
    double raw_likeliness = 1.0;       // product of step_weights
    double cost = 0.0;
    /// Tree branch index per branching depth (empty outside tree schemes).
    std::vector<std::uint32_t> branch;
};

enum class SamplingScheme { Tree, TreePruned, Independent };

std::string_view to_string(SamplingScheme scheme);

struct TrajectorySet
{
    std::vector<Trajectory> trajectories;
    SamplingScheme scheme = SamplingScheme::Independent;
    /// q_i, summing to size() when present.
    std::optional<std::vector<double>> normalized_weights;

    std::size_t size() const { return trajectories.size(); }
    bool empty() const { return trajectories.empty(); }
};

/// Throws DimensionError unless `controls` has `horizon` entries of `control_dim`.
void check_controls(const StochasticModel& model, const ControlSequence& controls);

/// Iterates the transition from the initial state with the given draws.
Trajectory rollout(const StochasticModel& model, const ControlSequence& controls, std::span<const NoiseDraw> noise_draws);

/// sum_{k<H} stage_cost(x_k, u_k) + terminal_cost(x_H).
double trajectory_cost(const StochasticModel& model, std::span<const Vector> states, const ControlSequence& controls);

/// sum_{first<=k<last} stage_cost(x_k, u_k), no terminal term.
double stage_cost_sum(const StochasticModel& model,
                      std::span<const Vector> states,
                      const ControlSequence& controls,
                      std::size_t first,
                      std::size_t last);

/// The single trajectory obtained with w_k = mean at every step.
Trajectory nominal_rollout(const StochasticModel& model, const ControlSequence& controls);

} // namespace rsmhp
