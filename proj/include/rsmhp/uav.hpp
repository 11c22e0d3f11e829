#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rsmhp/random.hpp"

namespace rsmhp::uav {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kGravity = 9.81;

struct UavState
{
    Vec2 position = Vec2::Zero();
    double heading = 0.0;  // radians, counter-clockwise from +x
    double speed = 20.0;   // m/s
};

struct UavControl
{
    double forward_acceleration = 0.0;  // m/s^2
    double bank_angle = 0.0;            // radians, positive turns left
};

/// Gaussian belief over the target state (px, py, vx, vy).
struct TargetBelief
{
    Vec4 mean = Vec4::Zero();
    Mat4 covariance = Mat4::Identity();
};

struct UavLimits
{
    double speed_min = 10.0;
    double speed_max = 50.0;
    double accel_max = 5.0;
    double bank_max = 30.0 * std::numbers::pi / 180.0;
};

/// Range-dependent isotropic position sensor, R = (sigma0^2 + eta range^2) I.
struct SensorModel
{
    double sigma0 = 5.0;
    double eta = 0.01;

    Mat2 covariance_at(double range) const;
};

struct ScenarioConfig
{
    double dt = 1.0;
    std::size_t episode_length = 50;
    UavLimits limits;
    SensorModel sensor;
    /// Spectral density of the target's white-noise acceleration (m^2/s^3).
    double target_noise = 0.5;
    double target_speed = 5.0;
    double initial_range = 300.0;
    double uav_speed = 20.0;
    /// Initial belief standard deviations.
    double initial_position_sigma = 10.0;
    double initial_velocity_sigma = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Objective { NBO, RSMHP };

std::string_view to_string(Objective objective);

struct PlannerConfig
{
    std::size_t horizon = 6;
    std::size_t n_trajectories = 100;  // N_T
    Objective objective = Objective::RSMHP;
    std::size_t max_evaluations = 120;
    std::size_t max_restarts = 1;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;

    void validate() const;
};

/// Constant-velocity transition matrix.
Mat4 target_transition(double dt);

/// Process covariance of the white-noise-acceleration model.
Mat4 process_covariance(double dt, double noise_intensity);

/// Propagates the true target state one step with sampled process noise.
Vec4 target_step(const Vec4& state, double dt, double noise_intensity, RandomStream& rng);

/// Planar kinematics: speed integrates acceleration (clamped to the speed
/// bounds), heading rate g tan(bank) / speed, exact arc motion.
UavState uav_step(const UavState& state, const UavControl& control, double dt, const UavLimits& limits);

/// Projects a control onto the actuator bounds.
UavControl clamp_control(const UavControl& control, const UavLimits& limits);

struct Measurement
{
    Vec2 position;
    Mat2 covariance;
};

Measurement sensor_measure(const UavState& uav, const Vec2& target_position, const SensorModel& sensor, RandomStream& rng);

TargetBelief kalman_predict(const TargetBelief& belief, double dt, double noise_intensity);

/// Position-measurement update (Joseph form, symmetrized). Throws
/// NumericalError if the innovation covariance is not positive definite.
TargetBelief kalman_update(const TargetBelief& belief, const Vec2& measurement, const Mat2& measurement_covariance);

/// UAV positions after each of the planned controls.
std::vector<UavState> uav_path(const UavState& start, std::span<const UavControl> controls, const ScenarioConfig& scenario);

/**
 * sum_k tr(P_k) with all future noise at its mean: the target follows the
 * predicted mean and every measurement equals its prediction, so only the
 * covariance evolves. Step k applies control k, predicts, updates with the
 * sensor noise for the UAV-to-predicted-target range, then adds the trace.
 */
double objective_nbo(const UavState& uav,
                     const TargetBelief& belief,
                     std::span<const UavControl> controls,
                     const ScenarioConfig& scenario);

/// sum_k tr(P_k) along one sampled future (target process noise and
/// measurement noise drawn from the stream of `index` below `master_seed`).
double scenario_cost(const UavState& uav,
                     const TargetBelief& belief,
                     std::span<const UavControl> controls,
                     const ScenarioConfig& scenario,
                     std::uint64_t master_seed,
                     std::size_t index);

/// Average of scenario_cost over N_T independent scenarios.
double objective_mhp(const UavState& uav,
                     const TargetBelief& belief,
                     std::span<const UavControl> controls,
                     const ScenarioConfig& scenario,
                     const PlannerConfig& config);

/// Objective selected by config.objective.
double planning_objective(const UavState& uav,
                          const TargetBelief& belief,
                          std::span<const UavControl> controls,
                          const ScenarioConfig& scenario,
                          const PlannerConfig& config);

/// Optimizes the full H-step control sequence starting from `initial_guess`
/// (zero controls when empty).
std::vector<UavControl> plan_controls(const UavState& uav,
                                      const TargetBelief& belief,
                                      const ScenarioConfig& scenario,
                                      const PlannerConfig& config,
                                      std::span<const UavControl> initial_guess = {});

/// First control of plan_controls().
UavControl plan_step(const UavState& uav,
                     const TargetBelief& belief,
                     const ScenarioConfig& scenario,
                     const PlannerConfig& config,
                     std::span<const UavControl> initial_guess = {});

struct EpisodeTrace
{
    std::vector<double> errors;  // |filter mean position - true position| per step
    std::vector<Vec2> uav_positions;
    std::vector<Vec2> target_positions;
    double mean_error = 0.0;
};

/// One closed-loop episode. Environment randomness comes from
/// (scenario.seed, run) and planner randomness from (config.master_seed, run),
/// so planners compared on the same run index face the same target motion
/// and sensor noise.
EpisodeTrace run_episode(const ScenarioConfig& scenario, const PlannerConfig& config, std::size_t run);

/// Time-averaged tracking error of n_runs episodes.
std::vector<double> run_monte_carlo(const ScenarioConfig& scenario, const PlannerConfig& config, std::size_t n_runs);

} // namespace rsmhp::uav
