#include "rsmhp/uav.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "rsmhp/errors.hpp"
#include "rsmhp/optimizer.hpp"
#include "rsmhp/parallel.hpp"

namespace rsmhp::uav {

Mat2 SensorModel::covariance_at(double range) const
{
    return (sigma0 * sigma0 + eta * range * range) * Mat2::Identity();
}

void ScenarioConfig::validate() const
{
    if (!(dt > 0.0))
        throw ConfigError("dt", "must be positive");
    if (episode_length < 1)
        throw ConfigError("episode_length", "must be at least 1");
    if (!(limits.speed_min > 0.0) || !(limits.speed_max >= limits.speed_min))
        throw ConfigError("speed_min", "need 0 < speed_min <= speed_max");
    if (!(limits.accel_max >= 0.0))
        throw ConfigError("accel_max", "must be nonnegative");
    if (!(limits.bank_max >= 0.0 && limits.bank_max < std::numbers::pi / 2))
        throw ConfigError("bank_max", "must lie in [0, pi/2)");
    if (!(sensor.sigma0 >= 0.0) || !(sensor.eta >= 0.0))
        throw ConfigError("sensor", "sigma0 and eta must be nonnegative");
    if (!(target_noise >= 0.0))
        throw ConfigError("target_noise", "must be nonnegative");
    if (!(initial_position_sigma > 0.0) || !(initial_velocity_sigma > 0.0))
        throw ConfigError("initial_position_sigma", "initial belief must be positive definite");
    if (!(uav_speed >= limits.speed_min && uav_speed <= limits.speed_max))
        throw ConfigError("uav_speed", "must lie within the speed bounds");
}

std::string_view to_string(Objective objective)
{
    return objective == Objective::NBO ? "NBO" : "RSMHP";
}

void PlannerConfig::validate() const
{
    if (horizon < 1)
        throw ConfigError("horizon", "must be at least 1");
    if (n_trajectories < 1)
        throw ConfigError("n_trajectories", "must be at least 1");
    if (max_evaluations < 1)
        throw ConfigError("max_evaluations", "must be at least 1");
}

Mat4 target_transition(double dt)
{
    Mat4 F = Mat4::Identity();
    F(0, 2) = dt;
    F(1, 3) = dt;
    return F;
}

Mat4 process_covariance(double dt, double noise_intensity)
{
    const double q = noise_intensity;
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = Q(1, 1) = q * dt * dt * dt / 3.0;
    Q(0, 2) = Q(2, 0) = Q(1, 3) = Q(3, 1) = q * dt * dt / 2.0;
    Q(2, 2) = Q(3, 3) = q * dt;
    return Q;
}

Vec4 target_step(const Vec4& state, double dt, double noise_intensity, RandomStream& rng)
{
    // Per-axis Cholesky factor of [[dt^3/3, dt^2/2], [dt^2/2, dt]] * q.
    const double l11 = std::sqrt(noise_intensity * dt * dt * dt / 3.0);
    const double l21 = std::sqrt(3.0 * noise_intensity * dt) / 2.0;
    const double l22 = std::sqrt(noise_intensity * dt) / 2.0;
    Vec4 next = target_transition(dt) * state;
    for (int axis = 0; axis < 2; ++axis) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        next[axis] += l11 * z1;
        next[axis + 2] += l21 * z1 + l22 * z2;
    }
    return next;
}

UavControl clamp_control(const UavControl& control, const UavLimits& limits)
{
    return {std::clamp(control.forward_acceleration, -limits.accel_max, limits.accel_max),
            std::clamp(control.bank_angle, -limits.bank_max, limits.bank_max)};
}

UavState uav_step(const UavState& state, const UavControl& control, double dt, const UavLimits& limits)
{
    const UavControl u = clamp_control(control, limits);
    const double v1 = std::clamp(state.speed + u.forward_acceleration * dt, limits.speed_min, limits.speed_max);
    const double v = 0.5 * (state.speed + v1);
    const double rate = kGravity * std::tan(u.bank_angle) / v;
    const double h0 = state.heading;
    const double h1 = h0 + rate * dt;

    UavState next;
    next.speed = v1;
    if (std::abs(rate * dt) < 1e-12) {
        next.position = state.position + v * dt * Vec2(std::cos(h0), std::sin(h0));
    } else {
        const double radius = v / rate;
        next.position = state.position + radius * Vec2(std::sin(h1) - std::sin(h0), std::cos(h0) - std::cos(h1));
    }
    next.heading = std::remainder(h1, 2.0 * std::numbers::pi);
    return next;
}

Measurement sensor_measure(const UavState& uav, const Vec2& target_position, const SensorModel& sensor, RandomStream& rng)
{
    const double range = (target_position - uav.position).norm();
    Measurement m;
    m.covariance = sensor.covariance_at(range);
    const double sd = std::sqrt(m.covariance(0, 0));
    const double n1 = rng.normal();
    const double n2 = rng.normal();
    m.position = target_position + sd * Vec2(n1, n2);
    return m;
}

TargetBelief kalman_predict(const TargetBelief& belief, double dt, double noise_intensity)
{
    const Mat4 F = target_transition(dt);
    TargetBelief out;
    out.mean = F * belief.mean;
    out.covariance = F * belief.covariance * F.transpose() + process_covariance(dt, noise_intensity);
    return out;
}

TargetBelief kalman_update(const TargetBelief& belief, const Vec2& measurement, const Mat2& measurement_covariance)
{
    const Mat4& P = belief.covariance;
    const Mat2 S = P.topLeftCorner<2, 2>() + measurement_covariance;
    Eigen::LLT<Mat2> llt(S);
    if (llt.info() != Eigen::Success || !std::isfinite(S.sum()))
        throw NumericalError("kalman_update: innovation covariance is not positive definite");

    // K = P H^T S^{-1}, with H selecting the position block.
    const Eigen::Matrix<double, 4, 2> PHt = P.leftCols<2>();
    const Eigen::Matrix<double, 4, 2> K = llt.solve(PHt.transpose()).transpose();
    Eigen::Matrix<double, 4, 4> IKH = Mat4::Identity();
    IKH.leftCols<2>() -= K;

    TargetBelief out;
    out.mean = belief.mean + K * (measurement - belief.mean.head<2>());
    out.covariance = IKH * P * IKH.transpose() + K * measurement_covariance * K.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

std::vector<UavState> uav_path(const UavState& start, std::span<const UavControl> controls, const ScenarioConfig& scenario)
{
    std::vector<UavState> path;
    path.reserve(controls.size());
    UavState state = start;
    for (const UavControl& u : controls) {
        state = uav_step(state, u, scenario.dt, scenario.limits);
        path.push_back(state);
    }
    return path;
}

double objective_nbo(const UavState& uav,
                     const TargetBelief& belief,
                     std::span<const UavControl> controls,
                     const ScenarioConfig& scenario)
{
    const std::vector<UavState> path = uav_path(uav, controls, scenario);
    TargetBelief b = belief;
    double total = 0.0;
    for (const UavState& position : path) {
        b = kalman_predict(b, scenario.dt, scenario.target_noise);
        const Vec2 predicted = b.mean.head<2>();
        const double range = (predicted - position.position).norm();
        b = kalman_update(b, predicted, scenario.sensor.covariance_at(range));
        total += b.covariance.trace();
    }
    return total;
}

namespace {

double scenario_cost_along(const std::vector<UavState>& path,
                           const TargetBelief& belief,
                           const ScenarioConfig& scenario,
                           std::uint64_t scenario_root,
                           std::size_t index)
{
    RandomStream rng(derive_key(scenario_root, {index}));
    Vec4 truth = belief.mean;
    TargetBelief b = belief;
    double total = 0.0;
    for (const UavState& position : path) {
        truth = target_step(truth, scenario.dt, scenario.target_noise, rng);
        b = kalman_predict(b, scenario.dt, scenario.target_noise);
        const Measurement m = sensor_measure(position, truth.head<2>(), scenario.sensor, rng);
        b = kalman_update(b, m.position, m.covariance);
        total += b.covariance.trace();
    }
    return total;
}

} // namespace

double scenario_cost(const UavState& uav,
                     const TargetBelief& belief,
                     std::span<const UavControl> controls,
                     const ScenarioConfig& scenario,
                     std::uint64_t master_seed,
                     std::size_t index)
{
    return scenario_cost_along(uav_path(uav, controls, scenario), belief, scenario,
                               domain_key(master_seed, StreamDomain::Scenario), index);
}

double objective_mhp(const UavState& uav,
                     const TargetBelief& belief,
                     std::span<const UavControl> controls,
                     const ScenarioConfig& scenario,
                     const PlannerConfig& config)
{
    const std::vector<UavState> path = uav_path(uav, controls, scenario);
    const std::uint64_t root = domain_key(config.master_seed, StreamDomain::Scenario);
    std::vector<double> costs(config.n_trajectories);
    parallel_for(costs.size(), config.workers,
                 [&](std::size_t i) { costs[i] = scenario_cost_along(path, belief, scenario, root, i); });
    double total = 0.0;
    for (double c : costs)
        total += c;
    return total / static_cast<double>(costs.size());
}

double planning_objective(const UavState& uav,
                          const TargetBelief& belief,
                          std::span<const UavControl> controls,
                          const ScenarioConfig& scenario,
                          const PlannerConfig& config)
{
    return config.objective == Objective::NBO ? objective_nbo(uav, belief, controls, scenario)
                                              : objective_mhp(uav, belief, controls, scenario, config);
}

std::vector<UavControl> plan_controls(const UavState& uav,
                                      const TargetBelief& belief,
                                      const ScenarioConfig& scenario,
                                      const PlannerConfig& config,
                                      std::span<const UavControl> initial_guess)
{
    config.validate();
    const std::size_t h = config.horizon;
    const UavLimits& limits = scenario.limits;
    const double accel_scale = limits.accel_max > 0.0 ? limits.accel_max : 1.0;
    const double bank_scale = limits.bank_max > 0.0 ? limits.bank_max : 1.0;

    // Decision variables are the controls scaled to [-1, 1].
    auto decode = [&](const Eigen::VectorXd& x) {
        std::vector<UavControl> controls(h);
        for (std::size_t k = 0; k < h; ++k)
            controls[k] = clamp_control({x[2 * k] * accel_scale, x[2 * k + 1] * bank_scale}, limits);
        return controls;
    };

    Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * h));
    for (std::size_t k = 0; k < std::min(h, initial_guess.size()); ++k) {
        const UavControl u = clamp_control(initial_guess[k], limits);
        start[2 * k] = u.forward_acceleration / accel_scale;
        start[2 * k + 1] = u.bank_angle / bank_scale;
    }

    NelderMeadOptions options;
    options.max_evaluations = config.max_evaluations;
    options.max_restarts = config.max_restarts;
    options.initial_step = 0.5;
    options.tolerance = 1e-6;
    options.lower = Eigen::VectorXd::Constant(start.size(), -1.0);
    options.upper = Eigen::VectorXd::Constant(start.size(), 1.0);

    const OptimizationResult result = minimize_nelder_mead(
        [&](const Eigen::VectorXd& x) {
            const std::vector<UavControl> controls = decode(x);
            return planning_objective(uav, belief, controls, scenario, config);
        },
        start, options);
    return decode(result.x);
}

UavControl plan_step(const UavState& uav,
                     const TargetBelief& belief,
                     const ScenarioConfig& scenario,
                     const PlannerConfig& config,
                     std::span<const UavControl> initial_guess)
{
    return plan_controls(uav, belief, scenario, config, initial_guess).front();
}

EpisodeTrace run_episode(const ScenarioConfig& scenario, const PlannerConfig& config, std::size_t run)
{
    scenario.validate();
    config.validate();
    RandomStream env(derive_key(domain_key(scenario.seed, StreamDomain::Episode), {run}));
    const std::uint64_t planner_root = domain_key(config.master_seed, StreamDomain::Planner);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    UavState uav;
    uav.heading = std::remainder(two_pi * env.uniform(), two_pi);
    uav.speed = scenario.uav_speed;

    const double bearing = two_pi * env.uniform();
    const double course = two_pi * env.uniform();
    Vec4 truth(scenario.initial_range * std::cos(bearing), scenario.initial_range * std::sin(bearing),
               scenario.target_speed * std::cos(course), scenario.target_speed * std::sin(course));

    TargetBelief belief;
    const double sp = scenario.initial_position_sigma;
    const double sv = scenario.initial_velocity_sigma;
    belief.covariance = Vec4(sp * sp, sp * sp, sv * sv, sv * sv).asDiagonal();
    for (int i = 0; i < 4; ++i)
        belief.mean[i] = truth[i] + std::sqrt(belief.covariance(i, i)) * env.normal();

    EpisodeTrace trace;
    trace.errors.reserve(scenario.episode_length);
    std::vector<UavControl> plan;
    PlannerConfig step_config = config;
    for (std::size_t t = 0; t < scenario.episode_length; ++t) {
        step_config.master_seed = derive_key(planner_root, {run, t});
        std::vector<UavControl> guess;
        if (!plan.empty()) {
            guess.assign(plan.begin() + 1, plan.end());
            guess.push_back(plan.back());
        }
        plan = plan_controls(uav, belief, scenario, step_config, guess);

        uav = uav_step(uav, plan.front(), scenario.dt, scenario.limits);
        truth = target_step(truth, scenario.dt, scenario.target_noise, env);
        belief = kalman_predict(belief, scenario.dt, scenario.target_noise);
        const Measurement m = sensor_measure(uav, truth.head<2>(), scenario.sensor, env);
        belief = kalman_update(belief, m.position, m.covariance);

        trace.errors.push_back((belief.mean.head<2>() - truth.head<2>()).norm());
        trace.uav_positions.push_back(uav.position);
        trace.target_positions.push_back(truth.head<2>());
    }
    double total = 0.0;
    for (double e : trace.errors)
        total += e;
    trace.mean_error = total / static_cast<double>(trace.errors.size());
    return trace;
}

std::vector<double> run_monte_carlo(const ScenarioConfig& scenario, const PlannerConfig& config, std::size_t n_runs)
{
    if (n_runs < 1)
        throw ConfigError("n_runs", "must be at least 1");
    PlannerConfig inner = config;
    inner.workers = 1;
    std::vector<double> errors(n_runs);
    parallel_for(n_runs, config.workers, [&](std::size_t r) { errors[r] = run_episode(scenario, inner, r).mean_error; });
    return errors;
}

} // namespace rsmhp::uav
