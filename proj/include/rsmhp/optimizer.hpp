#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

namespace rsmhp {

struct NelderMeadOptions
{
    std::size_t max_evaluations = 200;
    /// Edge length of the initial simplex (and of every restart simplex).
    double initial_step = 0.25;
    /// Stop a run once both the spread of vertex values and the simplex
    /// diameter fall below this.
    double tolerance = 1e-6;
    std::size_t max_restarts = 2;
    /// Box constraints; trial points are projected onto the box. Empty means
    /// unbounded.
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct OptimizationResult
{
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t restarts = 0;
};

/**
 * Nelder-Mead simplex descent with box projection and restarts.
 *
 * Deterministic. The returned point only changes on strict improvement, so
 * an objective that is constant in x returns `start` unchanged. When the
 * budget runs out the best point found so far is returned.
 */
OptimizationResult minimize_nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                                        const Eigen::VectorXd& start,
                                        const NelderMeadOptions& options);

} // namespace rsmhp
