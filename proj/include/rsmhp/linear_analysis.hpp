#pragma once

#include <cstddef>
#include <span>

#include "rsmhp/model.hpp"

namespace rsmhp {

/// x_{k+1} = A x_k + B u_k + w_k, w_k ~ N(0, noise_cov);  g(x, u) = C x + D u.
/// The path cost sums C x_k over the states reached, k = 1..H.
struct LinearModel
{
    Matrix A;
    Matrix B;
    Eigen::RowVectorXd C;
    Eigen::RowVectorXd D;
    Matrix noise_cov;
    std::size_t horizon = 1;
    /// Defaults to the origin when empty.
    Vector initial_state;

    void validate() const;

    /// Scalar model x' = a x + b u + w, g = c x + d u, w ~ N(0, variance).
    static LinearModel scalar(double a, double b, double c, double d, double variance, std::size_t horizon, double x0 = 0.0);
};

/// sum_{q=0}^{H-k-1} A^q.
Matrix power_sum(const Matrix& A, std::size_t horizon, std::size_t k);

/// Variance of one trajectory cost, C (sum_k P_k Sigma P_k^T) C^T with P_k = power_sum(A, H, k).
double var_p(const LinearModel& model);

/// var_p / (N eps^2), unclamped.
double chebyshev_bound_raw(const LinearModel& model, std::size_t n, double epsilon);

/// chebyshev_bound_raw clamped to [0, 1].
double chebyshev_bound(const LinearModel& model, std::size_t n, double epsilon);

/// Gaussian StochasticModel with the same dynamics. Its trajectory cost is
/// the path cost p = sum_{k=1}^{H} C x_k + sum_{k=0}^{H-1} D u_k, the quantity
/// whose variance var_p() gives.
StochasticModel to_stochastic_model(const LinearModel& model);

/// Exact E[p], i.e. the path cost of the noiseless rollout.
double linear_expected_cost(const LinearModel& model, const ControlSequence& controls);

/// Scalar LQG problem x_{k+1} = (1-a) x_k + a u_k + w_k,
/// cost r (x_H - T)^2 + sum u_k^2, w_k ~ N(0, sigma^2).
struct LqgParams
{
    double a = 0.5;
    double r = 10.0;
    double target = 1.0;
    double sigma = 1.0;
    double x0 = 0.0;
    std::size_t horizon = 2;

    void validate() const;
};

StochasticModel lqg_model(const LqgParams& params);

/// Closed-form E[cost]: r (mean x_H - T)^2 + sum u^2 + nbo_error(params).
double lqg_exact_cost(const LqgParams& params, const ControlSequence& controls);

/// r sigma^2 sum_{n=0}^{H-1} (1-a)^{2n}.
double nbo_error(const LqgParams& params);

/// One-dimensional control sequence from plain values.
ControlSequence scalar_controls(std::span<const double> values);
ControlSequence scalar_controls(std::initializer_list<double> values);

} // namespace rsmhp
