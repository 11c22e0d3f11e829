#include "rsmhp/linear_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "rsmhp/errors.hpp"

namespace rsmhp {

void LinearModel::validate() const
{
    const auto n = A.rows();
    if (n < 1 || n > kMaxDim || A.cols() != n)
        throw ConfigError("A", "must be square with dimension in [1, " + std::to_string(kMaxDim) + "]");
    if (B.rows() != n || B.cols() < 1 || B.cols() > kMaxDim)
        throw DimensionError("B", 0, static_cast<std::size_t>(n), static_cast<std::size_t>(B.rows()));
    if (C.size() != n)
        throw DimensionError("C", 0, static_cast<std::size_t>(n), static_cast<std::size_t>(C.size()));
    if (D.size() != B.cols())
        throw DimensionError("D", 0, static_cast<std::size_t>(B.cols()), static_cast<std::size_t>(D.size()));
    if (noise_cov.rows() != n || noise_cov.cols() != n)
        throw DimensionError("noise_cov", 0, static_cast<std::size_t>(n), static_cast<std::size_t>(noise_cov.rows()));
    if (horizon < 1)
        throw ConfigError("horizon", "must be at least 1");
    if (initial_state.size() != 0 && initial_state.size() != n)
        throw DimensionError("initial_state", 0, static_cast<std::size_t>(n),
                             static_cast<std::size_t>(initial_state.size()));
    if ((noise_cov - noise_cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError("noise_cov", "must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(noise_cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12)
        throw ConfigError("noise_cov", "must be positive semidefinite");
}

LinearModel LinearModel::scalar(double a, double b, double c, double d, double variance, std::size_t horizon, double x0)
{
    LinearModel m;
    m.A = Matrix::Constant(1, 1, a);
    m.B = Matrix::Constant(1, 1, b);
    m.C = Eigen::RowVectorXd::Constant(1, c);
    m.D = Eigen::RowVectorXd::Constant(1, d);
    m.noise_cov = Matrix::Constant(1, 1, variance);
    m.horizon = horizon;
    m.initial_state = Vector::Constant(1, x0);
    return m;
}

Matrix power_sum(const Matrix& A, std::size_t horizon, std::size_t k)
{
    if (A.rows() != A.cols())
        throw ConfigError("A", "must be square");
    if (k >= horizon)
        throw ConfigError("k", "must lie in [0, H-1]; got k=" + std::to_string(k) + ", H=" + std::to_string(horizon));
    const auto n = A.rows();
    Matrix sum = Matrix::Identity(n, n);
    Matrix power = Matrix::Identity(n, n);
    for (std::size_t q = 1; q < horizon - k; ++q) {
        power = power * A;
        sum += power;
    }
    return sum;
}

double var_p(const LinearModel& model)
{
    model.validate();
    const auto n = model.A.rows();
    Matrix accumulated = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < model.horizon; ++k) {
        const Matrix P = power_sum(model.A, model.horizon, k);
        accumulated += P * model.noise_cov * P.transpose();
    }
    const double v = (model.C * accumulated * model.C.transpose())(0, 0);
    return std::max(v, 0.0);
}

double chebyshev_bound_raw(const LinearModel& model, std::size_t n, double epsilon)
{
    if (n < 1)
        throw ConfigError("N", "must be at least 1");
    if (!(epsilon > 0.0))
        throw ConfigError("epsilon", "must be positive");
    return var_p(model) / (static_cast<double>(n) * epsilon * epsilon);
}

double chebyshev_bound(const LinearModel& model, std::size_t n, double epsilon)
{
    return std::clamp(chebyshev_bound_raw(model, n, epsilon), 0.0, 1.0);
}

StochasticModel to_stochastic_model(const LinearModel& model)
{
    model.validate();
    const auto n = model.A.rows();
    StochasticModel m;
    m.state_dim = static_cast<int>(n);
    m.control_dim = static_cast<int>(model.B.cols());
    m.horizon = model.horizon;
    m.initial_state = model.initial_state.size() == 0 ? Vector(Vector::Zero(n)) : model.initial_state;
    m.transition = [A = model.A, B = model.B](const Vector& x, const Vector& u, const Vector& w) -> Vector {
        return A * x + B * u + w;
    };
    // Path cost p = sum_{k=1}^{H} C x_k + sum_{k=0}^{H-1} D u_k: the stage terms
    // cover x_0..x_{H-1}, the terminal term adds x_H and removes the constant C x_0.
    m.stage_cost = [C = model.C, D = model.D](const Vector& x, const Vector& u) { return C.dot(x) + D.dot(u); };
    m.terminal_cost = [C = model.C, c0 = model.C.dot(m.initial_state)](const Vector& x) { return C.dot(x) - c0; };
    m.noise = NoiseLaw::gaussian(Vector::Zero(n), model.noise_cov);
    return m;
}

double linear_expected_cost(const LinearModel& model, const ControlSequence& controls)
{
    const StochasticModel m = to_stochastic_model(model);
    return nominal_rollout(m, controls).cost;
}

void LqgParams::validate() const
{
    if (!(a > 0.0 && a < 1.0))
        throw ConfigError("a", "must lie in (0, 1)");
    if (!(r > 0.0))
        throw ConfigError("r", "must be positive");
    if (!(sigma >= 0.0))
        throw ConfigError("sigma", "must be nonnegative");
    if (horizon < 1)
        throw ConfigError("horizon", "must be at least 1");
}

StochasticModel lqg_model(const LqgParams& params)
{
    params.validate();
    StochasticModel m;
    m.state_dim = 1;
    m.control_dim = 1;
    m.horizon = params.horizon;
    m.initial_state = Vector::Constant(1, params.x0);
    m.transition = [a = params.a](const Vector& x, const Vector& u, const Vector& w) -> Vector {
        return (1.0 - a) * x + a * u + w;
    };
    m.stage_cost = [](const Vector&, const Vector& u) { return u.squaredNorm(); };
    m.terminal_cost = [r = params.r, t = params.target](const Vector& x) { return r * (x[0] - t) * (x[0] - t); };
    m.noise = NoiseLaw::gaussian(0.0, params.sigma);
    return m;
}

double nbo_error(const LqgParams& params)
{
    params.validate();
    const double decay = (1.0 - params.a) * (1.0 - params.a);
    double sum = 0.0;
    double term = 1.0;
    for (std::size_t n = 0; n < params.horizon; ++n) {
        sum += term;
        term *= decay;
    }
    return params.r * params.sigma * params.sigma * sum;
}

double lqg_exact_cost(const LqgParams& params, const ControlSequence& controls)
{
    params.validate();
    if (controls.size() != params.horizon)
        throw DimensionError("controls", 0, params.horizon, controls.size());
    double mean = params.x0;
    double effort = 0.0;
    for (std::size_t k = 0; k < controls.size(); ++k) {
        if (controls[k].size() != 1)
            throw DimensionError("controls", k, 1, static_cast<std::size_t>(controls[k].size()));
        const double u = controls[k][0];
        mean = (1.0 - params.a) * mean + params.a * u;
        effort += u * u;
    }
    const double miss = mean - params.target;
    return params.r * miss * miss + effort + nbo_error(params);
}

ControlSequence scalar_controls(std::span<const double> values)
{
    ControlSequence controls;
    controls.reserve(values.size());
    for (double v : values)
        controls.push_back(Vector::Constant(1, v));
    return controls;
}

ControlSequence scalar_controls(std::initializer_list<double> values)
{
    return scalar_controls(std::span<const double>(values.begin(), values.size()));
}

} // namespace rsmhp
