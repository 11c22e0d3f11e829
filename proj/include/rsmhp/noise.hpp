#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rsmhp/random.hpp"

namespace rsmhp {

/// Largest state / control / noise dimension. Vectors of this capacity live
/// on the stack, which keeps trajectory rollouts allocation-free.
inline constexpr int kMaxDim = 16;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::MatrixXd;

/// One noise realization and its weight (probability mass for discrete laws,
/// density for continuous ones).
struct NoiseDraw
{
    Vector value;
    double weight = 1.0;
};

/**
 * Distribution of the per-step disturbance w_k.
 *
 * A NoiseLaw is an immutable value; copies share the underlying
 * implementation. `mean()` is the nominal disturbance used by the NBO
 * baseline. Laws with finite support also expose the support points so that
 * a scenario tree can enumerate them exactly.
 */
class NoiseLaw
{
public:
    using Sampler = std::function<NoiseDraw(RandomStream&)>;

    /// Multivariate normal. An all-zero covariance yields the degenerate law
    /// at `mean`; otherwise the covariance must be positive definite.
    static NoiseLaw gaussian(const Vector& mean, const Matrix& covariance);
    static NoiseLaw gaussian(double mean, double sigma);

    /// Finite-support law. Probabilities must be positive and sum to one
    /// (within 1e-12).
    static NoiseLaw discrete(std::vector<Vector> points, std::vector<double> probabilities);
    static NoiseLaw discrete(std::vector<double> points, std::vector<double> probabilities);

    /// Point mass at `value` with weight 1.
    static NoiseLaw degenerate(const Vector& value);

    /// User supplied sampler. The sampler must be a pure function of the
    /// stream state.
    static NoiseLaw custom(const Vector& mean, Sampler sampler);

    NoiseDraw sample(RandomStream& rng) const;
    const Vector& mean() const;
    int dim() const;

    /// Support points with their probabilities; empty for continuous laws.
    std::span<const NoiseDraw> support() const;
    bool finite_support() const { return !support().empty(); }

private:
    struct Impl;
    explicit NoiseLaw(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

} // namespace rsmhp
