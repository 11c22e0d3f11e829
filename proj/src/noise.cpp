#include "rsmhp/noise.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Cholesky>

#include "rsmhp/errors.hpp"

namespace rsmhp {

struct NoiseLaw::Impl
{
    Vector mean;
    Sampler sampler;
    std::vector<NoiseDraw> support;
};

NoiseLaw NoiseLaw::gaussian(const Vector& mean, const Matrix& covariance)
{
    const auto n = mean.size();
    if (n < 1 || n > kMaxDim)
        throw ConfigError("mean", "noise dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    if (covariance.rows() != n || covariance.cols() != n)
        throw DimensionError("covariance", 0, static_cast<std::size_t>(n), static_cast<std::size_t>(covariance.rows()));
    if (covariance.isZero(0.0))
        return degenerate(mean);

    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw NumericalError("gaussian noise covariance is not positive definite");
    const Matrix lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    const double log_norm = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det);

    auto impl = std::make_shared<Impl>();
    impl->mean = mean;
    impl->sampler = [mean, lower, log_norm, n](RandomStream& rng) {
        Vector z(n);
        for (Eigen::Index i = 0; i < n; ++i)
            z[i] = rng.normal();
        NoiseDraw draw;
        draw.value = mean + lower * z;
        draw.weight = std::exp(log_norm - 0.5 * z.squaredNorm());
        return draw;
    };
    return NoiseLaw(std::move(impl));
}

NoiseLaw NoiseLaw::gaussian(double mean, double sigma)
{
    if (!(sigma >= 0.0))
        throw ConfigError("sigma", "standard deviation must be nonnegative");
    Vector m(1);
    m << mean;
    Matrix cov(1, 1);
    cov << sigma * sigma;
    return gaussian(m, cov);
}

NoiseLaw NoiseLaw::discrete(std::vector<Vector> points, std::vector<double> probabilities)
{
    if (points.empty())
        throw ConfigError("points", "discrete law needs at least one support point");
    if (points.size() != probabilities.size())
        throw DimensionError("probabilities", 0, points.size(), probabilities.size());
    const auto n = points.front().size();
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != n)
            throw DimensionError("points", i, static_cast<std::size_t>(n), static_cast<std::size_t>(points[i].size()));
        if (!(probabilities[i] > 0.0))
            throw ConfigError("probabilities", "support probabilities must be positive");
        total += probabilities[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("probabilities", "support probabilities must sum to one");

    auto impl = std::make_shared<Impl>();
    impl->mean = Vector::Zero(n);
    for (std::size_t i = 0; i < points.size(); ++i) {
        impl->mean += probabilities[i] * points[i];
        impl->support.push_back({points[i], probabilities[i]});
    }
    std::vector<double> cumulative(probabilities.size());
    std::partial_sum(probabilities.begin(), probabilities.end(), cumulative.begin());
    impl->sampler = [support = impl->support, cumulative](RandomStream& rng) {
        const double u = rng.uniform() * cumulative.back();
        std::size_t i = 0;
        while (i + 1 < cumulative.size() && u >= cumulative[i])
            ++i;
        return support[i];
    };
    return NoiseLaw(std::move(impl));
}

NoiseLaw NoiseLaw::discrete(std::vector<double> points, std::vector<double> probabilities)
{
    std::vector<Vector> vectors;
    vectors.reserve(points.size());
    for (double p : points) {
        Vector v(1);
        v << p;
        vectors.push_back(v);
    }
    return discrete(std::move(vectors), std::move(probabilities));
}

NoiseLaw NoiseLaw::degenerate(const Vector& value)
{
    auto impl = std::make_shared<Impl>();
    impl->mean = value;
    impl->sampler = [value](RandomStream&) { return NoiseDraw{value, 1.0}; };
    return NoiseLaw(std::move(impl));
}

NoiseLaw NoiseLaw::custom(const Vector& mean, Sampler sampler)
{
    if (!sampler)
        throw ConfigError("sampler", "custom noise law needs a sampler");
    auto impl = std::make_shared<Impl>();
    impl->mean = mean;
    impl->sampler = std::move(sampler);
    return NoiseLaw(std::move(impl));
}

NoiseDraw NoiseLaw::sample(RandomStream& rng) const { return impl_->sampler(rng); }

const Vector& NoiseLaw::mean() const { return impl_->mean; }

int NoiseLaw::dim() const { return static_cast<int>(impl_->mean.size()); }

std::span<const NoiseDraw> NoiseLaw::support() const { return impl_->support; }

} // namespace rsmhp
