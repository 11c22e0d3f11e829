#pragma once

#include <vector>

#include "rsmhp/model.hpp"

namespace testsupport {

inline rsmhp::Vector scalar(double x)
{
    return rsmhp::Vector::Constant(1, x);
}

/// x' = alpha x + beta u + w with a user-chosen noise law; cost sums the
/// stage term c x + d u over k = 0..H-1, no terminal term.
inline rsmhp::StochasticModel scalar_linear(double alpha,
                                            double beta,
                                            double c,
                                            double d,
                                            rsmhp::NoiseLaw noise,
                                            std::size_t horizon,
                                            double x0 = 0.0)
{
    rsmhp::StochasticModel m;
    m.transition = [=](const rsmhp::Vector& x, const rsmhp::Vector& u, const rsmhp::Vector& w) {
        return rsmhp::Vector(alpha * x + beta * u + w);
    };
    m.stage_cost = [=](const rsmhp::Vector& x, const rsmhp::Vector& u) { return c * x(0) + d * u(0); };
    m.noise = std::move(noise);
    m.horizon = horizon;
    m.initial_state = scalar(x0);
    return m;
}

inline std::vector<rsmhp::NoiseDraw> draws(std::initializer_list<double> values, double weight = 1.0)
{
    std::vector<rsmhp::NoiseDraw> out;
    for (double v : values)
        out.push_back({scalar(v), weight});
    return out;
}

} // namespace testsupport
