#include "rsmhp/optimizer.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "rsmhp/errors.hpp"

namespace rsmhp {

namespace {

struct Vertex
{
    Eigen::VectorXd x;
    double f;
};

} // namespace

OptimizationResult minimize_nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                                        const Eigen::VectorXd& start,
                                        const NelderMeadOptions& options)
{
    const auto n = start.size();
    if (n < 1)
        throw ConfigError("start", "optimization needs at least one variable");
    const bool bounded = options.lower.size() != 0 || options.upper.size() != 0;
    if (bounded && (options.lower.size() != n || options.upper.size() != n))
        throw DimensionError("bounds", 0, static_cast<std::size_t>(n), static_cast<std::size_t>(options.lower.size()));

    auto project = [&](Eigen::VectorXd x) {
        if (bounded)
            x = x.cwiseMax(options.lower).cwiseMin(options.upper);
        return x;
    };

    OptimizationResult best;
    best.x = project(start);
    best.value = objective(best.x);
    best.evaluations = 1;
    const std::size_t budget = std::max<std::size_t>(options.max_evaluations, 1);

    auto evaluate = [&](const Eigen::VectorXd& x) {
        const double f = objective(x);
        ++best.evaluations;
        if (f < best.value) {
            best.value = f;
            best.x = x;
        }
        return f;
    };

    for (std::size_t run = 0; run <= options.max_restarts && best.evaluations < budget; ++run) {
        const double run_start_value = best.value;
        std::vector<Vertex> simplex;
        simplex.push_back({best.x, best.value});
        for (Eigen::Index i = 0; i < n && best.evaluations < budget; ++i) {
            Eigen::VectorXd x = best.x;
            double step = options.initial_step;
            if (bounded && x[i] + step > options.upper[i])
                step = -step;
            x[i] += step;
            x = project(x);
            simplex.push_back({x, evaluate(x)});
        }
        if (static_cast<Eigen::Index>(simplex.size()) < n + 1)
            break;

        while (best.evaluations < budget) {
            std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
            const double spread = simplex.back().f - simplex.front().f;
            double diameter = 0.0;
            for (const Vertex& v : simplex)
                diameter = std::max(diameter, (v.x - simplex.front().x).lpNorm<Eigen::Infinity>());
            if (spread <= options.tolerance && diameter <= options.tolerance)
                break;

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (Eigen::Index i = 0; i < n; ++i)
                centroid += simplex[i].x;
            centroid /= static_cast<double>(n);
            Vertex& worst = simplex.back();

            const Eigen::VectorXd reflected = project(centroid + (centroid - worst.x));
            const double fr = evaluate(reflected);
            if (fr < simplex.front().f) {
                if (best.evaluations >= budget) {
                    worst = {reflected, fr};
                    break;
                }
                const Eigen::VectorXd expanded = project(centroid + 2.0 * (centroid - worst.x));
                const double fe = evaluate(expanded);
                worst = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
                continue;
            }
            if (fr < simplex[n - 1].f) {
                worst = {reflected, fr};
                continue;
            }
            if (best.evaluations >= budget)
                break;
            const bool outside = fr < worst.f;
            const Eigen::VectorXd contracted =
                outside ? Eigen::VectorXd(project(centroid + 0.5 * (reflected - centroid)))
                        : Eigen::VectorXd(project(centroid + 0.5 * (worst.x - centroid)));
            const double fc = evaluate(contracted);
            if (fc < std::min(fr, worst.f)) {
                worst = {contracted, fc};
                continue;
            }
            // Shrink toward the best vertex.
            for (std::size_t i = 1; i < simplex.size() && best.evaluations < budget; ++i) {
                simplex[i].x = project(simplex.front().x + 0.5 * (simplex[i].x - simplex.front().x));
                simplex[i].f = evaluate(simplex[i].x);
            }
        }
        if (run > 0)
            ++best.restarts;
        if (run > 0 && !(best.value < run_start_value))
            break;
    }
    return best;
}

} // namespace rsmhp
