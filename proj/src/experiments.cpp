#include "rsmhp/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <system_error>

#include <boost/math/distributions/normal.hpp>

#include "rsmhp/errors.hpp"
#include "rsmhp/estimators.hpp"
#include "rsmhp/parallel.hpp"
#include "rsmhp/version.hpp"

namespace rsmhp {

namespace {

std::uint64_t replication_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
    return derive_key(domain_key(seed, StreamDomain::Replication), path);
}

double mean_of(std::span<const double> v)
{
    double sum = 0.0;
    for (double x : v)
        sum += x;
    return sum / static_cast<double>(v.size());
}

double unbiased_variance(std::span<const double> v)
{
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> independent_means(const StochasticModel& model,
                                      const ControlSequence& controls,
                                      std::size_t n,
                                      std::size_t replications,
                                      std::uint64_t seed,
                                      unsigned workers)
{
    std::vector<double> estimates(replications);
    parallel_for(replications, workers, [&](std::size_t r) {
        SamplerConfig cfg;
        cfg.branch_factor = n;
        cfg.master_seed = replication_key(seed, {n, r});
        estimates[r] = estimate_mean(sample_independent(model, controls, cfg)).value;
    });
    return estimates;
}

ControlSequence zero_controls(const LinearModel& model)
{
    return ControlSequence(model.horizon, Vector::Zero(model.B.cols()));
}

void check_lqg_controls(const LqgParams& lqg, const std::vector<double>& controls)
{
    if (controls.size() != lqg.horizon)
        throw ConfigError("controls", "needs one control per horizon step (" + std::to_string(lqg.horizon) + ")");
}

NoiseSharing parse_sharing(ParameterReader& reader, NoiseSharing fallback)
{
    const std::string text =
        reader.text("noise_sharing", fallback == NoiseSharing::FreshPerNode ? "FreshPerNode" : "SharedPerDepth");
    if (text == "FreshPerNode")
        return NoiseSharing::FreshPerNode;
    if (text == "SharedPerDepth")
        return NoiseSharing::SharedPerDepth;
    throw ConfigError("noise_sharing", "expected FreshPerNode or SharedPerDepth, got '" + text + "'");
}

ScalarLinearParams parse_scalar_linear(ParameterReader& reader, ScalarLinearParams p)
{
    p.a = reader.real("A", p.a);
    p.b = reader.real("B", p.b);
    p.c = reader.real("C", p.c);
    p.d = reader.real("D", p.d);
    p.variance = reader.real_in("variance", p.variance, 0.0, 1e300);
    p.horizon = reader.count("horizon", p.horizon);
    p.x0 = reader.real("x0", p.x0);
    p.model().validate();
    return p;
}

LqgParams parse_lqg(ParameterReader& reader, LqgParams p, std::vector<double>& controls)
{
    p.a = reader.real("a", p.a);
    p.r = reader.real("r", p.r);
    p.target = reader.real("T", p.target);
    p.sigma = reader.real("sigma", p.sigma);
    p.x0 = reader.real("x0", p.x0);
    controls = reader.reals("controls", controls);
    p.horizon = controls.size();
    p.validate();
    return p;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write '" + temp.string() + "'");
        out << content;
        out.flush();
        if (!out)
            throw Error("failed writing '" + temp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec)
        throw Error("cannot rename '" + temp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::string planner_label(std::size_t n_trajectories)
{
    return n_trajectories == 0 ? "nbo" : "nt" + std::to_string(n_trajectories);
}

} // namespace

// ---------------------------------------------------------------------------
// Table

std::size_t Table::column(std::string_view name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw ConfigError(std::string(name), "no such column");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::values(std::string_view name) const
{
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows)
        out.push_back(row[c]);
    return out;
}

std::string format_real(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, ptr);
}

std::string Table::to_csv() const
{
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c)
            out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += format_real(row[c]);
        }
        out += '\n';
    }
    return out;
}

Table Table::from_csv(std::string_view text)
{
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return cells;
    };

    Table table;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (header) {
            for (auto cell : cells)
                table.columns.emplace_back(cell);
            header = false;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw DimensionError("csv row", table.rows.size(), table.columns.size(), cells.size());
        std::vector<double> row;
        for (auto cell : cells)
            row.push_back(parse_real("csv", cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw DimensionError("loglog_slope", 0, x.size(), y.size());
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw NumericalError("loglog_slope needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double mx = mean_of(lx);
    const double my = mean_of(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

double normal_critical_value(double alpha)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

Table empirical_cdf(std::span<const double> values)
{
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Table t{{"mean_error", "cdf"}, {}};
    for (std::size_t i = 0; i < sorted.size(); ++i)
        t.rows.push_back({sorted[i], static_cast<double>(i + 1) / static_cast<double>(sorted.size())});
    return t;
}

// ---------------------------------------------------------------------------
// Experiment runners

Table run_lqg_convergence(const LqgConvergenceParams& params, std::uint64_t seed, unsigned workers)
{
    check_lqg_controls(params.lqg, params.controls);
    if (params.p_min < 1 || params.p_step < 1 || params.p_max < params.p_min)
        throw ConfigError("p_min", "grid needs 1 <= p_min <= p_max and p_step >= 1");
    const StochasticModel model = lqg_model(params.lqg);
    const ControlSequence controls = scalar_controls(params.controls);
    const double exact = lqg_exact_cost(params.lqg, controls);
    const double nbo = estimate_nbo(model, controls).value;

    Table table{{"P", "J_MHP", "J_NBO", "J_exact", "abs_err_mhp", "abs_err_nbo"}, {}};
    for (std::size_t p = params.p_min; p <= params.p_max; p += params.p_step) {
        SamplerConfig cfg;
        cfg.branch_factor = p;
        cfg.master_seed = replication_key(seed, {p});
        cfg.workers = workers;
        const double mhp = estimate_mean(sample_independent(model, controls, cfg)).value;
        table.rows.push_back({static_cast<double>(p), mhp, nbo, exact, std::abs(mhp - exact), std::abs(nbo - exact)});
    }
    return table;
}

Table run_chebyshev_coverage(const ChebyshevCoverageParams& params, std::uint64_t seed, unsigned workers)
{
    const LinearModel linear = params.linear.model();
    const double vp = var_p(linear);
    if (!(vp > 0.0))
        throw ConfigError("variance", "coverage study needs a noisy model (var_p > 0)");
    if (params.replications < 2)
        throw ConfigError("replications", "must be at least 2");
    const StochasticModel model = to_stochastic_model(linear);
    const ControlSequence controls = zero_controls(linear);
    const double exact = linear_expected_cost(linear, controls);
    const double reps = static_cast<double>(params.replications);

    Table table{{"N", "epsilon", "exceed_fraction", "bound_raw", "bound_clamped", "tolerance", "within"}, {}};
    for (std::size_t n : params.n_values) {
        const std::vector<double> estimates = independent_means(model, controls, n, params.replications, seed, workers);
        for (double mult : params.eps_multipliers) {
            const double eps = mult * std::sqrt(vp);
            const auto exceed = std::count_if(estimates.begin(), estimates.end(),
                                              [&](double e) { return std::abs(e - exact) >= eps; });
            const double fraction = static_cast<double>(exceed) / reps;
            const double raw = chebyshev_bound_raw(linear, n, eps);
            const double clamped = chebyshev_bound(linear, n, eps);
            const double tolerance = clamped + 3.0 * std::sqrt(clamped * (1.0 - clamped) / reps);
            table.rows.push_back({static_cast<double>(n), eps, fraction, raw, clamped, tolerance,
                                  fraction <= tolerance ? 1.0 : 0.0});
        }
    }
    return table;
}

Table run_variance_scaling(const VarianceScalingParams& params, std::uint64_t seed, unsigned workers)
{
    const LinearModel linear = params.linear.model();
    if (params.replications < 2)
        throw ConfigError("replications", "must be at least 2");
    const double vp = var_p(linear);
    const StochasticModel model = to_stochastic_model(linear);
    const ControlSequence controls = zero_controls(linear);

    Table table{{"N", "mean_estimate", "replication_variance", "predicted_variance"}, {}};
    for (std::size_t n : params.n_values) {
        const std::vector<double> estimates = independent_means(model, controls, n, params.replications, seed, workers);
        table.rows.push_back({static_cast<double>(n), mean_of(estimates), unbiased_variance(estimates),
                              vp / static_cast<double>(n)});
    }
    return table;
}

Table run_pruning_study(const PruningStudyParams& params, std::uint64_t seed, unsigned workers)
{
    check_lqg_controls(params.lqg, params.controls);
    const StochasticModel model = lqg_model(params.lqg);
    const ControlSequence controls = scalar_controls(params.controls);
    const double exact = lqg_exact_cost(params.lqg, controls);
    const double reps = static_cast<double>(params.replications);

    Table table{{"M", "trajectories", "mean_estimate", "weighted_estimate", "exact", "mean_abs_error",
                 "weighted_abs_error"},
                {}};
    for (std::size_t width : params.prune_widths) {
        std::vector<double> mean_est(params.replications), weighted_est(params.replications);
        std::vector<double> sizes(params.replications);
        parallel_for(params.replications, workers, [&](std::size_t r) {
            SamplerConfig cfg;
            cfg.branch_factor = params.branch_factor;
            cfg.prune_width = width;
            cfg.noise_sharing = params.sharing;
            cfg.master_seed = replication_key(seed, {r});
            const TrajectorySet set = sample_tree_pruned(model, controls, cfg);
            mean_est[r] = estimate_mean(set).value;
            weighted_est[r] = estimate_weighted(set).value;
            sizes[r] = static_cast<double>(set.size());
        });
        double mean_err = 0.0, weighted_err = 0.0;
        for (std::size_t r = 0; r < params.replications; ++r) {
            mean_err += std::abs(mean_est[r] - exact);
            weighted_err += std::abs(weighted_est[r] - exact);
        }
        table.rows.push_back({static_cast<double>(width), sizes.front(), mean_of(mean_est), mean_of(weighted_est),
                              exact, mean_err / reps, weighted_err / reps});
    }
    return table;
}

Table run_covariance_decay(const CovarianceDecayParams& params, std::uint64_t seed, unsigned workers)
{
    const LinearModel linear = params.linear.model();
    const StochasticModel model = to_stochastic_model(linear);
    const ControlSequence controls = zero_controls(linear);
    const auto leaves = tree_size(params.branch_factor, linear.horizon, 1'000'000);
    if (!leaves)
        throw ConfigError("branch_factor", "tree too large for a covariance study");
    if (params.replications < 2)
        throw ConfigError("replications", "must be at least 2");

    const std::size_t reps = params.replications;
    std::vector<std::vector<double>> costs(reps);
    parallel_for(reps, workers, [&](std::size_t r) {
        SamplerConfig cfg;
        cfg.branch_factor = params.branch_factor;
        cfg.noise_sharing = params.sharing;
        cfg.master_seed = replication_key(seed, {r});
        const TrajectorySet set = sample_tree(model, controls, cfg);
        costs[r].reserve(set.size());
        for (const Trajectory& t : set.trajectories)
            costs[r].push_back(t.cost);
    });

    std::vector<double> means(*leaves, 0.0);
    for (const auto& row : costs)
        for (std::size_t i = 0; i < *leaves; ++i)
            means[i] += row[i];
    for (double& m : means)
        m /= static_cast<double>(reps);

    Table table{{"i", "j", "lag", "covariance", "std_error", "z"}, {}};
    std::vector<double> products(reps);
    for (std::size_t i = 0; i < *leaves; ++i) {
        for (std::size_t j = i + params.branch_factor + 1; j < *leaves; ++j) {
            for (std::size_t r = 0; r < reps; ++r)
                products[r] = (costs[r][i] - means[i]) * (costs[r][j] - means[j]);
            const double cov = mean_of(products) * static_cast<double>(reps) / static_cast<double>(reps - 1);
            const double se = std::sqrt(unbiased_variance(products) / static_cast<double>(reps));
            table.rows.push_back({static_cast<double>(i), static_cast<double>(j), static_cast<double>(j - i), cov, se,
                                  se > 0.0 ? cov / se : 0.0});
        }
    }
    return table;
}

Table run_uav_study(const UavStudyParams& params, std::uint64_t seed, unsigned workers)
{
    uav::ScenarioConfig scenario = params.scenario;
    scenario.seed = seed;
    scenario.validate();
    uav::PlannerConfig base = params.planner;
    base.master_seed = seed;
    base.workers = workers;
    base.validate();

    std::vector<std::size_t> planners;
    if (params.include_nbo)
        planners.push_back(0);
    planners.insert(planners.end(), params.n_trajectories.begin(), params.n_trajectories.end());

    Table table{{"run", "n_trajectories", "mean_error"}, {}};
    for (std::size_t nt : planners) {
        uav::PlannerConfig config = base;
        config.objective = nt == 0 ? uav::Objective::NBO : uav::Objective::RSMHP;
        config.n_trajectories = nt == 0 ? 1 : nt;
        const std::vector<double> errors = uav::run_monte_carlo(scenario, config, params.n_runs);
        for (std::size_t r = 0; r < errors.size(); ++r)
            table.rows.push_back({static_cast<double>(r), static_cast<double>(nt), errors[r]});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Configuration

LqgConvergenceParams parse_lqg_convergence(const ExperimentSpec& spec)
{
    ParameterReader reader(spec.parameters);
    LqgConvergenceParams p;
    p.lqg = parse_lqg(reader, p.lqg, p.controls);
    p.p_min = reader.count("p_min", p.p_min);
    p.p_max = reader.count("p_max", p.p_max);
    p.p_step = reader.count("p_step", p.p_step);
    if (p.p_max < p.p_min)
        throw ConfigError("p_max", "must be at least p_min");
    reader.reject_unknown();
    return p;
}

ChebyshevCoverageParams parse_chebyshev_coverage(const ExperimentSpec& spec)
{
    ParameterReader reader(spec.parameters);
    ChebyshevCoverageParams p;
    p.linear = parse_scalar_linear(reader, p.linear);
    if (!(p.linear.variance > 0.0))
        throw ConfigError("variance", "must be positive for a coverage study");
    p.n_values = reader.counts("n_values", p.n_values);
    p.eps_multipliers = reader.reals("eps_multipliers", p.eps_multipliers);
    for (double m : p.eps_multipliers)
        if (!(m > 0.0))
            throw ConfigError("eps_multipliers", "entries must be positive");
    p.replications = reader.count("replications", p.replications, 2);
    reader.reject_unknown();
    return p;
}

VarianceScalingParams parse_variance_scaling(const ExperimentSpec& spec)
{
    ParameterReader reader(spec.parameters);
    VarianceScalingParams p;
    p.linear = parse_scalar_linear(reader, p.linear);
    p.n_values = reader.counts("n_values", p.n_values);
    if (p.n_values.size() < 2)
        throw ConfigError("n_values", "need at least two sample sizes for a slope");
    p.replications = reader.count("replications", p.replications, 2);
    reader.reject_unknown();
    return p;
}

PruningStudyParams parse_pruning_study(const ExperimentSpec& spec)
{
    ParameterReader reader(spec.parameters);
    PruningStudyParams p;
    p.lqg = parse_lqg(reader, p.lqg, p.controls);
    p.branch_factor = reader.count("branch_factor", p.branch_factor);
    p.prune_widths = reader.counts("prune_widths", p.prune_widths);
    p.replications = reader.count("replications", p.replications);
    p.sharing = parse_sharing(reader, p.sharing);
    reader.reject_unknown();
    return p;
}

CovarianceDecayParams parse_covariance_decay(const ExperimentSpec& spec)
{
    ParameterReader reader(spec.parameters);
    CovarianceDecayParams p;
    p.linear = parse_scalar_linear(reader, p.linear);
    p.branch_factor = reader.count("branch_factor", p.branch_factor);
    p.replications = reader.count("replications", p.replications, 2);
    p.sharing = parse_sharing(reader, p.sharing);
    if (!tree_size(p.branch_factor, p.linear.horizon, 1'000'000))
        throw ConfigError("branch_factor", "tree too large for a covariance study");
    reader.reject_unknown();
    return p;
}

UavStudyParams parse_uav_study(const ExperimentSpec& spec)
{
    ParameterReader reader(spec.parameters);
    UavStudyParams p;
    uav::ScenarioConfig& s = p.scenario;
    s.dt = reader.real("dt", s.dt);
    s.episode_length = reader.count("episode_length", s.episode_length);
    s.limits.speed_min = reader.real("speed_min", s.limits.speed_min);
    s.limits.speed_max = reader.real("speed_max", s.limits.speed_max);
    s.limits.accel_max = reader.real("accel_max", s.limits.accel_max);
    s.limits.bank_max = reader.real("bank_max_deg", s.limits.bank_max * 180.0 / std::numbers::pi) *
                        std::numbers::pi / 180.0;
    s.sensor.sigma0 = reader.real("sensor_sigma0", s.sensor.sigma0);
    s.sensor.eta = reader.real("sensor_eta", s.sensor.eta);
    s.target_noise = reader.real("target_noise", s.target_noise);
    s.target_speed = reader.real("target_speed", s.target_speed);
    s.initial_range = reader.real("initial_range", s.initial_range);
    s.uav_speed = reader.real("uav_speed", s.uav_speed);
    s.initial_position_sigma = reader.real("initial_position_sigma", s.initial_position_sigma);
    s.initial_velocity_sigma = reader.real("initial_velocity_sigma", s.initial_velocity_sigma);
    s.validate();

    p.planner.horizon = reader.count("horizon", p.planner.horizon);
    p.planner.max_evaluations = reader.count("max_evaluations", p.planner.max_evaluations);
    p.planner.max_restarts = reader.count("max_restarts", p.planner.max_restarts, 0);
    p.planner.validate();
    p.n_trajectories = reader.counts("n_trajectories", p.n_trajectories);
    p.include_nbo = reader.flag("include_nbo", p.include_nbo);
    p.n_runs = reader.count("n_runs", p.n_runs);
    reader.reject_unknown();
    return p;
}

void validate_spec(const ExperimentSpec& spec)
{
    switch (spec.kind) {
    case ExperimentKind::LqgConvergence: parse_lqg_convergence(spec); break;
    case ExperimentKind::ChebyshevCoverage: parse_chebyshev_coverage(spec); break;
    case ExperimentKind::VarianceScaling: parse_variance_scaling(spec); break;
    case ExperimentKind::PruningStudy: parse_pruning_study(spec); break;
    case ExperimentKind::UavMonteCarlo: parse_uav_study(spec); break;
    case ExperimentKind::CovarianceDecay: parse_covariance_decay(spec); break;
    }
}

// ---------------------------------------------------------------------------
// Summaries and orchestration

nlohmann::json summarize(ExperimentKind kind, const Table& table)
{
    nlohmann::json summary;
    summary["rows"] = table.rows.size();
    nlohmann::json columns = nlohmann::json::object();
    for (const std::string& name : table.columns) {
        const std::vector<double> v = table.values(name);
        if (v.empty())
            continue;
        columns[name] = {{"mean", mean_of(v)},
                         {"min", *std::min_element(v.begin(), v.end())},
                         {"max", *std::max_element(v.begin(), v.end())}};
    }
    summary["columns"] = columns;

    switch (kind) {
    case ExperimentKind::LqgConvergence:
        if (!table.rows.empty()) {
            summary["final_P"] = table.rows.back()[table.column("P")];
            summary["final_abs_err_mhp"] = table.rows.back()[table.column("abs_err_mhp")];
        }
        break;
    case ExperimentKind::ChebyshevCoverage: {
        const auto within = table.values("within");
        summary["all_within"] = std::all_of(within.begin(), within.end(), [](double w) { return w == 1.0; });
        break;
    }
    case ExperimentKind::VarianceScaling:
        summary["loglog_slope"] = loglog_slope(table.values("N"), table.values("replication_variance"));
        break;
    case ExperimentKind::PruningStudy: break;
    case ExperimentKind::CovarianceDecay: {
        const auto z = table.values("z");
        double max_abs = 0.0;
        for (double v : z)
            max_abs = std::max(max_abs, std::abs(v));
        // Bonferroni over all tested pairs, family-wise significance 0.01.
        const double critical = z.empty() ? 0.0 : normal_critical_value(0.01 / static_cast<double>(z.size()));
        summary["pairs"] = z.size();
        summary["max_abs_z"] = max_abs;
        summary["critical_z"] = critical;
        summary["zero_covariance_not_rejected"] = max_abs <= critical;
        break;
    }
    case ExperimentKind::UavMonteCarlo: {
        std::vector<double> order;
        std::map<double, std::vector<double>> groups;
        const std::size_t nt_col = table.column("n_trajectories");
        const std::size_t err_col = table.column("mean_error");
        for (const auto& row : table.rows) {
            if (!groups.contains(row[nt_col]))
                order.push_back(row[nt_col]);
            groups[row[nt_col]].push_back(row[err_col]);
        }
        nlohmann::json planners = nlohmann::json::array();
        for (double nt : order) {
            const auto& errors = groups[nt];
            planners.push_back({{"planner", planner_label(static_cast<std::size_t>(nt))},
                                {"n_trajectories", nt},
                                {"mean_error", mean_of(errors)},
                                {"median_error", median_of(errors)}});
        }
        summary["planners"] = planners;
        break;
    }
    }
    return summary;
}

std::string primary_csv_name(ExperimentKind kind)
{
    return std::string(to_string(kind)) + ".csv";
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec)
{
    validate_spec(spec);
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t seed = spec.master_seed;
    const unsigned workers = spec.workers;

    Table table;
    std::vector<std::pair<std::string, Table>> extra;
    switch (spec.kind) {
    case ExperimentKind::LqgConvergence: table = run_lqg_convergence(parse_lqg_convergence(spec), seed, workers); break;
    case ExperimentKind::ChebyshevCoverage:
        table = run_chebyshev_coverage(parse_chebyshev_coverage(spec), seed, workers);
        break;
    case ExperimentKind::VarianceScaling: table = run_variance_scaling(parse_variance_scaling(spec), seed, workers); break;
    case ExperimentKind::PruningStudy: table = run_pruning_study(parse_pruning_study(spec), seed, workers); break;
    case ExperimentKind::CovarianceDecay: table = run_covariance_decay(parse_covariance_decay(spec), seed, workers); break;
    case ExperimentKind::UavMonteCarlo: {
        table = run_uav_study(parse_uav_study(spec), seed, workers);
        std::map<double, std::vector<double>> groups;
        std::vector<double> order;
        for (const auto& row : table.rows) {
            if (!groups.contains(row[1]))
                order.push_back(row[1]);
            groups[row[1]].push_back(row[2]);
        }
        for (double nt : order)
            extra.emplace_back("uav_cdf_" + planner_label(static_cast<std::size_t>(nt)) + ".csv",
                               empirical_cdf(groups[nt]));
        break;
    }
    }

    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec || !std::filesystem::is_directory(spec.output_dir))
        throw Error("cannot create output directory '" + spec.output_dir.string() + "'");

    ExperimentOutcome outcome;
    const std::filesystem::path primary = spec.output_dir / primary_csv_name(spec.kind);
    write_atomic(primary, table.to_csv());
    outcome.files.push_back(primary);
    for (const auto& [name, t] : extra) {
        write_atomic(spec.output_dir / name, t.to_csv());
        outcome.files.push_back(spec.output_dir / name);
    }

    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : outcome.files)
        files.push_back(f.filename().string());
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    outcome.metadata = {{"kind", std::string(to_string(spec.kind))},
                        {"seed", spec.master_seed},
                        {"workers", spec.workers},
                        {"output", spec.output_dir.string()},
                        {"parameters", spec.parameters},
                        {"version", kVersion},
                        {"wall_time_seconds", wall},
                        {"files", files},
                        {"summary", summarize(spec.kind, table)}};
    const std::filesystem::path meta = spec.output_dir / (std::string(to_string(spec.kind)) + ".json");
    write_atomic(meta, outcome.metadata.dump(2) + "\n");
    outcome.files.push_back(meta);
    return outcome;
}

} // namespace rsmhp
