#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsmhp/config.hpp"
#include "rsmhp/linear_analysis.hpp"
#include "rsmhp/sampler.hpp"
#include "rsmhp/uav.hpp"

namespace rsmhp {

/// Numeric result table. CSV output uses a header row, commas, LF line
/// endings and 17 significant digits, so parsing it back is lossless.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const;
    std::vector<double> values(std::string_view name) const;
    std::string to_csv() const;
    static Table from_csv(std::string_view text);
};

/// Shortest locale-independent text with 17 significant digits.
std::string format_real(double value);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Two-sided standard normal critical value for significance `alpha`.
double normal_critical_value(double alpha);

struct ScalarLinearParams
{
    double a = 0.5;
    double b = 0.0;
    double c = 1.0;
    double d = 0.0;
    double variance = 1.0;
    std::size_t horizon = 2;
    double x0 = 0.0;

    LinearModel model() const { return LinearModel::scalar(a, b, c, d, variance, horizon, x0); }
};

struct LqgConvergenceParams
{
    LqgParams lqg;
    std::vector<double> controls{0.55, 0.17};
    std::size_t p_min = 100;
    std::size_t p_max = 10000;
    std::size_t p_step = 100;
};

/// Columns P, J_MHP, J_NBO, J_exact, abs_err_mhp, abs_err_nbo. J_MHP is the
/// mean over P independent trajectories.
Table run_lqg_convergence(const LqgConvergenceParams& params, std::uint64_t seed, unsigned workers);

struct ChebyshevCoverageParams
{
    ScalarLinearParams linear;
    std::vector<std::size_t> n_values{100, 1000};
    std::vector<double> eps_multipliers{0.25, 0.5, 1.0};  // times sqrt(var_p)
    std::size_t replications = 1000;
};

/// Columns N, epsilon, exceed_fraction, bound_raw, bound_clamped, tolerance,
/// within. `tolerance` is the clamped bound plus three binomial standard
/// deviations at the bound.
Table run_chebyshev_coverage(const ChebyshevCoverageParams& params, std::uint64_t seed, unsigned workers);

struct VarianceScalingParams
{
    ScalarLinearParams linear;
    std::vector<std::size_t> n_values{100, 1000, 10000};
    std::size_t replications = 400;
};

/// Columns N, mean_estimate, replication_variance, predicted_variance.
Table run_variance_scaling(const VarianceScalingParams& params, std::uint64_t seed, unsigned workers);

struct PruningStudyParams
{
    LqgParams lqg{0.5, 10.0, 1.0, 1.0, 0.0, 4};
    std::vector<double> controls{0.55, 0.17, 0.17, 0.17};
    std::size_t branch_factor = 4;
    std::vector<std::size_t> prune_widths{1, 4, 16, 64};
    std::size_t replications = 200;
    NoiseSharing sharing = NoiseSharing::FreshPerNode;
};

/// Columns M, trajectories, mean_estimate, weighted_estimate, exact,
/// mean_abs_error, weighted_abs_error (averaged over replications).
Table run_pruning_study(const PruningStudyParams& params, std::uint64_t seed, unsigned workers);

struct CovarianceDecayParams
{
    ScalarLinearParams linear{1.0, 0.0, 1.0, 0.0, 1.0, 3, 0.0};
    std::size_t branch_factor = 3;
    std::size_t replications = 10000;
    NoiseSharing sharing = NoiseSharing::FreshPerNode;
};

/// Columns i, j, lag, covariance, std_error, z for every leaf pair with
/// |i - j| > N, from `replications` independently seeded trees.
Table run_covariance_decay(const CovarianceDecayParams& params, std::uint64_t seed, unsigned workers);

struct UavStudyParams
{
    uav::ScenarioConfig scenario;
    uav::PlannerConfig planner;
    std::vector<std::size_t> n_trajectories{50, 100, 250};
    bool include_nbo = true;
    std::size_t n_runs = 30;
};

/// Columns run, n_trajectories (0 for the NBO planner), mean_error.
Table run_uav_study(const UavStudyParams& params, std::uint64_t seed, unsigned workers);

/// Sorted errors with their empirical CDF; columns mean_error, cdf.
Table empirical_cdf(std::span<const double> values);

LqgConvergenceParams parse_lqg_convergence(const ExperimentSpec& spec);
ChebyshevCoverageParams parse_chebyshev_coverage(const ExperimentSpec& spec);
VarianceScalingParams parse_variance_scaling(const ExperimentSpec& spec);
PruningStudyParams parse_pruning_study(const ExperimentSpec& spec);
CovarianceDecayParams parse_covariance_decay(const ExperimentSpec& spec);
UavStudyParams parse_uav_study(const ExperimentSpec& spec);

/// Parses every kind-specific parameter; throws ConfigError on the first
/// invalid or unknown key.
void validate_spec(const ExperimentSpec& spec);

/// Summary statistics of the primary CSV table. Recomputing this from the
/// re-parsed CSV gives an identical JSON value.
nlohmann::json summarize(ExperimentKind kind, const Table& table);

/// File name of the primary CSV table for `kind`.
std::string primary_csv_name(ExperimentKind kind);

struct ExperimentOutcome
{
    std::vector<std::filesystem::path> files;
    nlohmann::json metadata;
};

/// Validates, runs and writes `<out>/<Kind>.csv` (plus per-planner CDF files
/// for UavMonteCarlo) and `<out>/<Kind>.json`. Files are written to a
/// temporary name and renamed into place.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

} // namespace rsmhp
