#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsmhp {

enum class ExperimentKind {
    LqgConvergence,
    ChebyshevCoverage,
    VarianceScaling,
    PruningStudy,
    UavMonteCarlo,
    CovarianceDecay,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
const std::vector<ExperimentKind>& all_experiment_kinds();

/**
 * A parsed experiment configuration.
 *
 * File format (INI style, '#' or ';' comments):
 *
 *     kind = LqgConvergence
 *     seed = 42
 *     output = results/lqg
 *     workers = 1
 *
 *     [LqgConvergence]
 *     a = 0.5
 *     controls = 0.55, 0.17
 *
 * Only the section named after `kind` is read; its keys are the
 * kind-specific parameters (see README for each kind's schema and defaults).
 */
struct ExperimentSpec
{
    ExperimentKind kind = ExperimentKind::LqgConvergence;
    std::map<std::string, std::string> parameters;
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir = "results";
    unsigned workers = 1;
};

/// Parses config text; throws ConfigError naming the offending field.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Typed access to ExperimentSpec::parameters. Each getter throws
/// ConfigError naming the key when the value is malformed or out of range.
class ParameterReader
{
public:
    explicit ParameterReader(const std::map<std::string, std::string>& parameters) : parameters_(parameters) {}

    double real(const std::string& key, double fallback);
    double real_in(const std::string& key, double fallback, double lo, double hi);
    std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 1);
    std::uint64_t u64(const std::string& key, std::uint64_t fallback);
    bool flag(const std::string& key, bool fallback);
    std::string text(const std::string& key, const std::string& fallback);
    std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
    std::vector<std::size_t> counts(const std::string& key, const std::vector<std::size_t>& fallback);

    /// Keys seen so far; used to reject unknown keys.
    void reject_unknown() const;

private:
    const std::map<std::string, std::string>& parameters_;
    std::vector<std::string> used_;
    const std::string* find(const std::string& key);
};

double parse_real(std::string_view field, std::string_view text);
std::uint64_t parse_u64(std::string_view field, std::string_view text);

} // namespace rsmhp
