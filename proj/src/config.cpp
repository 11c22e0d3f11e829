#include "rsmhp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rsmhp/errors.hpp"

namespace rsmhp {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::LqgConvergence, "LqgConvergence"},
    {ExperimentKind::ChebyshevCoverage, "ChebyshevCoverage"},
    {ExperimentKind::VarianceScaling, "VarianceScaling"},
    {ExperimentKind::PruningStudy, "PruningStudy"},
    {ExperimentKind::UavMonteCarlo, "UavMonteCarlo"},
    {ExperimentKind::CovarianceDecay, "CovarianceDecay"},
};

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
        items.push_back(boost::algorithm::trim_copy(item));
    return items;
}

} // namespace

std::string_view to_string(ExperimentKind kind)
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind)
            return name;
    return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name)
{
    for (const auto& [k, n] : kKindNames)
        if (n == name)
            return k;
    return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiment_kinds()
{
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> out;
        for (const auto& entry : kKindNames)
            out.push_back(entry.first);
        return out;
    }();
    return kinds;
}

double parse_real(std::string_view field, std::string_view text)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(std::string(field), "expected a real number, got '" + std::string(text) + "'");
    return value;
}

std::uint64_t parse_u64(std::string_view field, std::string_view text)
{
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(std::string(field), "expected an unsigned integer, got '" + std::string(text) + "'");
    return value;
}

ExperimentSpec parse_spec(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream stream(text);
    try {
        pt::read_ini(stream, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
    }

    ExperimentSpec spec;
    bool have_kind = false;
    for (const auto& [key, node] : tree) {
        if (!node.empty())
            continue;  // a section
        const std::string value = node.get_value<std::string>();
        if (key == "kind") {
            const auto kind = parse_experiment_kind(value);
            if (!kind)
                throw ConfigError("kind", "unknown experiment kind '" + value + "'");
            spec.kind = *kind;
            have_kind = true;
        } else if (key == "seed") {
            spec.master_seed = parse_u64("seed", value);
        } else if (key == "output") {
            if (value.empty())
                throw ConfigError("output", "must not be empty");
            spec.output_dir = value;
        } else if (key == "workers") {
            const auto w = parse_u64("workers", value);
            if (w < 1 || w > 1024)
                throw ConfigError("workers", "must lie in [1, 1024]");
            spec.workers = static_cast<unsigned>(w);
        } else {
            throw ConfigError(key, "unknown top-level key");
        }
    }
    if (!have_kind)
        throw ConfigError("kind", "missing experiment kind");

    if (const auto section = tree.get_child_optional(std::string(to_string(spec.kind)))) {
        for (const auto& [key, node] : *section) {
            if (!node.empty())
                throw ConfigError(key, "nested sections are not supported");
            spec.parameters[key] = node.get_value<std::string>();
        }
    }
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config", "cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec(buffer.str());
}

const std::string* ParameterReader::find(const std::string& key)
{
    used_.push_back(key);
    const auto it = parameters_.find(key);
    return it == parameters_.end() ? nullptr : &it->second;
}

double ParameterReader::real(const std::string& key, double fallback)
{
    const std::string* value = find(key);
    return value ? parse_real(key, *value) : fallback;
}

double ParameterReader::real_in(const std::string& key, double fallback, double lo, double hi)
{
    const double v = real(key, fallback);
    if (!(v >= lo && v <= hi))
        throw ConfigError(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

std::size_t ParameterReader::count(const std::string& key, std::size_t fallback, std::size_t min)
{
    const std::string* value = find(key);
    const std::uint64_t v = value ? parse_u64(key, *value) : fallback;
    if (v < min)
        throw ConfigError(key, "must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

std::uint64_t ParameterReader::u64(const std::string& key, std::uint64_t fallback)
{
    const std::string* value = find(key);
    return value ? parse_u64(key, *value) : fallback;
}

bool ParameterReader::flag(const std::string& key, bool fallback)
{
    const std::string* value = find(key);
    if (!value)
        return fallback;
    if (*value == "true" || *value == "1" || *value == "yes")
        return true;
    if (*value == "false" || *value == "0" || *value == "no")
        return false;
    throw ConfigError(key, "expected true or false, got '" + *value + "'");
}

std::string ParameterReader::text(const std::string& key, const std::string& fallback)
{
    const std::string* value = find(key);
    return value ? *value : fallback;
}

std::vector<double> ParameterReader::reals(const std::string& key, const std::vector<double>& fallback)
{
    const std::string* value = find(key);
    if (!value)
        return fallback;
    std::vector<double> out;
    for (const std::string& item : split_list(*value))
        out.push_back(parse_real(key, item));
    if (out.empty())
        throw ConfigError(key, "list must not be empty");
    return out;
}

std::vector<std::size_t> ParameterReader::counts(const std::string& key, const std::vector<std::size_t>& fallback)
{
    const std::string* value = find(key);
    if (!value)
        return fallback;
    std::vector<std::size_t> out;
    for (const std::string& item : split_list(*value)) {
        const auto v = parse_u64(key, item);
        if (v < 1)
            throw ConfigError(key, "entries must be at least 1");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty())
        throw ConfigError(key, "list must not be empty");
    return out;
}

void ParameterReader::reject_unknown() const
{
    for (const auto& [key, value] : parameters_)
        if (std::find(used_.begin(), used_.end(), key) == used_.end())
            throw ConfigError(key, "unknown parameter");
}

} // namespace rsmhp
