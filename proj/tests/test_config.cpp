#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rsmhp/errors.hpp"
#include "rsmhp/experiments.hpp"
#include "small_configs.hpp"

using namespace rsmhp;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("rsmhp_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string config_error_field(const std::string& text)
{
    try {
        validate_spec(parse_spec(text));
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

} // namespace

TEST_CASE("experiment kinds round-trip through their names")
{
    CHECK(all_experiment_kinds().size() == 6);
    for (ExperimentKind k : all_experiment_kinds())
        CHECK(parse_experiment_kind(to_string(k)) == k);
    CHECK_FALSE(parse_experiment_kind("Nope").has_value());
}

TEST_CASE("parse a full spec")
{
    const ExperimentSpec spec = parse_spec("# comment\nkind = PruningStudy\nseed = 18446744073709551615\n"
                                           "output = out/dir\nworkers = 3\n\n[PruningStudy]\nprune_widths = 2, 3\n"
                                           "[LqgConvergence]\np_min = 7\n");
    CHECK(spec.kind == ExperimentKind::PruningStudy);
    CHECK(spec.master_seed == 18446744073709551615ull);
    CHECK(spec.output_dir == fs::path("out/dir"));
    CHECK(spec.workers == 3);
    CHECK(spec.parameters.size() == 1);
    CHECK(spec.parameters.at("prune_widths") == "2, 3");
    const PruningStudyParams p = parse_pruning_study(spec);
    CHECK(p.prune_widths == std::vector<std::size_t>{2, 3});
    CHECK(p.branch_factor == 4);
}

TEST_CASE("config errors name the offending field")
{
    CHECK(config_error_field("kind = Bogus\n") == "kind");
    CHECK(config_error_field("seed = 1\n") == "kind");
    CHECK(config_error_field("kind = VarianceScaling\nseed = -4\n") == "seed");
    CHECK(config_error_field("kind = VarianceScaling\ncolour = red\n") == "colour");
    CHECK(config_error_field("kind = VarianceScaling\nworkers = 0\n") == "workers");
    CHECK(config_error_field("kind = VarianceScaling\n[VarianceScaling]\nreplications = 1\n") == "replications");
    CHECK(config_error_field("kind = VarianceScaling\n[VarianceScaling]\nn_values = 10\n") == "n_values");
    CHECK(config_error_field("kind = VarianceScaling\n[VarianceScaling]\nnvalues = 10, 20\n") == "nvalues");
    CHECK(config_error_field("kind = LqgConvergence\n[LqgConvergence]\np_min = 500\np_max = 100\n") == "p_max");
    CHECK(config_error_field("kind = LqgConvergence\n[LqgConvergence]\na = 1.5\n") == "a");
    CHECK(config_error_field("kind = LqgConvergence\n[LqgConvergence]\nsigma = abc\n") == "sigma");
    CHECK(config_error_field("kind = ChebyshevCoverage\n[ChebyshevCoverage]\nvariance = 0\n") == "variance");
    CHECK(config_error_field("kind = ChebyshevCoverage\n[ChebyshevCoverage]\neps_multipliers = 0.5, -1\n") ==
          "eps_multipliers");
    CHECK(config_error_field("kind = PruningStudy\n[PruningStudy]\nnoise_sharing = Sometimes\n") == "noise_sharing");
    CHECK(config_error_field("kind = PruningStudy\n[PruningStudy]\nprune_widths = 0\n") == "prune_widths");
    CHECK(config_error_field("kind = UavMonteCarlo\n[UavMonteCarlo]\nuav_speed = 70\n") == "uav_speed");
    CHECK(config_error_field("kind = UavMonteCarlo\n[UavMonteCarlo]\ninclude_nbo = maybe\n") == "include_nbo");
    CHECK(config_error_field("kind = CovarianceDecay\n[CovarianceDecay]\nbranch_factor = 2000\n") == "branch_factor");
    CHECK(config_error_field("kind = CovarianceDecay\n[CovarianceDecay]\nhorizon = 0\n") == "horizon");
    CHECK_THROWS_AS(load_spec("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("every small config validates")
{
    for (ExperimentKind k : all_experiment_kinds())
        CHECK_NOTHROW(validate_spec(parse_spec(testsupport::small_config(k, "x"))));
}

TEST_CASE("number formatting is lossless")
{
    RandomStream rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(rng.normal(), static_cast<int>(rng() % 200) - 100);
        CHECK(parse_real("v", format_real(v)) == v);
    }
    CHECK(format_real(100.0) == "100");
    CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV layout and round trip")
{
    Table t{{"a", "b"}, {{1.0, 0.1}, {-3.0, 1e300}}};
    const std::string csv = t.to_csv();
    CHECK(csv == "a,b\n1,0.10000000000000001\n-3,1.0000000000000001e+300\n");
    CHECK(csv.find('\r') == std::string::npos);
    const Table back = Table::from_csv(csv);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.values("b") == std::vector<double>{0.1, 1e300});
    CHECK_THROWS_AS(back.column("c"), ConfigError);
    CHECK_THROWS_AS(Table::from_csv("a,b\n1\n"), DimensionError);
}

TEST_CASE("statistics helpers")
{
    const std::vector<double> x{10, 100, 1000}, y{3, 0.3, 0.03};
    CHECK(loglog_slope(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(normal_critical_value(0.05) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_critical_value(0.01) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
    const Table cdf = empirical_cdf(std::vector<double>{3, 1, 2, 4});
    CHECK(cdf.values("mean_error") == std::vector<double>{1, 2, 3, 4});
    CHECK(cdf.values("cdf") == std::vector<double>{0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("runner outputs match the closed forms they report")
{
    const ExperimentSpec spec = parse_spec(testsupport::small_config(ExperimentKind::LqgConvergence, "x"));
    const Table t = run_lqg_convergence(parse_lqg_convergence(spec), 5, 1);
    CHECK(t.values("P") == std::vector<double>{100, 300, 500});
    for (const auto& row : t.rows) {
        CHECK(row[t.column("abs_err_nbo")] == doctest::Approx(12.5).epsilon(1e-12));
        CHECK(row[t.column("J_exact")] == doctest::Approx(18.8764625).epsilon(1e-12));
    }

    LqgConvergenceParams quiet;
    quiet.lqg.sigma = 0.0;
    quiet.p_min = quiet.p_max = 50;
    const Table q = run_lqg_convergence(quiet, 1, 1);
    REQUIRE(q.rows.size() == 1);
    CHECK(q.rows[0][1] == doctest::Approx(q.rows[0][3]).epsilon(1e-14));
    CHECK(q.rows[0][2] == doctest::Approx(q.rows[0][3]).epsilon(1e-14));

    PruningStudyParams pruning;
    pruning.prune_widths = {64};
    pruning.replications = 3;
    const Table pr = run_pruning_study(pruning, 2, 1);
    CHECK(pr.rows[0][pr.column("trajectories")] == 64);
}

TEST_CASE("experiments write deterministic, self-consistent outputs")
{
    for (ExperimentKind kind : all_experiment_kinds()) {
        CAPTURE(to_string(kind));
        const fs::path one = scratch("det1"), many = scratch("det3");
        ExperimentSpec spec = parse_spec(testsupport::small_config(kind, one.string(), 1));
        const ExperimentOutcome a = run_experiment(spec);
        spec.output_dir = many;
        spec.workers = 3;
        const ExperimentOutcome b = run_experiment(spec);

        const std::string csv_name = primary_csv_name(kind);
        const std::string csv = read_file(one / csv_name);
        CHECK(csv == read_file(many / csv_name));
        CHECK(csv.find('\r') == std::string::npos);

        // Re-parsing the CSV reproduces the summary exactly.
        const Table parsed = Table::from_csv(csv);
        CHECK(summarize(kind, parsed) == a.metadata.at("summary"));
        const nlohmann::json meta = nlohmann::json::parse(read_file(one / (std::string(to_string(kind)) + ".json")));
        CHECK(meta.at("summary") == summarize(kind, parsed));
        CHECK(meta.at("seed") == 5);
        CHECK(meta.at("version") == "0.1.0");
        CHECK(meta.at("kind") == std::string(to_string(kind)));
        CHECK(meta.contains("wall_time_seconds"));
        CHECK(meta.at("parameters") == nlohmann::json(spec.parameters));

        // Nothing but the declared files lands in the output directory.
        std::size_t count = 0;
        for (const auto& entry : fs::directory_iterator(one)) {
            ++count;
            CHECK(entry.path().extension() != ".tmp");
        }
        CHECK(count == a.files.size());
        for (const auto& f : a.files)
            CHECK(f.parent_path() == one);
        fs::remove_all(one);
        fs::remove_all(many);
    }
}

TEST_CASE("a different seed changes the numbers")
{
    const fs::path dir = scratch("seed");
    ExperimentSpec spec = parse_spec(testsupport::small_config(ExperimentKind::VarianceScaling, dir.string()));
    run_experiment(spec);
    const std::string first = read_file(dir / "VarianceScaling.csv");
    spec.master_seed = 6;
    run_experiment(spec);
    CHECK(first != read_file(dir / "VarianceScaling.csv"));
    fs::remove_all(dir);
}

TEST_CASE("UAV study writes one CDF file per planner")
{
    const fs::path dir = scratch("uav");
    ExperimentSpec spec = parse_spec(testsupport::small_config(ExperimentKind::UavMonteCarlo, dir.string()));
    spec.parameters["n_trajectories"] = "50, 100, 250";
    spec.parameters["n_runs"] = "2";
    spec.parameters["episode_length"] = "2";
    spec.parameters["max_evaluations"] = "4";
    const ExperimentOutcome out = run_experiment(spec);
    for (const char* name : {"uav_cdf_nbo.csv", "uav_cdf_nt50.csv", "uav_cdf_nt100.csv", "uav_cdf_nt250.csv"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(dir / name));
        const Table cdf = Table::from_csv(read_file(dir / name));
        CHECK(cdf.columns == std::vector<std::string>{"mean_error", "cdf"});
        CHECK(cdf.rows.size() == 2);
    }
    const Table main = Table::from_csv(read_file(dir / "UavMonteCarlo.csv"));
    CHECK(main.rows.size() == 8);
    CHECK(out.metadata.at("summary").at("planners").size() == 4);
    fs::remove_all(dir);
}

TEST_CASE("unwritable output is a runtime error")
{
    const fs::path dir = scratch("blocked");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    ExperimentSpec spec = parse_spec(testsupport::small_config(ExperimentKind::VarianceScaling, (dir / "file" / "out").string()));
    CHECK_THROWS_AS(run_experiment(spec), Error);
    fs::remove_all(dir);
}
