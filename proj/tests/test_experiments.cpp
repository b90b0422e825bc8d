#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "depconc/experiments.hpp"
#include "depconc/io_util.hpp"

using namespace depconc;
using json = nlohmann::ordered_json;

namespace {

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "depconc_runs";
    std::filesystem::create_directories(dir);
    return dir;
}

json load(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

json load_schema(const std::string& name) {
    return load(std::filesystem::path(DEPCONC_SOURCE_DIR) / "schemas" / name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("strict config parsing") {
    json good = {{"scenario", "mixing"}, {"seed", 3}, {"trials", 10}};
    CHECK_NOTHROW(ExperimentConfig::from_json(good));

    json bad_top = good;
    bad_top["typo_key"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_top), std::invalid_argument);

    json bad_param = good;
    bad_param["params"] = {{"unknown_option", 1}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_param), std::invalid_argument);

    json zero_trials = good;
    zero_trials["trials"] = 0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(zero_trials), std::invalid_argument);

    json bad_scenario = {{"scenario", "nonsense"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_scenario), std::invalid_argument);
}

TEST_CASE("run id depends on the configuration, not the output path") {
    ExperimentConfig a;
    a.scenario = "mixing";
    a.seed = 5;
    ExperimentConfig b = a;
    b.out_dir = "elsewhere";
    CHECK(a.run_id() == b.run_id());
    b.seed = 6;
    CHECK(a.run_id() != b.run_id());
}

TEST_CASE("mixing scenario: closed forms hold and the summary validates") {
    ExperimentConfig cfg;
    cfg.scenario = "mixing";
    cfg.seed = 1;
    cfg.out_dir = scratch_dir();
    CHECK(run_mixing(cfg) == 0);

    auto summary = load(cfg.run_dir() / "summary.json");
    CHECK(summary.at("all_pass").get<bool>());
    CHECK(summary.at("max_abs_error").get<double>() <= 1e-12);
    std::string err;
    CHECK_MESSAGE(validate_against_schema(summary, load_schema("mixing_summary.schema.json"), &err),
                  err);
}

TEST_CASE("filters scenario: all families certify") {
    ExperimentConfig cfg;
    cfg.scenario = "filters";
    cfg.seed = 1;
    cfg.params["grid_points"] = 2000;  // keep the unit suite quick
    cfg.out_dir = scratch_dir();
    CHECK(run_filters(cfg) == 0);
    auto summary = load(cfg.run_dir() / "summary.json");
    std::string err;
    CHECK_MESSAGE(
        validate_against_schema(summary, load_schema("filters_summary.schema.json"), &err), err);
}

TEST_CASE("geometry scenario emits passing certificates") {
    ExperimentConfig cfg;
    cfg.scenario = "geometry";
    cfg.seed = 2;
    cfg.params["samples"] = 500;
    cfg.params["schatten_d"] = 4;
    cfg.out_dir = scratch_dir();
    CHECK(run_geometry(cfg) == 0);
    auto summary = load(cfg.run_dir() / "summary.json");
    CHECK(summary.at("all_pass").get<bool>());
    std::string err;
    CHECK_MESSAGE(
        validate_against_schema(summary, load_schema("geometry_summary.schema.json"), &err), err);
}

TEST_CASE("concentration scenario: bound holds and reruns are byte-identical") {
    ExperimentConfig cfg;
    cfg.scenario = "concentration";
    cfg.seed = 11;
    cfg.trials = 300;
    cfg.params["rho_grid"] = {0.0, 0.5};
    cfg.params["n_grid"] = {200};
    cfg.params["dim"] = 4;
    cfg.out_dir = scratch_dir();

    CHECK(run_concentration(cfg) == 0);
    auto dir = cfg.run_dir();
    std::string first_summary = slurp(dir / "summary.json");
    std::string first_plot = slurp(dir / "bound_vs_quantile.csv");

    CHECK(run_concentration(cfg) == 0);
    CHECK(slurp(dir / "summary.json") == first_summary);
    CHECK(slurp(dir / "bound_vs_quantile.csv") == first_plot);

    auto summary = load(dir / "summary.json");
    CHECK(summary.at("all_hold").get<bool>());
    std::string err;
    CHECK_MESSAGE(
        validate_against_schema(summary, load_schema("concentration_summary.schema.json"), &err),
        err);
}

TEST_CASE("rates scenario: degenerate single-point grid reports no slope") {
    ExperimentConfig cfg;
    cfg.scenario = "rates";
    cfg.seed = 4;
    cfg.trials = 2;
    cfg.params["n_grid"] = {256};
    cfg.params["J"] = 16;
    cfg.out_dir = scratch_dir();
    CHECK(run_rates(cfg) == 0);
    auto summary = load(cfg.run_dir() / "summary.json");
    CHECK(summary.at("fitted_slope").is_null());
    std::string err;
    CHECK_MESSAGE(validate_against_schema(summary, load_schema("rates_summary.schema.json"), &err),
                  err);
}

TEST_CASE("rates scenario: short polynomial run produces a slope and CSV") {
    ExperimentConfig cfg;
    cfg.scenario = "rates";
    cfg.seed = 4;
    cfg.trials = 3;
    cfg.params["regime"] = "polynomial";
    cfg.params["n_grid"] = {256, 512, 1024};
    cfg.params["J"] = 16;
    cfg.out_dir = scratch_dir();
    CHECK(run_rates(cfg) == 0);
    auto summary = load(cfg.run_dir() / "summary.json");
    CHECK(summary.at("fitted_slope").is_number());
    CHECK(summary.at("target_exponent").get<double>() == doctest::Approx(-2.0 / 6.5));
    CHECK(std::filesystem::exists(cfg.run_dir() / "median_error_vs_n.csv"));
}

TEST_CASE("schema validator catches structural problems") {
    auto schema = load_schema("mixing_summary.schema.json");
    json doc = {{"scenario", "mixing"}, {"seed", 1},          {"flip_probs", {0.1}},
                {"k_max", 5},           {"max_abs_error", 0.0}, {"all_pass", true}};
    std::string err;
    CHECK(validate_against_schema(doc, schema, &err));
    doc.erase("k_max");
    CHECK_FALSE(validate_against_schema(doc, schema, &err));
    doc["k_max"] = "not a number";
    CHECK_FALSE(validate_against_schema(doc, schema, &err));
}
