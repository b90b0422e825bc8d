#ifndef DEPCONC_EXPERIMENTS_HPP
#define DEPCONC_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace depconc {

/// Scenario configuration. Parsing is strict: unknown keys anywhere are
/// rejected. The run directory name is a hash of the effective
/// configuration, so identical configs land in identical paths.
struct ExperimentConfig {
    std::string scenario;  // concentration | rates | geometry | mixing | filters
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::uint64_t seed = 1;
    long trials = 1000;
    std::filesystem::path out_dir = "out";

    static ExperimentConfig from_json(const nlohmann::ordered_json& j);
    static ExperimentConfig from_file(const std::filesystem::path& file);
    nlohmann::ordered_json to_json() const;
    std::string run_id() const;
    /// out_dir / scenario / run_id, created on demand.
    std::filesystem::path run_dir() const;
    void validate() const;
};

/// Each runner writes its CSV/JSON outputs under cfg.run_dir() and returns
/// 0 when every check holds, 1 otherwise.
int run_concentration(const ExperimentConfig& cfg);
int run_rates(const ExperimentConfig& cfg);
int run_geometry(const ExperimentConfig& cfg);
int run_mixing(const ExperimentConfig& cfg);
int run_filters(const ExperimentConfig& cfg);

/// Dispatch on cfg.scenario; throws on unknown scenario.
int run_experiment(const ExperimentConfig& cfg);

/// Minimal structural validator for the summary schemas shipped under
/// schemas/ (supports type / required / properties / items).
bool validate_against_schema(const nlohmann::ordered_json& doc, const nlohmann::ordered_json& schema,
                             std::string* error = nullptr);

}  // namespace depconc

#endif
