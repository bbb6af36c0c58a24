#pragma once

#include "tmlg/metrics.hpp"
#include "tmlg/report.hpp"
#include "tmlg/tgraph.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tmlg::app {

/// Process exit codes. Each failure class has its own code.
enum class ExitCode : int {
    ok = 0,
    internal = 1,
    usage = 2,
    missing_input = 3,
    bad_input = 4,
    degenerate_series = 5,
};

std::string_view exit_kind(ExitCode code);

/// Error carrying the exit code it maps to.
class AppError : public std::runtime_error {
public:
    AppError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

inline constexpr std::string_view kOutputDirEnv = "TMLG_OUT_DIR";

struct RunConfig {
    std::filesystem::path transfers;
    std::filesystem::path registry;
    std::filesystem::path prices;    // optional
    std::filesystem::path snapshot;  // optional: load instead of transfers, or save after build
    std::filesystem::path out;

    PeriodConfig periods = default_period_config();
    std::optional<TimeWindow> ingest_bounds;
    Duration window = kSecondsPerDay;
    Duration step = kSecondsPerDay;
    int lag = 10;
    std::size_t min_overlap = 10;
    std::vector<Duration> taus = {kSecondsPerDay, 7 * kSecondsPerDay, 14 * kSecondsPerDay};
    std::size_t top_k = 10;
    std::vector<std::string> focus;  // tickers; empty = per-subcommand default
    std::vector<Timestamp> concentration_days;  // empty = S1, S2 and control days
    std::vector<std::string> metrics;           // series metrics; empty = all available
    ClusteringMode clustering = ClusteringMode::mean_local;
    bool strict = false;
    unsigned threads = 1;

    /// Throws AppError(usage) on invalid values.
    void validate() const;
};

/// Applies keys from a JSON object onto `config`. Unknown keys are rejected.
/// Keys mirror the long flag names (e.g. "top-k", "tau": ["1d","7d"]).
void apply_config_json(const nlohmann::json& json, RunConfig& config);
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

/// Output directory when --out is not given: $TMLG_OUT_DIR or "report".
std::filesystem::path default_output_dir();

const std::vector<std::string>& subcommands();

struct RunResult {
    report::ReportBundle bundle;
    std::filesystem::path manifest;
};

/// Runs one subcommand end to end (ingest, graph, analysis, report) and
/// writes manifest.json. Throws AppError.
RunResult run(std::string_view subcommand, const RunConfig& config);

}  // namespace tmlg::app
