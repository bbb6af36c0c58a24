// Command-line entry point: tmlg <subcommand> [flags]

#include "tmlg/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using tmlg::app::AppError;
using tmlg::app::ExitCode;

int fail(ExitCode code, const std::string& message) {
    std::string flat = message;
    for (char& c : flat) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    std::cerr << "error: kind=" << tmlg::app::exit_kind(code) << " exit=" << static_cast<int>(code)
              << " message=" << flat << '\n';
    return static_cast<int>(code);
}

std::string joined_subcommands() {
    std::string s;
    for (const auto& name : tmlg::app::subcommands()) s += (s.empty() ? "" : "|") + name;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Temporal multilayer transaction-graph analytics"};
    cli.set_help_flag("-h,--help", "Show usage");

    std::string subcommand;
    std::string config_path;
    std::optional<std::string> transfers, registry, prices, snapshot, out, window, step, pre, post, exclusion,
        ingest_bounds, clustering;
    std::optional<int> lag;
    std::optional<std::size_t> min_overlap, top_k;
    std::optional<unsigned> threads;
    std::vector<std::string> focus, taus, days, metrics;
    bool strict = false;

    cli.add_option("subcommand", subcommand, joined_subcommands())->required();
    cli.add_option("--config", config_path, "JSON config file; flags override its values");
    cli.add_option("--transfers", transfers, "Transfer log (from_address,to_address,time_stamp,value,contract_address)");
    cli.add_option("--registry", registry, "Layer registry (contract_address,ticker,decimals)");
    cli.add_option("--prices", prices, "Daily close prices (date,ticker,close)");
    cli.add_option("--snapshot", snapshot, "Graph snapshot: loaded when --transfers is absent, written otherwise");
    cli.add_option("--out", out, "Output directory (default $TMLG_OUT_DIR or ./report)");
    cli.add_option("--window", window, "Rolling window width, e.g. 1d");
    cli.add_option("--step", step, "Rolling window step, e.g. 1d");
    cli.add_option("--pre", pre, "Pre-crash period START,END");
    cli.add_option("--post", post, "Post-crash period START,END");
    cli.add_option("--exclusion", exclusion, "Exclusion period START,END");
    cli.add_option("--ingest-bounds", ingest_bounds, "Keep only transfers inside START,END");
    cli.add_option("--lag", lag, "Cross-correlation lag bound in windows");
    cli.add_option("--min-overlap", min_overlap, "Minimum overlapping points per lag");
    cli.add_option("--top-k", top_k, "Sellers listed per concentration report");
    cli.add_option("--focus", focus, "Focus tickers")->delimiter(',');
    cli.add_option("--tau", taus, "Novelty window widths, e.g. 1d,7d,14d")->delimiter(',');
    cli.add_option("--days", days, "Concentration days (YYYY-MM-DD)")->delimiter(',');
    cli.add_option("--metrics", metrics, "Series metrics")->delimiter(',');
    cli.add_option("--clustering", clustering, "mean_local or transitivity");
    cli.add_flag("--strict", strict, "Fail on malformed or unknown transfer rows");
    cli.add_option("--threads", threads, "Worker threads");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << cli.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << cli.help();
        return fail(ExitCode::usage, e.what());
    }

    try {
        const auto& names = tmlg::app::subcommands();
        if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
            std::cerr << cli.help();
            return fail(ExitCode::usage, "unknown subcommand '" + subcommand + "'");
        }

        tmlg::app::RunConfig config;
        if (!config_path.empty()) tmlg::app::apply_config_file(config_path, config);

        nlohmann::json flags = nlohmann::json::object();
        auto set = [&](const char* key, const auto& value) {
            if (value) flags[key] = *value;
        };
        set("transfers", transfers);
        set("registry", registry);
        set("prices", prices);
        set("snapshot", snapshot);
        set("out", out);
        set("window", window);
        set("step", step);
        set("pre", pre);
        set("post", post);
        set("exclusion", exclusion);
        set("ingest-bounds", ingest_bounds);
        set("clustering", clustering);
        set("lag", lag);
        set("min-overlap", min_overlap);
        set("top-k", top_k);
        set("threads", threads);
        if (!focus.empty()) flags["focus"] = focus;
        if (!taus.empty()) flags["tau"] = taus;
        if (!days.empty()) flags["days"] = days;
        if (!metrics.empty()) flags["metrics"] = metrics;
        if (strict) flags["strict"] = true;
        tmlg::app::apply_config_json(flags, config);

        auto result = tmlg::app::run(subcommand, config);
        std::cout << result.manifest.string() << '\n';
        return 0;
    } catch (const AppError& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail(ExitCode::internal, e.what());
    }
}
