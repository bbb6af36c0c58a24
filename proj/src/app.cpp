#include "tmlg/app.hpp"

#include "tmlg/flows.hpp"
#include "tmlg/ingest.hpp"
#include "tmlg/parallel.hpp"
#include "tmlg/series.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

namespace tmlg::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
    const RunConfig& config;
    Graph graph;
    std::optional<PriceSeries> prices;
    report::ReportBundle& bundle;

    const PriceSeries* price_ptr() const { return prices ? &*prices : nullptr; }
    TimeWindow full_range() const { return config.periods.full_range(); }

    std::vector<std::string> tickers() const {
        std::vector<std::string> out;
        for (const auto& info : graph.registry().layers()) out.push_back(info.ticker);
        return out;
    }

    LayerId layer(std::string_view ticker) const {
        auto id = graph.registry().find_ticker(ticker);
        if (!id) throw AppError(ExitCode::usage, "unknown ticker '" + std::string(ticker) + "'");
        return *id;
    }

    // Focus tickers from the config, else the given defaults that exist.
    std::vector<std::string> focus_or(const std::vector<std::string>& defaults) const {
        if (!config.focus.empty()) {
            for (const auto& t : config.focus) layer(t);
            return config.focus;
        }
        std::vector<std::string> out;
        for (const auto& t : defaults) {
            if (graph.registry().find_ticker(t)) out.push_back(t);
        }
        return out;
    }
};

json window_json(const TimeWindow& w) { return {format_iso_datetime(w.start), format_iso_datetime(w.end)}; }

std::string period_file_label(const std::string& label) { return label; }

void require_file(const fs::path& path, std::string_view what) {
    if (path.empty()) throw AppError(ExitCode::missing_input, "missing required input: " + std::string(what));
    if (!fs::exists(path)) {
        throw AppError(ExitCode::missing_input, std::string(what) + " not found: " + path.string());
    }
}

Graph load_graph(const RunConfig& config) {
    if (config.transfers.empty() && !config.snapshot.empty() && fs::exists(config.snapshot)) {
        try {
            return Graph::load_snapshot(config.snapshot);
        } catch (const std::runtime_error& e) {
            throw AppError(ExitCode::bad_input, e.what());
        }
    }
    require_file(config.transfers, "transfers file (--transfers)");
    require_file(config.registry, "registry file (--registry)");
    try {
        LayerRegistry registry = load_registry(config.registry);
        LoadOptions options;
        options.strict = config.strict;
        options.bounds = config.ingest_bounds;
        TransferLog log = load_transfers(config.transfers, registry, options);
        Graph graph = Graph::build(log, registry);
        if (!config.snapshot.empty()) graph.save_snapshot(config.snapshot);
        return graph;
    } catch (const IngestError& e) {
        throw AppError(ExitCode::bad_input, e.what());
    }
}

std::vector<Timestamp> concentration_days(const RunConfig& config) {
    if (!config.concentration_days.empty()) return config.concentration_days;
    std::vector<Timestamp> days;
    for (const char* label : {"S1", "S2"}) {
        if (auto t = config.periods.marker(label)) days.push_back(*t);
    }
    // Control days: first and last day of the pre-crash period and the
    // midpoint between the two anomalous sales.
    days.push_back(utc_day_start(config.periods.pre.start + kSecondsPerDay));
    if (days.size() >= 3) {
        days.push_back(utc_day_start(days[0] + (days[1] - days[0]) / 2));
    }
    days.push_back(utc_day_start(config.periods.pre.end - 1));
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());
    return days;
}

// ---------------------------------------------------------------------------

void run_stats(Context& ctx) {
    const auto& cfg = ctx.config;
    std::vector<std::pair<std::string, TimeWindow>> periods = {
        {"full", ctx.full_range()}, {"pre", cfg.periods.pre}, {"post", cfg.periods.post}};
    auto tickers = ctx.tickers();

    MetricsOptions options;
    options.clustering = cfg.clustering;
    options.prices = ctx.price_ptr();

    for (const auto& [label, period] : periods) {
        std::vector<std::pair<std::string, LayerMetrics>> rows(tickers.size() + 1);
        parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
            LayerSet layers = i == 0 ? ctx.graph.all_layers() : LayerSet::single(static_cast<LayerId>(i - 1));
            rows[i] = {i == 0 ? "full" : tickers[i - 1], compute_metrics(WindowView(ctx.graph, period, layers), options)};
        });
        auto path = report::write_table(ctx.bundle.path("stats/table_" + period_file_label(label) + ".csv"), rows);
        ctx.bundle.add("stats.table", {{"period", label}, {"window", window_json(period)}}, path);
    }

    std::vector<std::pair<std::string, LayerActivityDistribution>> activity;
    for (const auto& [label, period] : periods) activity.emplace_back(label, period_layer_activity(ctx.graph, period));
    auto path = report::write_activity_table(ctx.bundle.path("stats/layer_activity.csv"), activity);
    ctx.bundle.add("stats.layer_activity", {{"periods", {"full", "pre", "post"}}}, path);

    for (const auto& [label, period] : periods) {
        for (std::size_t i = 0; i <= tickers.size(); ++i) {
            LayerSet layers = i == 0 ? ctx.graph.all_layers() : LayerSet::single(static_cast<LayerId>(i - 1));
            std::string name = i == 0 ? "full" : tickers[i - 1];
            auto hist = degree_distribution(WindowView(ctx.graph, period, layers));
            auto p = report::write_degree_histogram(ctx.bundle.path("stats/degree_" + name + "_" + label + ".csv"), hist);
            ctx.bundle.add("stats.degree_distribution", {{"period", label}, {"layer", name}}, p);
        }
    }
}

void run_series(Context& ctx) {
    const auto& cfg = ctx.config;
    std::vector<Metric> metrics;
    if (cfg.metrics.empty()) {
        for (Metric m : all_metrics()) {
            if (m == Metric::usd_volume && !ctx.prices) continue;
            metrics.push_back(m);
        }
    } else {
        for (const auto& name : cfg.metrics) {
            auto m = parse_metric(name);
            if (!m) throw AppError(ExitCode::usage, "unknown metric '" + name + "'");
            if (*m == Metric::usd_volume && !ctx.prices) {
                throw AppError(ExitCode::missing_input, "usd_volume needs a price file (--prices)");
            }
            metrics.push_back(*m);
        }
    }
    for (const auto& ticker : ctx.tickers()) {
        for (Metric m : metrics) {
            auto s = extract_series(ctx.graph, ctx.layer(ticker), m, ctx.full_range(), cfg.window, cfg.step,
                                    ctx.price_ptr(), cfg.threads, cfg.clustering);
            std::string name = "series/" + ticker + "_" + std::string(metric_name(m)) + ".csv";
            auto path = report::write_series(ctx.bundle.path(name), s, cfg.periods);
            ctx.bundle.add("series",
                           {{"layer", ticker},
                            {"metric", metric_name(m)},
                            {"window", format_duration(cfg.window)},
                            {"step", format_duration(cfg.step)}},
                           path);
        }
    }
    ctx.bundle.add("annotations", json::object(), ctx.bundle.path("series/annotations.json"));
}

void run_correlate(Context& ctx) {
    const auto& cfg = ctx.config;
    std::vector<Metric> metrics = {Metric::transactions, Metric::unique_edges};
    if (ctx.prices) metrics.push_back(Metric::usd_volume);
    CorrelationOptions options;
    options.max_lag = cfg.lag;
    options.min_overlap = cfg.min_overlap;
    options.width = cfg.window;
    options.threads = cfg.threads;
    for (Metric m : metrics) {
        for (const auto& [label, period] : {std::pair{"pre", cfg.periods.pre}, std::pair{"post", cfg.periods.post}}) {
            auto matrix = correlation_matrix(ctx.graph, ctx.tickers(), m, period, options, ctx.price_ptr(), label);
            std::string name = "correlate/" + std::string(metric_name(m)) + "_" + label + ".csv";
            auto path = report::write_matrix(ctx.bundle.path(name), matrix);
            ctx.bundle.add("correlate",
                           {{"metric", metric_name(m)},
                            {"period", label},
                            {"window", window_json(period)},
                            {"lag", cfg.lag},
                            {"min_overlap", cfg.min_overlap}},
                           path);
        }
    }
}

void run_novelty(Context& ctx) {
    const auto& cfg = ctx.config;
    for (const auto& ticker : ctx.tickers()) {
        LayerId layer = ctx.layer(ticker);
        for (Duration tau : cfg.taus) {
            std::string suffix = ticker + "_" + format_duration(tau) + ".csv";
            auto edges = new_edge_series(ctx.graph, layer, tau, ctx.full_range());
            auto p = report::write_series(ctx.bundle.path("novelty/new_edges_" + suffix), edges, cfg.periods);
            ctx.bundle.add("novelty.edges", {{"layer", ticker}, {"tau", format_duration(tau)}}, p);
            auto nodes = new_node_series(ctx.graph, layer, tau, ctx.full_range());
            p = report::write_series(ctx.bundle.path("novelty/new_nodes_" + suffix), nodes, cfg.periods, "new_nodes");
            ctx.bundle.add("novelty.nodes", {{"layer", ticker}, {"tau", format_duration(tau)}}, p);
        }
    }
    ctx.bundle.add("annotations", json::object(), ctx.bundle.path("novelty/annotations.json"));
}

void run_activity(Context& ctx) {
    const auto& cfg = ctx.config;
    auto all = layer_activity_series(ctx.graph, ctx.full_range(), cfg.window, std::nullopt, cfg.threads);
    auto p = report::write_activity(ctx.bundle.path("activity/all.csv"), all);
    ctx.bundle.add("activity", {{"focus", nullptr}, {"window", format_duration(cfg.window)}}, p);
    for (const auto& ticker : ctx.focus_or({"WLUNC", "USTC"})) {
        auto series = layer_activity_series(ctx.graph, ctx.full_range(), cfg.window, ctx.layer(ticker), cfg.threads);
        p = report::write_activity(ctx.bundle.path("activity/focus_" + ticker + ".csv"), series);
        ctx.bundle.add("activity", {{"focus", ticker}, {"window", format_duration(cfg.window)}}, p);
    }
    auto annotations = report::write_annotations(ctx.bundle.path("activity"), cfg.periods);
    ctx.bundle.add("annotations", json::object(), annotations);
}

void run_transitions(Context& ctx) {
    const auto& cfg = ctx.config;
    for (const auto& ticker : ctx.focus_or(ctx.tickers())) {
        auto m = favorite_transitions(ctx.graph, ctx.layer(ticker), cfg.periods.pre, cfg.periods.post);
        auto p = report::write_matrix(ctx.bundle.path("transitions/" + ticker + ".csv"), m);
        ctx.bundle.add("transitions",
                       {{"focus", ticker},
                        {"pre", window_json(cfg.periods.pre)},
                        {"post", window_json(cfg.periods.post)},
                        {"cohort", m.cohort_size}},
                       p);
    }
}

void run_concentration(Context& ctx) {
    const auto& cfg = ctx.config;
    auto days = concentration_days(cfg);
    for (const auto& ticker : ctx.focus_or({"USTC"})) {
        std::vector<ConcentrationReport> reports;
        for (Timestamp day : days) reports.push_back(seller_concentration(ctx.graph, ctx.layer(ticker), day, cfg.top_k));
        auto p = report::write_concentration(ctx.bundle.path("concentration/" + ticker + "_top" +
                                                             std::to_string(cfg.top_k) + ".csv"),
                                             reports);
        json day_list = json::array();
        for (auto d : days) day_list.push_back(format_iso_date(d));
        ctx.bundle.add("concentration.top_k", {{"layer", ticker}, {"k", cfg.top_k}, {"days", day_list}}, p);
        if (reports.size() >= 2) {
            auto rec = recurrent_top_sellers(reports);
            p = report::write_recurrent(ctx.bundle.path("concentration/" + ticker + "_recurrent.csv"), rec);
            ctx.bundle.add("concentration.recurrent", {{"layer", ticker}, {"k", cfg.top_k}, {"days", day_list}}, p);
        }
    }
}

const std::map<std::string, std::function<void(Context&)>, std::less<>>& handlers() {
    static const std::map<std::string, std::function<void(Context&)>, std::less<>> table = {
        {"stats", run_stats},
        {"series", run_series},
        {"correlate", run_correlate},
        {"novelty", run_novelty},
        {"activity", run_activity},
        {"transitions", run_transitions},
        {"concentration", run_concentration},
    };
    return table;
}

Duration duration_value(const json& v, std::string_view key) {
    try {
        if (v.is_number_integer()) return v.get<Duration>();
        return parse_duration(v.get<std::string>());
    } catch (const std::exception& e) {
        throw AppError(ExitCode::usage, "config key '" + std::string(key) + "': " + e.what());
    }
}

}  // namespace

std::string_view exit_kind(ExitCode code) {
    switch (code) {
        case ExitCode::ok: return "ok";
        case ExitCode::internal: return "internal";
        case ExitCode::usage: return "usage";
        case ExitCode::missing_input: return "missing_input";
        case ExitCode::bad_input: return "bad_input";
        case ExitCode::degenerate_series: return "degenerate_series";
    }
    return "internal";
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw AppError(ExitCode::usage, msg); };
    if (window <= 0 || step <= 0) fail("window and step must be positive");
    if (lag < 0) fail("lag must be non-negative");
    if (top_k < 1) fail("top-k must be at least 1");
    if (threads < 1) fail("threads must be at least 1");
    for (auto t : taus) {
        if (t <= 0) fail("tau must be positive");
    }
    try {
        periods.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

void apply_config_json(const json& j, RunConfig& c) {
    if (!j.is_object()) throw AppError(ExitCode::usage, "config must be a JSON object");
    auto window_of = [](const json& v, std::string_view key) {
        try {
            return parse_window(v.get<std::string>());
        } catch (const std::exception& e) {
            throw AppError(ExitCode::usage, "config key '" + std::string(key) + "': " + e.what());
        }
    };
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "transfers") c.transfers = v.get<std::string>();
            else if (key == "registry") c.registry = v.get<std::string>();
            else if (key == "prices") c.prices = v.get<std::string>();
            else if (key == "snapshot") c.snapshot = v.get<std::string>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "window") c.window = duration_value(v, key);
            else if (key == "step") c.step = duration_value(v, key);
            else if (key == "pre") c.periods.pre = window_of(v, key);
            else if (key == "post") c.periods.post = window_of(v, key);
            else if (key == "exclusion") c.periods.exclusion = window_of(v, key);
            else if (key == "ingest-bounds") c.ingest_bounds = window_of(v, key);
            else if (key == "lag") c.lag = v.get<int>();
            else if (key == "min-overlap") c.min_overlap = v.get<std::size_t>();
            else if (key == "top-k") c.top_k = v.get<std::size_t>();
            else if (key == "focus") c.focus = v.get<std::vector<std::string>>();
            else if (key == "metrics") c.metrics = v.get<std::vector<std::string>>();
            else if (key == "strict") c.strict = v.get<bool>();
            else if (key == "threads") c.threads = v.get<unsigned>();
            else if (key == "tau") {
                c.taus.clear();
                for (const auto& t : v) c.taus.push_back(duration_value(t, key));
            } else if (key == "days") {
                c.concentration_days.clear();
                for (const auto& d : v) c.concentration_days.push_back(parse_iso_date(d.get<std::string>()));
            } else if (key == "clustering") {
                auto mode = v.get<std::string>();
                if (mode == "mean_local") c.clustering = ClusteringMode::mean_local;
                else if (mode == "transitivity") c.clustering = ClusteringMode::transitivity;
                else throw AppError(ExitCode::usage, "unknown clustering mode '" + mode + "'");
            } else if (key == "markers") {
                c.periods.markers.clear();
                for (const auto& [label, date] : v.items()) {
                    c.periods.markers.emplace_back(label, parse_iso_date(date.get<std::string>()));
                }
            } else {
                throw AppError(ExitCode::usage, "unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw AppError(ExitCode::usage, std::string("config type error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw AppError(ExitCode::usage, e.what());
    }
}

void apply_config_file(const fs::path& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw AppError(ExitCode::missing_input, "config file not found: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw AppError(ExitCode::usage, "config file " + path.string() + ": " + e.what());
    }
    apply_config_json(j, config);
}

fs::path default_output_dir() {
    if (const char* env = std::getenv(std::string(kOutputDirEnv).c_str()); env && *env) return env;
    return "report";
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"stats",       "series",        "correlate", "novelty", "activity",
                                                   "transitions", "concentration", "all"};
    return names;
}

RunResult run(std::string_view subcommand, const RunConfig& config) {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
        throw AppError(ExitCode::usage, "unknown subcommand '" + std::string(subcommand) + "'");
    }
    config.validate();
    fs::path out = config.out.empty() ? default_output_dir() : config.out;

    Graph graph = load_graph(config);
    std::optional<PriceSeries> prices;
    if (!config.prices.empty()) {
        require_file(config.prices, "price file (--prices)");
        try {
            prices = load_prices(config.prices);
        } catch (const IngestError& e) {
            throw AppError(ExitCode::bad_input, e.what());
        }
    }

    report::ReportBundle bundle(out, config.periods);
    Context ctx{config, std::move(graph), std::move(prices), bundle};
    try {
        if (subcommand == "all") {
            for (const char* name : {"stats", "series", "correlate", "novelty", "activity", "transitions",
                                     "concentration"}) {
                handlers().find(name)->second(ctx);
            }
        } else {
            handlers().find(subcommand)->second(ctx);
        }
    } catch (const DegenerateSeriesError& e) {
        throw AppError(ExitCode::degenerate_series, e.what());
    } catch (const std::invalid_argument& e) {
        throw AppError(ExitCode::usage, e.what());
    }
    auto manifest = bundle.write_manifest();
    return {std::move(bundle), manifest};
}

}  // namespace tmlg::app
