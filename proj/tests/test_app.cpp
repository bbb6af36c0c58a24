#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli.hpp"

#include "tmlg/app.hpp"
#include "tmlg/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace tmlg;
namespace fs = std::filesystem;
using cli::quote;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("tmlg_app_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

app::RunConfig fixture_config(const fs::path& out) {
    app::RunConfig c;
    const fs::path dir = TMLG_FIXTURE_DIR;
    c.transfers = dir / "transfers.csv";
    c.registry = dir / "registry.csv";
    c.prices = dir / "prices.csv";
    c.out = out;
    return c;
}

app::ExitCode code_of(std::string_view subcommand, const app::RunConfig& config) {
    try {
        app::run(subcommand, config);
    } catch (const app::AppError& e) {
        return e.code();
    }
    return app::ExitCode::ok;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

nlohmann::json manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    return nlohmann::json::parse(in);
}

bool is_count(std::string_view column) {
    static const std::set<std::string, std::less<>> counts = {
        "nodes", "unique_edges", "transactions", "active_out", "active_in", "sources", "sinks"};
    return counts.count(column) > 0;
}

}  // namespace

TEST_CASE("stats on the fixture matches the independent golden tables") {
    TempDir tmp("golden");
    auto result = app::run("stats", fixture_config(tmp.path));
    CHECK(fs::exists(result.manifest));

    for (const char* period : {"full", "pre", "post"}) {
        CAPTURE(period);
        const std::string name = std::string("table_") + period + ".csv";
        auto got = report::read_table(tmp.path / "stats" / name);
        auto want = report::read_table(fs::path(TMLG_GOLDEN_DIR) / name);
        REQUIRE(got.header == want.header);
        REQUIRE(got.rows.size() == want.rows.size());
        for (std::size_t r = 0; r < want.rows.size(); ++r) {
            for (std::size_t c = 0; c < want.header.size(); ++c) {
                const auto& column = want.header[c];
                const auto& g = got.rows[r][c];
                const auto& w = want.rows[r][c];
                CAPTURE(column);
                CAPTURE(w);
                if (column == "layer" || is_count(column)) {
                    CHECK(g == w);
                } else if (column == "token_volume") {
                    CHECK(Decimal::parse(g) == Decimal::parse(w));
                } else {
                    const double gv = std::strtod(g.c_str(), nullptr);
                    const double wv = std::strtod(w.c_str(), nullptr);
                    CHECK(std::fabs(gv - wv) <= 1e-9 * std::max(1.0, std::fabs(wv)));
                }
            }
        }
    }
}

TEST_CASE("manifest lists every written file with its digest") {
    TempDir tmp("manifest");
    app::run("stats", fixture_config(tmp.path));
    auto m = manifest(tmp.path);
    REQUIRE(m["files"].is_array());
    CHECK(m["files"].size() > 3);
    for (const auto& f : m["files"]) {
        fs::path p = tmp.path / f["file"].get<std::string>();
        REQUIRE(fs::exists(p));
        CHECK(f["sha256"] == report::sha256_file(p));
    }
}

TEST_CASE("correlate writes labelled pre and post matrices") {
    TempDir tmp("correlate");
    app::run("correlate", fixture_config(tmp.path));
    for (const char* metric : {"transactions", "unique_edges", "usd_volume"}) {
        for (const char* period : {"pre", "post"}) {
            fs::path p = tmp.path / "correlate" / (std::string(metric) + "_" + period + ".csv");
            REQUIRE(fs::exists(p));
            auto m = report::read_matrix(p);
            CHECK(m.row_labels.size() == 6);
            CHECK(m.row_labels == m.column_labels);
            for (std::size_t i = 0; i < m.cells.size(); ++i) {
                CHECK(m.cells[i][i] == doctest::Approx(1.0).epsilon(1e-12));
                for (std::size_t j = 0; j < m.cells.size(); ++j) {
                    CHECK(m.cells[i][j] == doctest::Approx(m.cells[j][i]).epsilon(1e-12));
                    CHECK(std::fabs(m.cells[i][j]) <= 1.0 + 1e-12);
                }
            }
        }
    }
    std::set<std::string> periods;
    const auto m = manifest(tmp.path);
    for (const auto& f : m["files"]) periods.insert(f["parameters"]["period"].get<std::string>());
    const std::set<std::string> expected = {"pre", "post"};
    CHECK(periods == expected);
}

TEST_CASE("library errors carry the documented exit codes") {
    TempDir tmp("codes");
    auto config = fixture_config(tmp.path / "out");

    CHECK(code_of("bogus", config) == app::ExitCode::usage);

    auto missing = config;
    missing.transfers = tmp.path / "nope.csv";
    CHECK(code_of("stats", missing) == app::ExitCode::missing_input);

    auto no_prices = config;
    no_prices.prices = tmp.path / "nope.csv";
    CHECK(code_of("stats", no_prices) == app::ExitCode::missing_input);

    write_file(tmp.path / "bad_registry.csv", "contract_address,ticker,decimals\n0xabc,USDC,notanumber\n");
    auto bad = config;
    bad.registry = tmp.path / "bad_registry.csv";
    CHECK(code_of("stats", bad) == app::ExitCode::bad_input);

    write_file(tmp.path / "bad_transfers.csv",
               "from_address,to_address,time_stamp,value,contract_address\n0x1,0x2,notatime,1,"
               "0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48\n");
    auto strict = config;
    strict.transfers = tmp.path / "bad_transfers.csv";
    strict.strict = true;
    CHECK(code_of("stats", strict) == app::ExitCode::bad_input);

    auto zero = config;
    zero.window = 0;
    CHECK(code_of("stats", zero) == app::ExitCode::usage);

    auto unknown_focus = config;
    unknown_focus.focus = {"NOPE"};
    CHECK(code_of("transitions", unknown_focus) == app::ExitCode::usage);
}

TEST_CASE("a layer with a flat series makes correlate exit as degenerate") {
    TempDir tmp("flat");
    const fs::path dir = TMLG_FIXTURE_DIR;
    std::ifstream in(dir / "registry.csv");
    std::string text{std::istreambuf_iterator<char>(in), {}};
    write_file(tmp.path / "registry.csv", text + "0x00000000000000000000000000000000000f1a70,FLAT,0\n");
    auto config = fixture_config(tmp.path / "out");
    config.registry = tmp.path / "registry.csv";
    try {
        app::run("correlate", config);
        FAIL("expected a degenerate series error");
    } catch (const app::AppError& e) {
        CHECK(e.code() == app::ExitCode::degenerate_series);
        CHECK(std::string(e.what()).find("FLAT") != std::string::npos);
    }
}

TEST_CASE("config keys are validated") {
    app::RunConfig c;
    CHECK_THROWS_AS(app::apply_config_json({{"no-such-key", 1}}, c), app::AppError);
    CHECK_THROWS_AS(app::apply_config_json({{"window", "soon"}}, c), app::AppError);
    CHECK_THROWS_AS(app::apply_config_json({{"lag", "ten"}}, c), app::AppError);
    CHECK_THROWS_AS(app::apply_config_json({{"clustering", "global"}}, c), app::AppError);
    CHECK_THROWS_AS(app::apply_config_json(nlohmann::json::array(), c), app::AppError);

    app::apply_config_json({{"window", "7d"},
                            {"step", "12h"},
                            {"tau", {"1d", "3d"}},
                            {"top-k", 3},
                            {"days", {"2022-04-03"}},
                            {"clustering", "transitivity"}},
                           c);
    CHECK(c.window == 7 * kSecondsPerDay);
    CHECK(c.step == 12 * 3600);
    CHECK(c.taus == std::vector<Duration>{kSecondsPerDay, 3 * kSecondsPerDay});
    CHECK(c.top_k == 3);
    CHECK(c.concentration_days == std::vector<Timestamp>{parse_iso_date("2022-04-03")});
    CHECK(c.clustering == ClusteringMode::transitivity);
}

TEST_CASE("snapshot written on build reloads to the same stats") {
    TempDir tmp("snapshot");
    auto build = fixture_config(tmp.path / "a");
    build.snapshot = tmp.path / "graph.snap";
    app::run("stats", build);
    REQUIRE(fs::exists(build.snapshot));

    auto reload = fixture_config(tmp.path / "b");
    reload.transfers.clear();
    reload.registry.clear();
    reload.snapshot = build.snapshot;
    app::run("stats", reload);
    for (const char* period : {"full", "pre", "post"}) {
        const std::string name = std::string("stats/table_") + period + ".csv";
        CHECK(report::sha256_file(tmp.path / "a" / name) == report::sha256_file(tmp.path / "b" / name));
    }
}

TEST_CASE("cli: unknown subcommand prints usage and exits 2") {
    auto r = cli::run("frobnicate");
    CHECK(r.code == 2);
    CHECK(r.output.find("stats") != std::string::npos);
    CHECK(r.output.find("kind=usage") != std::string::npos);
}

TEST_CASE("cli: missing arguments and inputs") {
    CHECK(cli::run("").code == 2);
    auto r = cli::run("stats --transfers /nonexistent/t.csv --registry /nonexistent/r.csv");
    CHECK(r.code == 3);
    CHECK(r.output.find("kind=missing_input") != std::string::npos);
    CHECK(cli::run("stats --lag notanumber").code == 2);
    CHECK(cli::run("--help").code == 0);
}

TEST_CASE("cli: config file values are overridden by flags") {
    TempDir tmp("config");
    const fs::path dir = TMLG_FIXTURE_DIR;
    nlohmann::json config = {{"transfers", (dir / "transfers.csv").string()},
                             {"registry", (dir / "registry.csv").string()},
                             {"out", (tmp.path / "from_config").string()},
                             {"top-k", 2},
                             {"days", {"2022-04-03"}}};
    write_file(tmp.path / "config.json", config.dump());

    auto r = cli::run("concentration --config " + quote((tmp.path / "config.json").string()) + " --top-k 4");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(tmp.path / "from_config" / "concentration" / "USTC_top4.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "from_config" / "concentration" / "USTC_top2.csv"));
    auto table = report::read_table(tmp.path / "from_config" / "concentration" / "USTC_top4.csv");
    std::set<std::string> ranks;
    for (const auto& row : table.rows) {
        if (row[table.column("rank")] != "tail") ranks.insert(row[table.column("rank")]);
    }
    CHECK(ranks == std::set<std::string>{"1", "2", "3", "4"});

    write_file(tmp.path / "bad.json", R"({"lags": 3})");
    auto bad = cli::run("stats --config " + quote((tmp.path / "bad.json").string()));
    CHECK(bad.code == 2);
    CHECK(bad.output.find("lags") != std::string::npos);

    CHECK(cli::run("stats --config " + quote((tmp.path / "absent.json").string())).code == 3);
}

TEST_CASE("cli: output directory defaults to the environment variable") {
    TempDir tmp("env");
    auto r = cli::run("stats " + cli::fixture_args(),
                      std::string(app::kOutputDirEnv) + "=" + quote((tmp.path / "env_out").string()));
    REQUIRE(r.code == 0);
    CHECK(fs::exists(tmp.path / "env_out" / "manifest.json"));
    CHECK(r.output.find("manifest.json") != std::string::npos);
}

TEST_CASE("cli: bad input exits 4 and flat series exit 5") {
    TempDir tmp("cli_codes");
    write_file(tmp.path / "registry.csv", "contract_address,ticker,decimals\n0xabc,USDC,-3\n");
    auto r = cli::run("stats --transfers " + quote((fs::path(TMLG_FIXTURE_DIR) / "transfers.csv").string()) +
                      " --registry " + quote((tmp.path / "registry.csv").string()) + " --out " +
                      quote((tmp.path / "o").string()));
    CHECK(r.code == 4);
    CHECK(r.output.find("kind=bad_input") != std::string::npos);

    std::ifstream in(fs::path(TMLG_FIXTURE_DIR) / "registry.csv");
    std::string text{std::istreambuf_iterator<char>(in), {}};
    write_file(tmp.path / "flat.csv", text + "0x00000000000000000000000000000000000f1a70,FLAT,0\n");
    r = cli::run("correlate --transfers " + quote((fs::path(TMLG_FIXTURE_DIR) / "transfers.csv").string()) +
                 " --registry " + quote((tmp.path / "flat.csv").string()) + " --out " +
                 quote((tmp.path / "o").string()));
    CHECK(r.code == 5);
    CHECK(r.output.find("kind=degenerate_series") != std::string::npos);
}

TEST_CASE("every subcommand finishes on the fixture in under five seconds") {
    TempDir tmp("timing");
    for (const auto& name : app::subcommands()) {
        if (name == "all") continue;
        CAPTURE(name);
        const auto t0 = std::chrono::steady_clock::now();
        auto r = cli::run(name + " " + cli::fixture_args() + " --out " + quote((tmp.path / name).string()));
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CAPTURE(seconds);
        CHECK(r.code == 0);
        CHECK(seconds < 5.0);
    }
}
