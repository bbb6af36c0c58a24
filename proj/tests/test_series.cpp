#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

#include "tmlg/series.hpp"

#include <cmath>
#include <random>

using namespace tmlg;

namespace {

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    double x = 0.0;
    for (auto& p : v) {
        x += static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
        p = x;
    }
    return v;
}

// x and y of length n with y[t + s] == x[t].
std::pair<std::vector<double>, std::vector<double>> shifted(std::size_t n, int s, std::uint64_t seed) {
    auto base = random_walk(n + static_cast<std::size_t>(s), seed);
    std::vector<double> x(base.begin() + s, base.end());
    std::vector<double> y(base.begin(), base.begin() + static_cast<long>(n));
    return {x, y};
}

}  // namespace

TEST_CASE("self correlation and sign flip") {
    auto x = random_walk(60, 1);
    auto self = cross_correlation(x, x, 10, 10);
    CHECK(self.best_lag == 0);
    CHECK(std::fabs(self.values.at(0) - 1.0) <= 1e-9);
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    CHECK(std::fabs(cross_correlation(x, neg, 10, 10).values.at(0) + 1.0) <= 1e-9);
}

TEST_CASE("planted shifts are recovered") {
    for (int s : {1, 3, 7}) {
        auto [x, y] = shifted(60, s, 42 + static_cast<std::uint64_t>(s));
        auto cc = cross_correlation(x, y, 10, 10);
        CHECK(cc.best_lag == s);
        CHECK(std::fabs(cc.best_rho - 1.0) <= 1e-9);
    }
}

TEST_CASE("matches a two-pass Pearson on every lag") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(seed);
        std::size_t n = 15 + rng() % 60;
        auto x = random_walk(n, seed * 2 + 1);
        auto y = random_walk(n, seed * 2 + 2);
        int lag = static_cast<int>(rng() % 12);
        std::size_t overlap = 2 + rng() % 12;
        auto cc = cross_correlation(x, y, lag, overlap);
        std::size_t defined = 0;
        for (int k = -lag; k <= lag; ++k) {
            auto expect = oracle::lagged_pearson(x, y, k, overlap);
            CHECK(cc.values.count(k) == (expect ? 1U : 0U));
            if (expect) {
                ++defined;
                CHECK(std::fabs(cc.values.at(k) - *expect) <= 1e-12);
                CHECK(cc.best_rho >= cc.values.at(k));
                CHECK(cc.values.at(k) >= -1.0 - 1e-9);
                CHECK(cc.values.at(k) <= 1.0 + 1e-9);
            }
        }
        CHECK(cc.values.size() == defined);
    }
}

TEST_CASE("affine invariance and symmetry") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto x = random_walk(50, seed + 500);
        auto y = random_walk(50, seed + 900);
        std::vector<double> ax(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) ax[i] = 3.5 * x[i] + 17.0;
        auto a = cross_correlation(x, y, 10, 10);
        auto b = cross_correlation(ax, y, 10, 10);
        CHECK(std::fabs(a.best_rho - b.best_rho) <= 1e-9);
        CHECK(a.best_lag == b.best_lag);
        auto r = cross_correlation(y, x, 10, 10);
        CHECK(std::fabs(a.best_rho - r.best_rho) <= 1e-9);
        CHECK(a.best_lag == -r.best_lag);
    }
}

TEST_CASE("ties prefer the smallest lag, then the negative one") {
    // A period-4 signal correlates perfectly at lags 0 and +-4.
    std::vector<double> x;
    for (int i = 0; i < 40; ++i) x.push_back(static_cast<double>(i % 4));
    auto cc = cross_correlation(x, x, 8, 10);
    CHECK(cc.best_lag == 0);
    // Shifted by 2: lags -2 and +2 tie.
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) y.push_back(static_cast<double>((i + 2) % 4));
    auto t = cross_correlation(x, y, 3, 10);
    CHECK(t.values.at(-2) == doctest::Approx(1.0));
    CHECK(t.values.at(2) == doctest::Approx(1.0));
    CHECK(t.best_lag == -2);
}

TEST_CASE("degenerate series") {
    std::vector<double> flat(30, 4.0);
    auto x = random_walk(30, 3);
    CHECK_THROWS_AS(cross_correlation(flat, x, 5, 10), DegenerateSeriesError);
    // Overlap below the minimum at every lag.
    CHECK_THROWS_AS(cross_correlation(x, x, 2, 31), DegenerateSeriesError);
    std::vector<double> shorter(10, 1.0);
    CHECK_THROWS_AS(cross_correlation(x, shorter, 2, 5), std::invalid_argument);
}

TEST_CASE("extract series") {
    const Timestamp d = kSecondsPerDay;
    std::vector<oracle::Event> events;
    for (int i = 0; i < 4; ++i) events.push_back({"a", "b" + std::to_string(i), 10 + i, Decimal(2), "A"});
    events.push_back({"a", "b", 2 * d + 5, Decimal(1), "A"});
    auto g = fixture::build(events, {"A"});
    auto s = extract_series(g, 0, Metric::transactions, TimeWindow(0, 3 * d), d, d);
    REQUIRE(s.points.size() == 3);
    CHECK(s.values() == std::vector<double>{4, 0, 1});
    CHECK(s.points[1].start == d);
    CHECK(extract_series(g, 0, Metric::nodes, TimeWindow(0, 3 * d), d, d).values() == std::vector<double>{5, 0, 2});
    CHECK(extract_series(g, 0, Metric::token_volume, TimeWindow(0, 3 * d), d, d).values() ==
          std::vector<double>{8, 0, 1});
    CHECK_THROWS_AS(extract_series(g, 0, Metric::usd_volume, TimeWindow(0, d), d, d), std::invalid_argument);
    auto rolling = extract_series(g, 0, Metric::transactions, TimeWindow(0, 3 * d), 2 * d, d);
    CHECK(rolling.values() == std::vector<double>{4, 1, 1});
}

TEST_CASE("daily series equal brute-force buckets") {
    for (std::uint64_t seed = 10; seed < 40; ++seed) {
        auto f = fixture::random(seed, {.max_nodes = 80, .max_events = 600, .max_layers = 3, .max_days = 8});
        auto g = fixture::build(f.events, f.tickers);
        TimeWindow range(f.start, f.end);
        for (LayerId l = 0; l < g.layer_count(); ++l) {
            auto s = extract_series(g, l, Metric::transactions, range, kSecondsPerDay, kSecondsPerDay, nullptr, 3);
            auto e = extract_series(g, l, Metric::unique_edges, range, kSecondsPerDay, kSecondsPerDay);
            for (const auto& p : s.points) {
                auto sub = oracle::select(f.events, p.start, p.start + kSecondsPerDay, {f.tickers[l]});
                CHECK(p.value == static_cast<double>(sub.size()));
            }
            for (const auto& p : e.points) {
                auto sub = oracle::select(f.events, p.start, p.start + kSecondsPerDay, {f.tickers[l]});
                CHECK(p.value == static_cast<double>(oracle::census(sub).unique_edges));
            }
        }
    }
}

TEST_CASE("metric names round trip") {
    for (auto m : all_metrics()) CHECK(parse_metric(metric_name(m)) == m);
    CHECK(all_metrics().size() == 10);
    CHECK_FALSE(parse_metric("volume").has_value());
}

TEST_CASE("correlation matrix") {
    fixture::Random f;
    for (std::uint64_t seed = 5; f.tickers.size() < 3; ++seed) {
        f = fixture::random(seed, {.max_nodes = 150, .max_events = 2000, .max_layers = 3, .max_days = 10});
    }
    auto g = fixture::build(f.events, f.tickers);
    TimeWindow range(utc_day_start(f.start), utc_day_start(f.start) + 30 * kSecondsPerDay);
    CorrelationOptions opts{.max_lag = 3, .min_overlap = 5};
    try {
        auto m1 = correlation_matrix(g, f.tickers, Metric::transactions, range, opts, nullptr, "pre");
        opts.threads = 4;
        auto m8 = correlation_matrix(g, f.tickers, Metric::transactions, range, opts, nullptr, "pre");
        CHECK(m1.cells == m8.cells);
        CHECK(m1.period_label == "pre");
        for (std::size_t i = 0; i < m1.tickers.size(); ++i) {
            CHECK(m1.cells[i][i] == 1.0);
            for (std::size_t j = 0; j < m1.tickers.size(); ++j) {
                CHECK(std::fabs(m1.cells[i][j] - m1.cells[j][i]) <= 1e-9);
            }
        }
    } catch (const DegenerateSeriesError&) {
        // A random layer can be silent for the whole range; covered below.
    }
    CHECK_THROWS_AS(correlation_matrix(g, {f.tickers[0]}, Metric::transactions, range, opts), std::invalid_argument);
}

TEST_CASE("identical layers correlate perfectly and flat layers name the ticker") {
    std::vector<oracle::Event> events;
    std::mt19937_64 rng(9);
    for (int day = 0; day < 30; ++day) {
        int n = 1 + static_cast<int>(rng() % 9);
        for (int i = 0; i < n; ++i) {
            for (const char* t : {"A", "B"}) {
                events.push_back({"u" + std::to_string(i), "v", day * kSecondsPerDay + i, Decimal(1), t});
            }
            events.push_back({"c", "d", day * kSecondsPerDay + i, Decimal(1), "C"});
        }
        events.push_back({"q", "r", day * kSecondsPerDay + 50, Decimal(1), "Flat"});
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    auto g = fixture::build(events, {"A", "B", "C", "Flat"});
    TimeWindow range(0, 30 * kSecondsPerDay);
    auto m = correlation_matrix(g, {"A", "B"}, Metric::transactions, range, {});
    CHECK(std::fabs(m.cells[0][1] - 1.0) <= 1e-9);
    CHECK(m.best_lags[0][1] == 0);
    try {
        correlation_matrix(g, {"A", "Flat"}, Metric::transactions, range, {});
        FAIL("expected a degenerate series");
    } catch (const DegenerateSeriesError& e) {
        CHECK(std::string(e.what()).find("Flat") != std::string::npos);
    }
}
