#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

#include "tmlg/metrics.hpp"

#include <cmath>

using namespace tmlg;

namespace {

oracle::Event ev(std::string from, std::string to, Timestamp t = 1, const char* amount = "1",
                 std::string ticker = "A") {
    return {std::move(from), std::move(to), t, Decimal::parse(amount), std::move(ticker)};
}

LayerMetrics metrics_of(const std::vector<oracle::Event>& events, const PriceSeries* prices = nullptr) {
    auto g = fixture::build(events, {"A"});
    return compute_metrics(window(g, TimeWindow(0, 1'000'000), g.all_layers()), {.prices = prices});
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9; }

}  // namespace

TEST_CASE("single event") {
    auto m = metrics_of({ev("a", "b")});
    CHECK(m.nodes == 2);
    CHECK(m.unique_edges == 1);
    CHECK(m.transactions == 1);
    CHECK(m.sources == 1);
    CHECK(m.sinks == 1);
    CHECK(m.reciprocity == 0.0);
    CHECK(m.avg_degree == 1.0);
    CHECK(m.density == 0.5);
    CHECK(m.largest_wcc_fraction == 1.0);
    CHECK(m.clustering == 0.0);
}

TEST_CASE("reciprocal pair") {
    auto m = metrics_of({ev("a", "b"), ev("b", "a")});
    CHECK(m.reciprocity == 1.0);
    CHECK(m.sources == 0);
    CHECK(m.sinks == 0);
}

TEST_CASE("star average degree") {
    auto m = metrics_of({ev("c", "a"), ev("c", "b"), ev("c", "d")});
    CHECK(m.avg_degree == 1.5);
    auto g = fixture::build({ev("c", "a"), ev("c", "b"), ev("c", "d")}, {"A"});
    auto h = degree_distribution(window(g, TimeWindow(0, 10), g.all_layers()));
    CHECK(h.counts == std::map<std::uint64_t, std::uint64_t>{{1, 3}, {3, 1}});
    CHECK(h.total() == 4);
}

TEST_CASE("complete directed triad") {
    auto m = metrics_of({ev("a", "b"), ev("b", "a"), ev("b", "c"), ev("c", "b"), ev("a", "c"), ev("c", "a")});
    CHECK(m.density == 1.0);
    CHECK(m.clustering == 1.0);
}

TEST_CASE("triangle in any orientation and a path") {
    CHECK(metrics_of({ev("a", "b"), ev("c", "b"), ev("a", "c")}).clustering == 1.0);
    CHECK(metrics_of({ev("a", "b"), ev("b", "c")}).clustering == 0.0);
}

TEST_CASE("two components") {
    CHECK(metrics_of({ev("a", "b"), ev("c", "d")}).largest_wcc_fraction == 0.5);
}

TEST_CASE("self loops count as activity but not as pairs") {
    auto m = metrics_of({ev("a", "a", 1, "4"), ev("a", "b", 2, "1")});
    CHECK(m.nodes == 2);
    CHECK(m.transactions == 2);
    CHECK(m.unique_edges == 2);
    CHECK(m.token_volume == Decimal(5));
    CHECK(m.density == 0.5);  // one non-loop pair over 2 * 1
    CHECK(m.avg_degree == 1.5);  // a: {a, b}, b: {a}
    CHECK(m.sources == 0);       // a also receives from itself
    CHECK(m.sinks == 1);
}

TEST_CASE("empty view is all zero") {
    auto g = fixture::build({ev("a", "b", 100)}, {"A"});
    auto m = compute_metrics(window(g, TimeWindow(0, 50), g.all_layers()));
    CHECK(m.nodes == 0);
    CHECK(m.transactions == 0);
    CHECK(m.token_volume.is_zero());
    CHECK(m.reciprocity == 0.0);
    CHECK(m.avg_degree == 0.0);
    CHECK(m.density == 0.0);
    CHECK(m.clustering == 0.0);
    CHECK(m.largest_wcc_fraction == 0.0);
    CHECK(degree_distribution(window(g, TimeWindow(0, 50), g.all_layers())).counts.empty());
}

TEST_CASE("usd volume prices each event on its day") {
    PriceSeries prices;
    prices.add("A", 0, 1.0);
    prices.add("A", kSecondsPerDay, 0.35);
    auto m = metrics_of({ev("a", "b", 10, "3"), ev("a", "b", kSecondsPerDay + 5, "2"),
                         ev("a", "b", 5 * kSecondsPerDay, "9")},
                        &prices);
    CHECK(m.usd_volume == doctest::Approx(3.7).epsilon(1e-12));
    CHECK(m.usd_missing_price_events == 1);
}

TEST_CASE("transitivity switch") {
    // Triangle a-b-c plus pendant d on a: 3 * 1 / (3 + 1 + 1 + 0) = 0.6.
    auto g = fixture::build({ev("a", "b"), ev("b", "c"), ev("c", "a"), ev("a", "d")}, {"A"});
    auto v = window(g, TimeWindow(0, 10), g.all_layers());
    CHECK(clustering(v, ClusteringMode::transitivity) == doctest::Approx(0.6));
    // Local: a = 1/3, b = c = 1, d = 0.
    CHECK(clustering(v) == doctest::Approx((1.0 / 3 + 2) / 4));
}

TEST_CASE("multi-layer views merge parallel pairs") {
    auto g = fixture::build({ev("a", "b", 1, "1", "A"), ev("a", "b", 2, "1", "B"), ev("b", "c", 3, "1", "B")},
                            {"A", "B"});
    auto full = compute_metrics(window(g, TimeWindow(0, 10), g.all_layers()));
    auto a = compute_metrics(window(g, TimeWindow(0, 10), LayerSet::single(0)));
    auto b = compute_metrics(window(g, TimeWindow(0, 10), LayerSet::single(1)));
    CHECK(full.unique_edges == 2);
    CHECK(a.unique_edges + b.unique_edges == 3);
    CHECK(full.transactions == a.transactions + b.transactions);
    CHECK(full.nodes < a.nodes + b.nodes);
}

TEST_CASE("every operation matches the naive oracle") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        CAPTURE(seed);
        auto f = fixture::random(seed, {.max_nodes = 120, .max_events = 800, .max_layers = 3, .max_days = 4});
        auto g = fixture::build(f.events, f.tickers);
        for (LayerId l = 0; l < g.layer_count(); ++l) {
            TimeWindow w(f.start, f.start + 2 * kSecondsPerDay);
            auto sub = oracle::select(f.events, w.start, w.end, {f.tickers[l]});
            auto view = window(g, w, LayerSet::single(l));
            auto m = compute_metrics(view, {.prices = &f.prices});
            auto c = oracle::census(sub);
            CHECK(m.nodes == c.nodes);
            CHECK(m.unique_edges == c.unique_edges);
            CHECK(m.transactions == c.transactions);
            CHECK(m.token_volume == c.volume);
            CHECK(m.active_out == c.active_out);
            CHECK(m.active_in == c.active_in);
            CHECK(m.sources == c.sources);
            CHECK(m.sinks == c.sinks);
            CHECK(close(m.reciprocity, oracle::reciprocity(sub)));
            CHECK(close(m.avg_degree, oracle::avg_degree(sub)));
            CHECK(close(m.density, oracle::density(sub)));
            CHECK(close(m.clustering, oracle::mean_local_clustering(sub)));
            CHECK(close(clustering(view, ClusteringMode::transitivity), oracle::transitivity(sub)));
            CHECK(close(m.largest_wcc_fraction, oracle::largest_wcc_fraction(sub)));
            CHECK(degree_distribution(view).counts == oracle::degree_histogram(sub));
            auto usd = oracle::usd_volume(sub, f.closes);
            CHECK(std::fabs(m.usd_volume - static_cast<double>(usd.usd)) <= 1e-9 * std::max(1.0L, usd.usd));
            CHECK(m.usd_missing_price_events == usd.missing);

            // Standalone entry points agree with the combined record.
            CHECK(census(view).sinks == m.sinks);
            CHECK(reciprocity(view) == m.reciprocity);
            CHECK(avg_degree(view) == m.avg_degree);
            CHECK(density(view) == m.density);
            CHECK(largest_wcc_fraction(view) == m.largest_wcc_fraction);
            CHECK(usd_volume(view, f.prices).missing_price_events == usd.missing);
        }
    }
}

TEST_CASE("ranges and invariants hold on 10^4 random views") {
    std::size_t views = 0;
    for (std::uint64_t seed = 1000; views < 10000; ++seed) {
        auto f = fixture::random(seed, {.max_nodes = 25, .max_events = 60, .max_layers = 2, .max_days = 2});
        auto g = fixture::build(f.events, f.tickers);
        for (LayerId l = 0; l < g.layer_count(); ++l, ++views) {
            auto view = window(g, TimeWindow(f.start, f.end), LayerSet::single(l));
            auto m = compute_metrics(view);
            auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
            CHECK(in_unit(m.reciprocity));
            CHECK(in_unit(m.density));
            CHECK(in_unit(m.clustering));
            CHECK(in_unit(m.largest_wcc_fraction));
            CHECK(m.active_out <= m.nodes);
            CHECK(m.active_in <= m.nodes);
            CHECK(m.sources <= m.active_out);
            CHECK(m.sinks <= m.active_in);
            CHECK(m.sources + m.sinks <= m.nodes);
            CHECK(m.unique_edges <= m.transactions);
            if (m.nodes == 0) CHECK(m.transactions == 0);
        }
    }
}

TEST_CASE("degree histogram mass and log bins") {
    for (std::uint64_t seed = 300; seed < 340; ++seed) {
        auto f = fixture::random(seed);
        auto g = fixture::build(f.events, f.tickers);
        auto view = window(g, TimeWindow(f.start, f.end), g.all_layers());
        auto h = degree_distribution(view);
        CHECK(h.total() == compute_metrics(view).nodes);
        double mass = 0.0;
        std::uint64_t count = 0;
        for (const auto& bin : h.log_binned()) {
            mass += bin.probability;
            count += bin.count;
            CHECK(bin.lower < bin.upper);
            CHECK(close(bin.density * static_cast<double>(bin.upper - bin.lower), bin.probability));
        }
        if (h.total() > 0) CHECK(std::fabs(mass - 1.0) <= 1e-9);
        CHECK(count == h.total());
    }
    DegreeHistogram h;
    h.counts = {{1, 4}, {2, 2}, {3, 1}, {9, 1}};
    auto bins = h.log_binned(2.0);
    REQUIRE(bins.size() == 4);
    CHECK(bins[0].lower == 1);
    CHECK(bins[0].upper == 2);
    CHECK(bins[1].count == 3);
    CHECK(bins[3].lower == 8);
    CHECK(bins[3].count == 1);
    CHECK_THROWS(h.log_binned(1.0));
}

TEST_CASE("scale invariance and direction blindness") {
    for (std::uint64_t seed = 400; seed < 430; ++seed) {
        auto f = fixture::random(seed, {.max_nodes = 60, .max_events = 300, .max_layers = 1, .max_days = 2});
        auto scaled = f.events;
        auto reversed = f.events;
        for (auto& e : scaled) e.amount = e.amount * Decimal::parse("3.7");
        for (auto& e : reversed) std::swap(e.from, e.to);
        auto g = fixture::build(f.events, f.tickers);
        auto gs = fixture::build(scaled, f.tickers);
        auto gr = fixture::build(reversed, f.tickers);
        TimeWindow w(f.start, f.end);
        auto a = compute_metrics(window(g, w, g.all_layers()));
        auto b = compute_metrics(window(gs, w, gs.all_layers()));
        auto r = compute_metrics(window(gr, w, gr.all_layers()));
        CHECK(a.nodes == b.nodes);
        CHECK(a.unique_edges == b.unique_edges);
        CHECK(a.sources == b.sources);
        CHECK(a.reciprocity == b.reciprocity);
        CHECK(a.avg_degree == b.avg_degree);
        CHECK(a.density == b.density);
        CHECK(a.clustering == b.clustering);
        CHECK(a.largest_wcc_fraction == b.largest_wcc_fraction);
        CHECK(a.largest_wcc_fraction == r.largest_wcc_fraction);
    }
}
