#pragma once

// Builders for small graphs: hand-written event lists and seeded random
// fixtures. Both go through the CSV ingest path so tests see the same graph
// the CLI would build.

#include "oracle.hpp"

#include "tmlg/ingest.hpp"
#include "tmlg/tgraph.hpp"

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fixture {

inline std::string contract_for(const std::string& ticker) {
    std::string hex;
    for (unsigned char c : ticker) {
        static constexpr char kHex[] = "0123456789abcdef";
        hex += kHex[c >> 4];
        hex += kHex[c & 0xf];
    }
    return "0x" + std::string(40 - hex.size(), 'c') + hex;
}

inline tmlg::LayerRegistry registry(const std::vector<std::string>& tickers) {
    tmlg::LayerRegistry r;
    for (const auto& t : tickers) r.add(contract_for(t), t, 0);
    return r;
}

inline std::string transfers_csv(const std::vector<oracle::Event>& events) {
    std::ostringstream out;
    out << "from_address,to_address,time_stamp,value,contract_address\n";
    for (const auto& e : events) {
        out << e.from << ',' << e.to << ',' << e.time << ',' << e.amount.to_string() << ','
            << contract_for(e.ticker) << '\n';
    }
    return out.str();
}

inline tmlg::Graph build(const std::vector<oracle::Event>& events, const std::vector<std::string>& tickers) {
    auto reg = registry(tickers);
    std::istringstream in(transfers_csv(events));
    tmlg::LoadOptions opts;
    opts.strict = true;
    auto log = tmlg::read_transfers(in, reg, opts);
    return tmlg::Graph::build(log, reg);
}

/// Wallet addresses are short readable strings ("w17"); the graph only needs
/// them to be distinct.
inline std::string wallet(std::size_t i) { return "0xw" + std::to_string(i); }

struct Random {
    std::vector<std::string> tickers;
    std::vector<oracle::Event> events;
    std::map<std::pair<std::string, tmlg::Timestamp>, double> closes;
    tmlg::PriceSeries prices;
    tmlg::Timestamp start = 0;
    tmlg::Timestamp end = 0;
    std::size_t nodes = 0;
};

struct Limits {
    std::size_t max_nodes = 200;
    std::size_t max_events = 2000;
    std::size_t max_layers = 3;
    int max_days = 10;
};

inline Random random(std::uint64_t seed, const Limits& limits = {}) {
    std::mt19937_64 rng(seed);
    auto below = [&](std::uint64_t n) { return rng() % n; };
    auto chance = [&](unsigned percent) { return below(100) < percent; };

    Random f;
    const std::size_t layers = 1 + below(limits.max_layers);
    for (std::size_t l = 0; l < layers; ++l) f.tickers.push_back("T" + std::to_string(l));
    f.nodes = 1 + below(limits.max_nodes);
    const std::size_t count = below(limits.max_events + 1);
    const int days = 1 + static_cast<int>(below(static_cast<std::uint64_t>(limits.max_days)));
    f.start = tmlg::parse_iso_date("2022-04-01") + static_cast<tmlg::Timestamp>(below(1000)) * 60;
    f.end = f.start + days * tmlg::kSecondsPerDay;
    // Sparse graphs hit isolated components, dense ones hit triangles.
    const std::size_t active = 1 + below(f.nodes);

    for (std::size_t i = 0; i < count; ++i) {
        oracle::Event e;
        e.ticker = f.tickers[below(layers)];
        std::size_t a = below(active);
        std::size_t b = chance(3) ? a : below(active);
        if (!f.events.empty() && chance(15)) {
            const auto& prev = f.events[below(f.events.size())];
            e.from = prev.to;
            e.to = prev.from;
        } else {
            e.from = wallet(a);
            e.to = wallet(b);
        }
        // Coarse times so several events share a timestamp or a boundary.
        e.time = f.start + static_cast<tmlg::Timestamp>(below(static_cast<std::uint64_t>(days) * 96)) * 900;
        e.amount = tmlg::Decimal::from_parts(static_cast<tmlg::Decimal::Mantissa>(below(1'000'000)),
                                             static_cast<int>(below(5)));
        f.events.push_back(std::move(e));
    }
    std::stable_sort(f.events.begin(), f.events.end(),
                     [](const oracle::Event& x, const oracle::Event& y) { return x.time < y.time; });

    const tmlg::Timestamp first_day = tmlg::utc_day_start(f.start);
    for (const auto& t : f.tickers) {
        for (tmlg::Timestamp d = first_day; d < f.end; d += tmlg::kSecondsPerDay) {
            if (chance(10)) continue;  // a few missing closes
            double close = static_cast<double>(1 + below(200000)) / 1000.0;
            f.closes[{t, d}] = close;
            f.prices.add(t, d, close);
        }
    }
    return f;
}

}  // namespace fixture
