#include "tmlg/flows.hpp"

#include "tmlg/parallel.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace tmlg {
namespace {

NoveltySeries bucket_first_seen(const Graph& graph, LayerId layer, Duration tau, const TimeWindow& range,
                                std::span<const Graph::FirstSeen> index) {
    if (tau <= 0) throw std::invalid_argument("novelty window must be positive");
    NoveltySeries s;
    s.layer = layer;
    s.ticker = graph.registry()[layer].ticker;
    s.tau = tau;
    for (const auto& w : rolling_windows(range, tau, tau)) s.points.push_back({w.start, 0});
    for (const auto& entry : index) {
        if (entry.timestamp < range.start || entry.timestamp >= range.end) continue;
        auto bucket = static_cast<std::size_t>((entry.timestamp - range.start) / tau);
        ++s.points[bucket].count;
    }
    return s;
}

// Per-node bitmask of layers with at least one event in the window.
std::unordered_map<NodeIndex, std::uint64_t> active_layers(const Graph& graph, const TimeWindow& window) {
    std::unordered_map<NodeIndex, std::uint64_t> masks;
    for (LayerId l = 0; l < graph.layer_count(); ++l) {
        const std::uint64_t bit = std::uint64_t{1} << l;
        for (const Edge& e : graph.events(l, window)) {
            masks[e.source] |= bit;
            masks[e.target] |= bit;
        }
    }
    return masks;
}

// Distinct directed pairs per layer in the window, credited to both
// endpoints (once for a self-loop).
std::vector<std::uint32_t> pair_counts(const Graph& graph, const TimeWindow& period) {
    const std::size_t layers = graph.layer_count();
    std::vector<std::uint32_t> counts(graph.node_count() * layers, 0);
    std::vector<std::uint64_t> keys;
    for (LayerId l = 0; l < layers; ++l) {
        keys.clear();
        for (const Edge& e : graph.events(l, period)) keys.push_back(pair_key(e.source, e.target));
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        for (auto key : keys) {
            NodeIndex s = key_source(key);
            NodeIndex t = key_target(key);
            ++counts[s * layers + l];
            if (t != s) ++counts[t * layers + l];
        }
    }
    return counts;
}

FavoriteLayer pick_favorite(std::span<const std::uint32_t> per_layer) {
    FavoriteLayer best;
    std::uint32_t best_count = 0;
    for (std::size_t l = 0; l < per_layer.size(); ++l) {
        if (per_layer[l] > best_count) {
            best_count = per_layer[l];
            best = static_cast<LayerId>(l);
        }
    }
    return best;
}

}  // namespace

NoveltySeries new_edge_series(const Graph& graph, LayerId layer, Duration tau, const TimeWindow& range) {
    return bucket_first_seen(graph, layer, tau, range, graph.edge_first_seen(layer));
}

NoveltySeries new_node_series(const Graph& graph, LayerId layer, Duration tau, const TimeWindow& range) {
    return bucket_first_seen(graph, layer, tau, range, graph.node_first_seen(layer));
}

std::uint64_t LayerActivityDistribution::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

LayerActivityDistribution period_layer_activity(const Graph& graph, const TimeWindow& window,
                                                std::optional<LayerId> focus) {
    LayerActivityDistribution d;
    d.window = window;
    d.focus = focus;
    d.counts.assign(graph.layer_count() + 1, 0);
    for (const auto& [node, mask] : active_layers(graph, window)) {
        if (focus && !((mask >> *focus) & 1U)) continue;
        ++d.counts[static_cast<std::size_t>(std::popcount(mask))];
    }
    return d;
}

LayerActivityDistribution layer_activity(const Graph& graph, Timestamp day, std::optional<LayerId> focus) {
    Timestamp start = utc_day_start(day);
    return period_layer_activity(graph, TimeWindow(start, start + kSecondsPerDay), focus);
}

std::vector<LayerActivityDistribution> layer_activity_series(const Graph& graph, const TimeWindow& range,
                                                             Duration width, std::optional<LayerId> focus,
                                                             unsigned threads) {
    auto windows = rolling_windows(range, width, width);
    std::vector<LayerActivityDistribution> out(windows.size());
    parallel_for(windows.size(), threads,
                 [&](std::size_t i) { out[i] = period_layer_activity(graph, windows[i], focus); });
    return out;
}

FavoriteLayer favorite_layer(const Graph& graph, NodeIndex node, const TimeWindow& period) {
    std::vector<std::uint32_t> per_layer(graph.layer_count(), 0);
    std::vector<NodeIndex> partners_out;
    std::vector<NodeIndex> partners_in;
    for (LayerId l = 0; l < graph.layer_count(); ++l) {
        partners_out.clear();
        partners_in.clear();
        for (const Edge& e : graph.events(l, period)) {
            if (e.source == node) partners_out.push_back(e.target);
            else if (e.target == node) partners_in.push_back(e.source);
        }
        for (auto* v : {&partners_out, &partners_in}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }
        per_layer[l] = static_cast<std::uint32_t>(partners_out.size() + partners_in.size());
    }
    return pick_favorite(per_layer);
}

FavoriteLayer favorite_layer(const Graph& graph, std::string_view address, const TimeWindow& period) {
    auto node = graph.find_node(address);
    if (!node) return std::nullopt;
    return favorite_layer(graph, *node, period);
}

std::vector<FavoriteLayer> favorite_layers(const Graph& graph, const TimeWindow& period) {
    const std::size_t layers = graph.layer_count();
    auto counts = pair_counts(graph, period);
    std::vector<FavoriteLayer> out(graph.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = pick_favorite(std::span<const std::uint32_t>(counts).subspan(n * layers, layers));
    }
    return out;
}

std::uint64_t TransitionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : cells) {
        for (auto c : row) t += c;
    }
    return t;
}

TransitionMatrix favorite_transitions(const Graph& graph, LayerId focus, const TimeWindow& pre,
                                      const TimeWindow& post) {
    if (pre.start < post.end && post.start < pre.end) {
        throw std::invalid_argument("favourite transitions need disjoint pre and post periods");
    }
    TransitionMatrix m;
    m.focus = focus;
    for (const auto& info : graph.registry().layers()) m.labels.push_back(info.ticker);
    m.labels.emplace_back("inactive");
    m.cells.assign(m.labels.size(), std::vector<std::uint64_t>(m.labels.size(), 0));

    std::vector<bool> in_cohort(graph.node_count(), false);
    for (const Edge& e : graph.events(focus, pre)) {
        in_cohort[e.source] = true;
        in_cohort[e.target] = true;
    }
    auto before = favorite_layers(graph, pre);
    auto after = favorite_layers(graph, post);
    for (NodeIndex n = 0; n < graph.node_count(); ++n) {
        if (!in_cohort[n]) continue;
        std::size_t row = before[n] ? *before[n] : m.inactive_index();
        std::size_t col = after[n] ? *after[n] : m.inactive_index();
        ++m.cells[row][col];
        ++m.cohort_size;
    }
    return m;
}

ConcentrationReport seller_concentration(const Graph& graph, LayerId layer, Timestamp day, std::size_t k,
                                         const std::set<std::string>& exclude) {
    if (k < 1) throw std::invalid_argument("top-k needs k >= 1");
    ConcentrationReport r;
    r.layer = layer;
    r.ticker = graph.registry()[layer].ticker;
    r.day = utc_day_start(day);
    r.k = k;
    for (const auto& w : exclude) r.excluded.push_back(lowercase(w));
    std::sort(r.excluded.begin(), r.excluded.end());

    std::unordered_map<NodeIndex, Decimal> sold;
    for (const Edge& e : graph.events(layer, TimeWindow(r.day, r.day + kSecondsPerDay))) sold[e.source] += e.amount;
    std::vector<std::pair<std::string, Decimal>> sellers;
    sellers.reserve(sold.size());
    for (auto& [node, amount] : sold) {
        const std::string& address = graph.address(node);
        if (std::binary_search(r.excluded.begin(), r.excluded.end(), address)) continue;
        if (amount.is_zero()) continue;
        sellers.emplace_back(address, amount);
        r.total_sold += amount;
    }
    r.sellers = sellers.size();
    if (r.total_sold.is_zero()) {
        r.no_activity = true;
        return r;
    }
    std::sort(sellers.begin(), sellers.end(), [](const auto& a, const auto& b) {
        auto c = a.second <=> b.second;
        if (c != 0) return c > 0;
        return a.first < b.first;
    });
    Decimal top;
    for (std::size_t i = 0; i < sellers.size() && i < k; ++i) {
        r.entries.push_back({sellers[i].first, sellers[i].second, ratio(sellers[i].second, r.total_sold)});
        top += sellers[i].second;
    }
    r.tail_tokens = r.total_sold - top;
    r.tail_share = ratio(r.tail_tokens, r.total_sold);
    return r;
}

std::vector<RecurrentSeller> recurrent_top_sellers(const std::vector<ConcentrationReport>& reports) {
    if (reports.size() < 2) throw std::invalid_argument("recurrent sellers need at least two reports");
    std::map<std::string, std::set<Timestamp>> seen;
    for (const auto& r : reports) {
        for (const auto& e : r.entries) seen[e.wallet].insert(r.day);
    }
    std::vector<RecurrentSeller> out;
    for (auto& [wallet, days] : seen) {
        if (days.size() < 2) continue;
        out.push_back({wallet, std::vector<Timestamp>(days.begin(), days.end())});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RecurrentSeller& a, const RecurrentSeller& b) { return a.days.size() > b.days.size(); });
    return out;
}

}  // namespace tmlg
