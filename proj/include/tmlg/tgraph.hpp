#pragma once

#include "tmlg/decimal.hpp"
#include "tmlg/ingest.hpp"
#include "tmlg/time.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tmlg {

/// Dense node index in [0, node_count()).
using NodeIndex = std::uint32_t;

struct Edge {
    NodeIndex source = 0;
    NodeIndex target = 0;
    Timestamp timestamp = 0;
    Decimal amount;
};

/// Subset of at most 64 layers.
class LayerSet {
public:
    constexpr LayerSet() = default;
    static constexpr LayerSet none() { return LayerSet(); }
    static LayerSet all(std::size_t layer_count);
    static LayerSet single(LayerId layer) { return LayerSet(std::uint64_t{1} << layer); }

    bool contains(LayerId layer) const { return layer < 64 && ((bits_ >> layer) & 1U); }
    LayerSet with(LayerId layer) const { return LayerSet(bits_ | (std::uint64_t{1} << layer)); }
    std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    bool empty() const { return bits_ == 0; }
    std::uint64_t bits() const { return bits_; }
    std::vector<LayerId> layers() const;
    bool operator==(const LayerSet&) const = default;

private:
    constexpr explicit LayerSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

/// Packs a directed pair into one sortable key.
constexpr std::uint64_t pair_key(NodeIndex source, NodeIndex target) {
    return (static_cast<std::uint64_t>(source) << 32) | target;
}
constexpr NodeIndex key_source(std::uint64_t key) { return static_cast<NodeIndex>(key >> 32); }
constexpr NodeIndex key_target(std::uint64_t key) { return static_cast<NodeIndex>(key & 0xffffffffU); }

/// Immutable time-indexed multilayer transfer graph.
///
/// Node indices follow first appearance in the time-sorted event stream.
/// Each layer keeps its events sorted by timestamp plus first-occurrence
/// indexes for directed pairs and for nodes, computed once at build time.
class TemporalMultilayerGraph {
public:
    struct FirstSeen {
        std::uint64_t key;  // pair_key() or a NodeIndex
        Timestamp timestamp;
    };

    TemporalMultilayerGraph() = default;

    /// Throws std::invalid_argument if `events` is not sorted by timestamp or
    /// references an unregistered layer.
    static TemporalMultilayerGraph build(std::span<const TransferEvent> events, const WalletDictionary& wallets,
                                         const LayerRegistry& registry);
    static TemporalMultilayerGraph build(const TransferLog& log, const LayerRegistry& registry) {
        return build(log.events, log.wallets, registry);
    }

    const LayerRegistry& registry() const { return registry_; }
    std::size_t layer_count() const { return registry_.size(); }
    LayerSet all_layers() const { return LayerSet::all(layer_count()); }

    std::size_t node_count() const { return addresses_.size(); }
    std::size_t event_count() const;
    const std::string& address(NodeIndex node) const { return addresses_.at(node); }
    std::optional<NodeIndex> find_node(std::string_view address) const;

    /// [earliest, latest + 1), or nullopt for an empty graph.
    std::optional<TimeWindow> bounds() const;

    std::span<const Edge> events(LayerId layer) const { return layers_.at(layer).events; }
    /// Events of one layer with window.start <= t < window.end.
    std::span<const Edge> events(LayerId layer, const TimeWindow& window) const;

    std::optional<Timestamp> first_seen_edge(LayerId layer, NodeIndex source, NodeIndex target) const;
    std::optional<Timestamp> first_seen_node(LayerId layer, NodeIndex node) const;
    /// Sorted by key; one entry per distinct directed pair of the layer.
    std::span<const FirstSeen> edge_first_seen(LayerId layer) const { return layers_.at(layer).edge_first_seen; }
    /// Sorted by node index; one entry per node active on the layer.
    std::span<const FirstSeen> node_first_seen(LayerId layer) const { return layers_.at(layer).node_first_seen; }

    /// Writes the version-tagged binary snapshot described in docs/formats.md.
    void save_snapshot(const std::filesystem::path& path) const;
    static TemporalMultilayerGraph load_snapshot(const std::filesystem::path& path);

    bool operator==(const TemporalMultilayerGraph& other) const;

private:
    struct Layer {
        std::vector<Edge> events;
        std::vector<FirstSeen> edge_first_seen;
        std::vector<FirstSeen> node_first_seen;
    };

    void index_layers();

    LayerRegistry registry_;
    std::vector<std::string> addresses_;
    std::unordered_map<std::string, NodeIndex> node_ids_;
    std::vector<Layer> layers_;
};

using Graph = TemporalMultilayerGraph;

/// Read-only slice of a graph: the events of the selected layers whose
/// timestamp falls in the half-open window. Must not outlive the graph.
class WindowView {
public:
    WindowView(const Graph& graph, TimeWindow window, LayerSet layers);

    const Graph& graph() const { return *graph_; }
    const TimeWindow& window() const { return window_; }
    LayerSet layers() const { return layers_; }

    std::span<const Edge> events(LayerId layer) const;
    std::size_t transaction_count() const;

    template <typename F>
    void for_each_event(F&& f) const {
        for (LayerId layer : layers_.layers()) {
            for (const Edge& e : events(layer)) f(layer, e);
        }
    }

private:
    const Graph* graph_;
    TimeWindow window_;
    LayerSet layers_;
    std::vector<std::span<const Edge>> slices_;
};

WindowView window(const Graph& graph, const TimeWindow& w, LayerSet layers);

/// [range.start + i*step, +width) for every i whose start is before range.end.
/// Throws std::invalid_argument unless width > 0 and step > 0.
std::vector<TimeWindow> rolling_windows(const TimeWindow& range, Duration width, Duration step);

/// Distinct counterparties of `node` in the view (in and out merged; a
/// self-loop counts the node itself once).
std::size_t degree(const WindowView& view, NodeIndex node);
std::size_t degree(const WindowView& view, std::string_view address);

/// Inbound minus outbound amounts within the view. Self-loops net to zero.
Decimal node_balance(const WindowView& view, NodeIndex node);
Decimal node_balance(const WindowView& view, std::string_view address);

std::optional<Timestamp> first_seen_edge(const Graph& graph, LayerId layer, std::string_view source,
                                         std::string_view target);

/// Pre-crash / exclusion / post-crash split plus labelled event dates.
struct PeriodConfig {
    TimeWindow pre;
    TimeWindow exclusion;
    TimeWindow post;
    std::vector<std::pair<std::string, Timestamp>> markers;

    /// Throws std::invalid_argument unless pre, exclusion and post are
    /// ordered and pairwise disjoint.
    void validate() const;
    /// [pre.start, post.end)
    TimeWindow full_range() const { return TimeWindow(pre.start, post.end); }
    std::optional<Timestamp> marker(std::string_view label) const;
};

/// Pre [2022-04-01, 2022-05-02), exclusion [2022-05-02, 2022-05-17),
/// post [2022-05-17, 2022-06-16); S1 2022-04-03, S2 2022-04-19,
/// C 2022-05-09, T2 2022-05-27.
PeriodConfig default_period_config();

}  // namespace tmlg
