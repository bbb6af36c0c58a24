#pragma once

#include "tmlg/decimal.hpp"
#include "tmlg/tgraph.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tmlg {

// ---------------------------------------------------------------------------
// Novelty
// ---------------------------------------------------------------------------

struct NoveltyPoint {
    Timestamp start = 0;
    std::uint64_t count = 0;
};

struct NoveltySeries {
    LayerId layer = 0;
    std::string ticker;
    Duration tau = kSecondsPerDay;
    std::vector<NoveltyPoint> points;
};

/// Per tumbling window of width tau over `range`: the directed pairs whose
/// first occurrence anywhere in the dataset falls inside the window.
NoveltySeries new_edge_series(const Graph& graph, LayerId layer, Duration tau, const TimeWindow& range);
/// Same with node first occurrences on the layer.
NoveltySeries new_node_series(const Graph& graph, LayerId layer, Duration tau, const TimeWindow& range);

// ---------------------------------------------------------------------------
// Layer activity
// ---------------------------------------------------------------------------

struct LayerActivityDistribution {
    TimeWindow window;
    std::optional<LayerId> focus;
    /// counts[m] = users active in exactly m layers; index 0 is unused.
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const;
};

/// Users active (sender or receiver) on each layer within `window`, binned by
/// how many layers they touched. With `focus`, only users active on that
/// layer in the window are counted.
LayerActivityDistribution period_layer_activity(const Graph& graph, const TimeWindow& window,
                                                std::optional<LayerId> focus = std::nullopt);

/// The UTC day starting at `day` (any timestamp in the day is accepted).
LayerActivityDistribution layer_activity(const Graph& graph, Timestamp day, std::optional<LayerId> focus = std::nullopt);

/// One distribution per tumbling window of `width` over `range`.
std::vector<LayerActivityDistribution> layer_activity_series(const Graph& graph, const TimeWindow& range,
                                                             Duration width, std::optional<LayerId> focus,
                                                             unsigned threads = 1);

// ---------------------------------------------------------------------------
// Favourite layer
// ---------------------------------------------------------------------------

/// nullopt means inactive in the period.
using FavoriteLayer = std::optional<LayerId>;

/// Layer with the most distinct directed pairs touching the wallet (either
/// endpoint) in the period; ties go to the earlier registry layer.
FavoriteLayer favorite_layer(const Graph& graph, NodeIndex node, const TimeWindow& period);
FavoriteLayer favorite_layer(const Graph& graph, std::string_view address, const TimeWindow& period);

/// favorite_layer for every node at once; index = NodeIndex.
std::vector<FavoriteLayer> favorite_layers(const Graph& graph, const TimeWindow& period);

struct TransitionMatrix {
    LayerId focus = 0;
    /// Layer tickers followed by "inactive"; shared by rows and columns.
    std::vector<std::string> labels;
    /// cells[pre favourite][post favourite]; the last index is inactive.
    std::vector<std::vector<std::uint64_t>> cells;
    std::uint64_t cohort_size = 0;

    std::size_t inactive_index() const { return labels.size() - 1; }
    std::uint64_t total() const;
};

/// Cohort: wallets with at least one event on `focus` during `pre`. Each is
/// counted at (favourite in pre, favourite in post or inactive).
TransitionMatrix favorite_transitions(const Graph& graph, LayerId focus, const TimeWindow& pre,
                                      const TimeWindow& post);

// ---------------------------------------------------------------------------
// Seller concentration
// ---------------------------------------------------------------------------

inline constexpr std::string_view kZeroAddress = "0x0000000000000000000000000000000000000000";

struct ConcentrationEntry {
    std::string wallet;
    Decimal tokens_sold;
    double share = 0.0;
};

struct ConcentrationReport {
    LayerId layer = 0;
    std::string ticker;
    Timestamp day = 0;
    std::size_t k = 0;
    Decimal total_sold;
    std::size_t sellers = 0;
    /// Top-k by tokens sold, descending; ties by wallet address ascending.
    std::vector<ConcentrationEntry> entries;
    Decimal tail_tokens;
    double tail_share = 0.0;
    std::vector<std::string> excluded;
    bool no_activity = false;
};

/// Outgoing token totals per wallet on `layer` during the UTC day containing
/// `day`, after dropping `exclude`. Shares are exact-ratio conversions of
/// the decimal totals.
ConcentrationReport seller_concentration(const Graph& graph, LayerId layer, Timestamp day, std::size_t k,
                                         const std::set<std::string>& exclude = {std::string(kZeroAddress)});

struct RecurrentSeller {
    std::string wallet;
    std::vector<Timestamp> days;  // ascending
};

/// Wallets in the top-k of at least two reports, ordered by number of
/// appearances (desc) then wallet (asc). Throws with fewer than two reports.
std::vector<RecurrentSeller> recurrent_top_sellers(const std::vector<ConcentrationReport>& reports);

}  // namespace tmlg
