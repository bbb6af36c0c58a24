#pragma once

#include "tmlg/decimal.hpp"
#include "tmlg/ingest.hpp"
#include "tmlg/tgraph.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace tmlg {

/// Structural statistics of one window. A view over several layers is
/// measured on its layer-merged projection: a wallet pair trading on two
/// layers is one edge, and a wallet is a source only if it never receives on
/// any selected layer.
struct LayerMetrics {
    std::uint64_t nodes = 0;
    std::uint64_t unique_edges = 0;  // distinct directed pairs, self-loops included
    std::uint64_t transactions = 0;
    Decimal token_volume;
    double usd_volume = 0.0;
    std::uint64_t usd_missing_price_events = 0;
    std::uint64_t active_out = 0;
    std::uint64_t active_in = 0;
    std::uint64_t sources = 0;
    std::uint64_t sinks = 0;
    double reciprocity = 0.0;
    double avg_degree = 0.0;
    double density = 0.0;
    double clustering = 0.0;
    double largest_wcc_fraction = 0.0;
};

enum class ClusteringMode {
    mean_local,   // average of per-node local coefficients, degree < 2 counts as 0
    transitivity  // 3 * triangles / connected triples
};

struct DegreeHistogram {
    struct Bin {
        std::uint64_t lower = 0;  // inclusive
        std::uint64_t upper = 0;  // exclusive
        std::uint64_t count = 0;
        double probability = 0.0;  // count / total
        double density = 0.0;      // probability / (upper - lower)
    };

    std::map<std::uint64_t, std::uint64_t> counts;  // degree -> nodes

    std::uint64_t total() const;
    /// Multiplicative bins [1, r), [r, r^2), ... with integer edges; ratio > 1.
    std::vector<Bin> log_binned(double ratio = 2.0) const;
};

struct UsdVolume {
    double usd = 0.0;
    std::uint64_t missing_price_events = 0;
};

/// Count fields only (nodes, edges, transactions, volume, activity).
LayerMetrics census(const WindowView& view);
double reciprocity(const WindowView& view);
double avg_degree(const WindowView& view);
double density(const WindowView& view);
double clustering(const WindowView& view, ClusteringMode mode = ClusteringMode::mean_local);
double largest_wcc_fraction(const WindowView& view);
DegreeHistogram degree_distribution(const WindowView& view);
/// Each event is priced at its layer's close on the event's UTC date;
/// events on dates without a close are skipped and counted.
UsdVolume usd_volume(const WindowView& view, const PriceSeries& prices);

struct MetricsOptions {
    ClusteringMode clustering = ClusteringMode::mean_local;
    const PriceSeries* prices = nullptr;  // usd fields stay 0 when absent
};

/// Every LayerMetrics field from a single projection of the view.
LayerMetrics compute_metrics(const WindowView& view, const MetricsOptions& options = {});

}  // namespace tmlg
