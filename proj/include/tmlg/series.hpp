#pragma once

#include "tmlg/ingest.hpp"
#include "tmlg/metrics.hpp"
#include "tmlg/tgraph.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tmlg {

enum class Metric {
    transactions,
    unique_edges,
    token_volume,
    usd_volume,
    reciprocity,
    avg_degree,
    density,
    clustering,
    largest_wcc_fraction,
    nodes,
};

std::string_view metric_name(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);
const std::vector<Metric>& all_metrics();

/// Pulls one metric out of a LayerMetrics record.
double metric_value(const LayerMetrics& m, Metric metric);

struct SeriesPoint {
    Timestamp start = 0;
    double value = 0.0;
    bool operator==(const SeriesPoint&) const = default;
};

struct MetricSeries {
    std::string ticker;
    Metric metric = Metric::transactions;
    Duration width = kSecondsPerDay;
    Duration step = kSecondsPerDay;
    std::vector<SeriesPoint> points;  // strictly increasing starts

    std::vector<double> values() const;
};

/// Thrown when every lag of a cross-correlation is undefined.
class DegenerateSeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One point per rolling window over `range`. usd_volume requires prices
/// (std::invalid_argument otherwise).
MetricSeries extract_series(const Graph& graph, LayerId layer, Metric metric, const TimeWindow& range,
                            Duration width, Duration step, const PriceSeries* prices = nullptr,
                            unsigned threads = 1, ClusteringMode clustering = ClusteringMode::mean_local);

struct CrossCorrelation {
    int max_lag = 0;
    std::map<int, double> values;  // lag k -> rho(k), only lags that were defined
    int best_lag = 0;
    double best_rho = 0.0;
};

/// rho(k) is the sample Pearson correlation of the pairs (x[t], y[t + k])
/// over the indices where both exist. A lag is kept only when the overlap
/// has at least `min_overlap` points and neither side is constant. best is
/// the largest rho; ties go to the smallest |k|, then to the negative lag.
/// Throws DegenerateSeriesError when no lag is defined.
CrossCorrelation cross_correlation(std::span<const double> x, std::span<const double> y, int max_lag,
                                   std::size_t min_overlap);
/// Same, after checking that both series share one window grid.
CrossCorrelation cross_correlation(const MetricSeries& x, const MetricSeries& y, int max_lag,
                                   std::size_t min_overlap);

struct CorrelationMatrix {
    std::string period_label;
    Metric metric = Metric::transactions;
    std::vector<std::string> tickers;
    std::vector<std::vector<double>> cells;   // max_k rho(k); diagonal 1
    std::vector<std::vector<int>> best_lags;  // argmax lag per cell
};

struct CorrelationOptions {
    int max_lag = 10;
    std::size_t min_overlap = 10;
    Duration width = kSecondsPerDay;
    unsigned threads = 1;
};

/// Daily series of `metric` for each ticker restricted to `period`, then the
/// best lagged correlation for every ordered pair. A degenerate pair is
/// rethrown as DegenerateSeriesError naming both tickers.
CorrelationMatrix correlation_matrix(const Graph& graph, const std::vector<std::string>& tickers, Metric metric,
                                     const TimeWindow& period, const CorrelationOptions& options,
                                     const PriceSeries* prices = nullptr, std::string period_label = {});

}  // namespace tmlg
