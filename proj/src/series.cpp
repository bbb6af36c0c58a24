#include "tmlg/series.hpp"

#include "tmlg/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace tmlg {
namespace {

constexpr std::array<std::pair<Metric, std::string_view>, 10> kMetricNames = {{
    {Metric::transactions, "transactions"},
    {Metric::unique_edges, "unique_edges"},
    {Metric::token_volume, "token_volume"},
    {Metric::usd_volume, "usd_volume"},
    {Metric::reciprocity, "reciprocity"},
    {Metric::avg_degree, "avg_degree"},
    {Metric::density, "density"},
    {Metric::clustering, "clustering"},
    {Metric::largest_wcc_fraction, "largest_wcc_fraction"},
    {Metric::nodes, "nodes"},
}};

double window_metric(const WindowView& view, Metric metric, const PriceSeries* prices, ClusteringMode mode) {
    switch (metric) {
        case Metric::transactions: return static_cast<double>(view.transaction_count());
        case Metric::unique_edges: return static_cast<double>(census(view).unique_edges);
        case Metric::nodes: return static_cast<double>(census(view).nodes);
        case Metric::token_volume: return census(view).token_volume.to_double();
        case Metric::usd_volume: return usd_volume(view, *prices).usd;
        case Metric::reciprocity: return reciprocity(view);
        case Metric::avg_degree: return avg_degree(view);
        case Metric::density: return density(view);
        case Metric::clustering: return clustering(view, mode);
        case Metric::largest_wcc_fraction: return largest_wcc_fraction(view);
    }
    return 0.0;
}

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<double>(a.size());
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - mean_a;
        double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace

std::string_view metric_name(Metric metric) {
    for (const auto& [m, name] : kMetricNames) {
        if (m == metric) return name;
    }
    return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
    for (const auto& [m, n] : kMetricNames) {
        if (n == name) return m;
    }
    return std::nullopt;
}

const std::vector<Metric>& all_metrics() {
    static const std::vector<Metric> metrics = [] {
        std::vector<Metric> out;
        for (const auto& entry : kMetricNames) out.push_back(entry.first);
        return out;
    }();
    return metrics;
}

double metric_value(const LayerMetrics& m, Metric metric) {
    switch (metric) {
        case Metric::transactions: return static_cast<double>(m.transactions);
        case Metric::unique_edges: return static_cast<double>(m.unique_edges);
        case Metric::nodes: return static_cast<double>(m.nodes);
        case Metric::token_volume: return m.token_volume.to_double();
        case Metric::usd_volume: return m.usd_volume;
        case Metric::reciprocity: return m.reciprocity;
        case Metric::avg_degree: return m.avg_degree;
        case Metric::density: return m.density;
        case Metric::clustering: return m.clustering;
        case Metric::largest_wcc_fraction: return m.largest_wcc_fraction;
    }
    return 0.0;
}

std::vector<double> MetricSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

MetricSeries extract_series(const Graph& graph, LayerId layer, Metric metric, const TimeWindow& range,
                            Duration width, Duration step, const PriceSeries* prices, unsigned threads,
                            ClusteringMode clustering_mode) {
    if (metric == Metric::usd_volume && prices == nullptr) {
        throw std::invalid_argument("usd_volume series requires price data");
    }
    MetricSeries series;
    series.ticker = graph.registry()[layer].ticker;
    series.metric = metric;
    series.width = width;
    series.step = step;
    auto windows = rolling_windows(range, width, step);
    series.points.resize(windows.size());
    parallel_for(windows.size(), threads, [&](std::size_t i) {
        WindowView view(graph, windows[i], LayerSet::single(layer));
        series.points[i] = {windows[i].start, window_metric(view, metric, prices, clustering_mode)};
    });
    return series;
}

CrossCorrelation cross_correlation(std::span<const double> x, std::span<const double> y, int max_lag,
                                   std::size_t min_overlap) {
    if (max_lag < 0) throw std::invalid_argument("lag bound must be non-negative");
    if (x.size() != y.size()) throw std::invalid_argument("cross-correlation needs equal-length series");
    CrossCorrelation out;
    out.max_lag = max_lag;
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    bool have_best = false;
    for (int k = -max_lag; k <= max_lag; ++k) {
        // Pairs (x[t], y[t + k]) for t in [max(0, -k), min(n, n - k)).
        std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -k);
        std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - k);
        if (hi - lo < static_cast<std::ptrdiff_t>(std::max<std::size_t>(min_overlap, 2))) continue;
        auto a = x.subspan(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo));
        auto b = y.subspan(static_cast<std::size_t>(lo + k), static_cast<std::size_t>(hi - lo));
        if (is_constant(a) || is_constant(b)) continue;
        double rho = pearson(a, b);
        out.values.emplace(k, rho);
        bool better = !have_best || rho > out.best_rho ||
                      (rho == out.best_rho && (std::abs(k) < std::abs(out.best_lag) ||
                                               (std::abs(k) == std::abs(out.best_lag) && k < out.best_lag)));
        if (better) {
            out.best_rho = rho;
            out.best_lag = k;
            have_best = true;
        }
    }
    if (!have_best) throw DegenerateSeriesError("degenerate series: no lag with a defined correlation");
    return out;
}

CrossCorrelation cross_correlation(const MetricSeries& x, const MetricSeries& y, int max_lag,
                                   std::size_t min_overlap) {
    if (x.points.size() != y.points.size() || x.width != y.width || x.step != y.step) {
        throw std::invalid_argument("series " + x.ticker + " and " + y.ticker + " are not on the same window grid");
    }
    for (std::size_t i = 0; i < x.points.size(); ++i) {
        if (x.points[i].start != y.points[i].start) {
            throw std::invalid_argument("series " + x.ticker + " and " + y.ticker + " are not on the same window grid");
        }
    }
    auto xv = x.values();
    auto yv = y.values();
    return cross_correlation(xv, yv, max_lag, min_overlap);
}

CorrelationMatrix correlation_matrix(const Graph& graph, const std::vector<std::string>& tickers, Metric metric,
                                     const TimeWindow& period, const CorrelationOptions& options,
                                     const PriceSeries* prices, std::string period_label) {
    if (tickers.size() < 2) throw std::invalid_argument("correlation matrix needs at least two tickers");
    const std::size_t n = tickers.size();
    std::vector<MetricSeries> series(n);
    for (std::size_t i = 0; i < n; ++i) {
        LayerId layer = graph.registry().require_ticker(tickers[i]);
        series[i] = extract_series(graph, layer, metric, period, options.width, options.width, prices, options.threads);
    }

    CorrelationMatrix m;
    m.period_label = std::move(period_label);
    m.metric = metric;
    m.tickers = tickers;
    m.cells.assign(n, std::vector<double>(n, 1.0));
    m.best_lags.assign(n, std::vector<int>(n, 0));
    parallel_for(n * n, options.threads, [&](std::size_t cell) {
        std::size_t i = cell / n;
        std::size_t j = cell % n;
        if (i == j) return;
        try {
            auto cc = cross_correlation(series[i], series[j], options.max_lag, options.min_overlap);
            m.cells[i][j] = cc.best_rho;
            m.best_lags[i][j] = cc.best_lag;
        } catch (const DegenerateSeriesError&) {
            throw DegenerateSeriesError("degenerate series for pair " + tickers[i] + "/" + tickers[j] + " (" +
                                        std::string(metric_name(metric)) + ", " + m.period_label + ")");
        }
    });
    return m;
}

}  // namespace tmlg
