#include "tmlg/metrics.hpp"

#include "tmlg/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace tmlg {
namespace {

constexpr std::uint8_t kOut = 1;
constexpr std::uint8_t kIn = 2;
constexpr std::uint8_t kSelf = 4;

// The view relabelled onto local ids [0, n) in first-touch order, with the
// distinct directed pairs and the undirected simple projection in CSR form.
class Projection {
public:
    explicit Projection(const WindowView& view, bool with_adjacency = true) {
        const Graph& g = view.graph();
        constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
        std::vector<std::uint32_t> local(g.node_count(), kNone);
        auto local_id = [&](NodeIndex global) {
            std::uint32_t& slot = local[global];
            if (slot == kNone) {
                slot = static_cast<std::uint32_t>(flags.size());
                flags.push_back(0);
            }
            return slot;
        };
        pairs.reserve(view.transaction_count());
        view.for_each_event([&](LayerId, const Edge& e) {
            std::uint32_t s = local_id(e.source);
            std::uint32_t t = local_id(e.target);
            flags[s] |= kOut;
            flags[t] |= kIn;
            if (s == t) flags[s] |= kSelf;
            pairs.push_back(pair_key(s, t));
            ++transactions;
            volume += e.amount;
        });
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        for (auto key : pairs) {
            if (key_source(key) != key_target(key)) ++non_self_pairs;
        }
        if (with_adjacency) build_adjacency();
    }

    std::uint32_t node_count() const { return static_cast<std::uint32_t>(flags.size()); }

    std::uint32_t undirected_degree(std::uint32_t u) const { return offsets[u + 1] - offsets[u]; }

    /// Distinct counterparties: undirected neighbours plus the node itself
    /// when it has a self-loop.
    std::uint64_t counterparty_degree(std::uint32_t u) const {
        return undirected_degree(u) + ((flags[u] & kSelf) ? 1U : 0U);
    }

    std::vector<std::uint8_t> flags;
    std::vector<std::uint64_t> pairs;  // sorted distinct directed pairs, self-loops included
    std::uint64_t non_self_pairs = 0;
    std::uint64_t transactions = 0;
    Decimal volume;
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> adjacency;  // sorted per node, no self-loops, no duplicates

private:
    void build_adjacency() {
        const std::uint32_t n = node_count();
        std::vector<std::uint32_t> raw_degree(n, 0);
        for (auto key : pairs) {
            auto s = key_source(key);
            auto t = key_target(key);
            if (s == t) continue;
            ++raw_degree[s];
            ++raw_degree[t];
        }
        std::vector<std::uint32_t> start(n + 1, 0);
        for (std::uint32_t u = 0; u < n; ++u) start[u + 1] = start[u] + raw_degree[u];
        std::vector<std::uint32_t> raw(start[n]);
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (auto key : pairs) {
            auto s = key_source(key);
            auto t = key_target(key);
            if (s == t) continue;
            raw[fill[s]++] = t;
            raw[fill[t]++] = s;
        }
        // Reciprocal pairs contribute the same neighbour twice.
        offsets.assign(n + 1, 0);
        adjacency.clear();
        adjacency.reserve(raw.size());
        for (std::uint32_t u = 0; u < n; ++u) {
            auto first = raw.begin() + start[u];
            auto last = raw.begin() + start[u + 1];
            std::sort(first, last);
            last = std::unique(first, last);
            adjacency.insert(adjacency.end(), first, last);
            offsets[u + 1] = static_cast<std::uint32_t>(adjacency.size());
        }
    }
};

void fill_census(const Projection& p, LayerMetrics& m) {
    m.nodes = p.node_count();
    m.unique_edges = p.pairs.size();
    m.transactions = p.transactions;
    m.token_volume = p.volume;
    for (auto f : p.flags) {
        bool out = f & kOut;
        bool in = f & kIn;
        m.active_out += out;
        m.active_in += in;
        m.sources += out && !in;
        m.sinks += in && !out;
    }
}

double reciprocity_of(const Projection& p) {
    if (p.non_self_pairs == 0) return 0.0;
    std::uint64_t reciprocated = 0;
    for (auto key : p.pairs) {
        auto s = key_source(key);
        auto t = key_target(key);
        if (s != t && std::binary_search(p.pairs.begin(), p.pairs.end(), pair_key(t, s))) ++reciprocated;
    }
    return static_cast<double>(reciprocated) / static_cast<double>(p.non_self_pairs);
}

double avg_degree_of(const Projection& p) {
    if (p.node_count() == 0) return 0.0;
    std::uint64_t total = 0;
    for (std::uint32_t u = 0; u < p.node_count(); ++u) total += p.counterparty_degree(u);
    return static_cast<double>(total) / static_cast<double>(p.node_count());
}

double density_of(const Projection& p) {
    double n = p.node_count();
    if (n <= 1) return 0.0;
    return static_cast<double>(p.non_self_pairs) / (n * (n - 1.0));
}

// Per-node triangle counts on the undirected projection. Each triangle is
// enumerated once by orienting edges from lower to higher (degree, id) rank.
std::vector<std::uint64_t> triangles_per_node(const Projection& p) {
    const std::uint32_t n = p.node_count();
    auto before = [&](std::uint32_t a, std::uint32_t b) {
        auto da = p.undirected_degree(a);
        auto db = p.undirected_degree(b);
        return da < db || (da == db && a < b);
    };
    std::vector<std::uint32_t> fwd_offsets(n + 1, 0);
    std::vector<std::uint32_t> fwd;
    fwd.reserve(p.adjacency.size() / 2);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (auto i = p.offsets[u]; i < p.offsets[u + 1]; ++i) {
            if (before(u, p.adjacency[i])) fwd.push_back(p.adjacency[i]);
        }
        fwd_offsets[u + 1] = static_cast<std::uint32_t>(fwd.size());
    }
    std::vector<std::uint64_t> tri(n, 0);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (auto i = fwd_offsets[u]; i < fwd_offsets[u + 1]; ++i) {
            std::uint32_t v = fwd[i];
            // Both forward lists are sorted by id since they are filtered
            // from sorted adjacency.
            auto a = fwd.begin() + fwd_offsets[u];
            auto a_end = fwd.begin() + fwd_offsets[u + 1];
            auto b = fwd.begin() + fwd_offsets[v];
            auto b_end = fwd.begin() + fwd_offsets[v + 1];
            while (a != a_end && b != b_end) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++tri[u];
                    ++tri[v];
                    ++tri[*a];
                    ++a;
                    ++b;
                }
            }
        }
    }
    return tri;
}

double clustering_of(const Projection& p, ClusteringMode mode) {
    const std::uint32_t n = p.node_count();
    if (n == 0) return 0.0;
    auto tri = triangles_per_node(p);
    if (mode == ClusteringMode::transitivity) {
        long double triples = 0;
        long double closed = 0;
        for (std::uint32_t u = 0; u < n; ++u) {
            long double d = p.undirected_degree(u);
            triples += d * (d - 1) / 2;
            closed += tri[u];  // each triangle adds 3 in total, i.e. 3 * triangles
        }
        return triples == 0 ? 0.0 : static_cast<double>(closed / triples);
    }
    double sum = 0.0;
    for (std::uint32_t u = 0; u < n; ++u) {
        double d = p.undirected_degree(u);
        if (d < 2) continue;
        sum += 2.0 * static_cast<double>(tri[u]) / (d * (d - 1.0));
    }
    return sum / static_cast<double>(n);
}

double largest_wcc_of(const Projection& p) {
    const std::uint32_t n = p.node_count();
    if (n == 0) return 0.0;
    UnionFind uf(n);
    for (auto key : p.pairs) uf.unite(key_source(key), key_target(key));
    return static_cast<double>(uf.largest_component()) / static_cast<double>(n);
}

}  // namespace

std::uint64_t DegreeHistogram::total() const {
    std::uint64_t t = 0;
    for (const auto& [degree, count] : counts) t += count;
    return t;
}

std::vector<DegreeHistogram::Bin> DegreeHistogram::log_binned(double ratio) const {
    if (!(ratio > 1.0)) throw std::invalid_argument("log-bin ratio must exceed 1");
    std::vector<Bin> bins;
    if (counts.empty()) return bins;
    const std::uint64_t total_nodes = total();
    const std::uint64_t max_degree = counts.rbegin()->first;
    std::uint64_t lower = counts.begin()->first == 0 ? 0 : 1;
    double edge = 1.0;
    while (lower <= max_degree) {
        std::uint64_t upper = lower + 1;
        if (lower > 0) {
            while (static_cast<std::uint64_t>(std::ceil(edge)) <= lower) edge *= ratio;
            upper = std::max(upper, static_cast<std::uint64_t>(std::ceil(edge)));
        }
        Bin bin{lower, upper, 0, 0.0, 0.0};
        for (auto it = counts.lower_bound(lower); it != counts.end() && it->first < upper; ++it) bin.count += it->second;
        bin.probability = static_cast<double>(bin.count) / static_cast<double>(total_nodes);
        bin.density = bin.probability / static_cast<double>(upper - lower);
        bins.push_back(bin);
        lower = upper;
    }
    return bins;
}

LayerMetrics census(const WindowView& view) {
    LayerMetrics m;
    fill_census(Projection(view, false), m);
    return m;
}

double reciprocity(const WindowView& view) { return reciprocity_of(Projection(view, false)); }
double avg_degree(const WindowView& view) { return avg_degree_of(Projection(view)); }
double density(const WindowView& view) { return density_of(Projection(view, false)); }
double clustering(const WindowView& view, ClusteringMode mode) { return clustering_of(Projection(view), mode); }
double largest_wcc_fraction(const WindowView& view) { return largest_wcc_of(Projection(view, false)); }

DegreeHistogram degree_distribution(const WindowView& view) {
    Projection p(view);
    DegreeHistogram h;
    for (std::uint32_t u = 0; u < p.node_count(); ++u) ++h.counts[p.counterparty_degree(u)];
    return h;
}

UsdVolume usd_volume(const WindowView& view, const PriceSeries& prices) {
    const auto& registry = view.graph().registry();
    UsdVolume out;
    long double total = 0;
    for (LayerId layer : view.layers().layers()) {
        const std::string& ticker = registry[layer].ticker;
        // Events are time-sorted, so the close only changes at day boundaries.
        Timestamp cached_day = std::numeric_limits<Timestamp>::min();
        std::optional<double> close;
        for (const Edge& e : view.events(layer)) {
            Timestamp day = utc_day_start(e.timestamp);
            if (day != cached_day) {
                close = prices.close(ticker, day);
                cached_day = day;
            }
            if (close) {
                total += e.amount.to_long_double() * static_cast<long double>(*close);
            } else {
                ++out.missing_price_events;
            }
        }
    }
    out.usd = static_cast<double>(total);
    return out;
}

LayerMetrics compute_metrics(const WindowView& view, const MetricsOptions& options) {
    Projection p(view);
    LayerMetrics m;
    fill_census(p, m);
    m.reciprocity = reciprocity_of(p);
    m.avg_degree = avg_degree_of(p);
    m.density = density_of(p);
    m.clustering = clustering_of(p, options.clustering);
    m.largest_wcc_fraction = largest_wcc_of(p);
    if (options.prices) {
        auto usd = usd_volume(view, *options.prices);
        m.usd_volume = usd.usd;
        m.usd_missing_price_events = usd.missing_price_events;
    }
    return m;
}

}  // namespace tmlg
