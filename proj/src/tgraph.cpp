#include "tmlg/tgraph.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace tmlg {
namespace {

constexpr std::array<char, 8> kSnapshotMagic = {'T', 'M', 'L', 'G', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kSnapshotVersion = 1;

// Little-endian primitive IO for the snapshot format.
class SnapshotWriter {
public:
    explicit SnapshotWriter(std::ostream& out) : out_(out) {}

    template <typename Int>
    void put(Int value) {
        using U = std::make_unsigned_t<Int>;
        auto u = static_cast<U>(value);
        char bytes[sizeof(U)];
        for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
        out_.write(bytes, sizeof bytes);
    }
    void put_string(std::string_view s) {
        put(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    std::ostream& out_;
};

class SnapshotReader {
public:
    explicit SnapshotReader(std::istream& in) : in_(in) {}

    template <typename Int>
    Int get() {
        using U = std::make_unsigned_t<Int>;
        unsigned char bytes[sizeof(U)];
        if (!in_.read(reinterpret_cast<char*>(bytes), sizeof bytes)) throw std::runtime_error("truncated snapshot");
        U u = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(static_cast<U>(bytes[i]) << (8 * i));
        return static_cast<Int>(u);
    }
    std::string get_string() {
        auto n = get<std::uint32_t>();
        std::string s(n, '\0');
        if (n && !in_.read(s.data(), n)) throw std::runtime_error("truncated snapshot");
        return s;
    }

private:
    std::istream& in_;
};

}  // namespace

LayerSet LayerSet::all(std::size_t layer_count) {
    if (layer_count > 64) throw std::invalid_argument("at most 64 layers");
    return LayerSet(layer_count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << layer_count) - 1);
}

std::vector<LayerId> LayerSet::layers() const {
    std::vector<LayerId> out;
    for (std::uint64_t b = bits_; b; b &= b - 1) out.push_back(static_cast<LayerId>(std::countr_zero(b)));
    return out;
}

TemporalMultilayerGraph TemporalMultilayerGraph::build(std::span<const TransferEvent> events,
                                                       const WalletDictionary& wallets,
                                                       const LayerRegistry& registry) {
    TemporalMultilayerGraph g;
    g.registry_ = registry;
    g.layers_.resize(registry.size());

    constexpr auto kUnassigned = std::numeric_limits<NodeIndex>::max();
    std::vector<NodeIndex> node_of(wallets.size(), kUnassigned);
    auto node_for = [&](WalletId w) {
        NodeIndex& slot = node_of.at(w.value);
        if (slot == kUnassigned) {
            slot = static_cast<NodeIndex>(g.addresses_.size());
            g.addresses_.push_back(wallets.address(w));
        }
        return slot;
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && e.timestamp < events[i - 1].timestamp) {
            throw std::invalid_argument("build requires events sorted by timestamp (violated at index " +
                                        std::to_string(i) + ")");
        }
        if (e.layer >= registry.size()) throw std::invalid_argument("event references unregistered layer");
        NodeIndex s = node_for(e.sender);
        NodeIndex t = node_for(e.receiver);
        g.layers_[e.layer].events.push_back({s, t, e.timestamp, e.amount});
    }
    g.node_ids_.reserve(g.addresses_.size());
    for (NodeIndex n = 0; n < g.addresses_.size(); ++n) g.node_ids_.emplace(g.addresses_[n], n);
    g.index_layers();
    return g;
}

void TemporalMultilayerGraph::index_layers() {
    constexpr auto kUnseen = std::numeric_limits<Timestamp>::max();
    std::vector<Timestamp> node_seen;
    for (auto& layer : layers_) {
        // Events are time-sorted, so after a stable sort by key the first
        // entry of each run is the earliest occurrence.
        auto& edges = layer.edge_first_seen;
        edges.clear();
        edges.reserve(layer.events.size());
        for (const Edge& e : layer.events) edges.push_back({pair_key(e.source, e.target), e.timestamp});
        std::stable_sort(edges.begin(), edges.end(), [](const FirstSeen& a, const FirstSeen& b) { return a.key < b.key; });
        edges.erase(std::unique(edges.begin(), edges.end(),
                                [](const FirstSeen& a, const FirstSeen& b) { return a.key == b.key; }),
                    edges.end());
        edges.shrink_to_fit();

        node_seen.assign(addresses_.size(), kUnseen);
        for (const Edge& e : layer.events) {
            if (node_seen[e.source] == kUnseen) node_seen[e.source] = e.timestamp;
            if (node_seen[e.target] == kUnseen) node_seen[e.target] = e.timestamp;
        }
        layer.node_first_seen.clear();
        for (NodeIndex n = 0; n < node_seen.size(); ++n) {
            if (node_seen[n] != kUnseen) layer.node_first_seen.push_back({n, node_seen[n]});
        }
    }
}

std::size_t TemporalMultilayerGraph::event_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.events.size();
    return n;
}

std::optional<NodeIndex> TemporalMultilayerGraph::find_node(std::string_view address) const {
    auto it = node_ids_.find(lowercase(address));
    if (it == node_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<TimeWindow> TemporalMultilayerGraph::bounds() const {
    std::optional<Timestamp> lo;
    std::optional<Timestamp> hi;
    for (const auto& layer : layers_) {
        if (layer.events.empty()) continue;
        Timestamp first = layer.events.front().timestamp;
        Timestamp last = layer.events.back().timestamp;
        lo = lo ? std::min(*lo, first) : first;
        hi = hi ? std::max(*hi, last) : last;
    }
    if (!lo) return std::nullopt;
    return TimeWindow(*lo, *hi + 1);
}

std::span<const Edge> TemporalMultilayerGraph::events(LayerId layer, const TimeWindow& window) const {
    const auto& ev = layers_.at(layer).events;
    auto by_time = [](const Edge& e, Timestamp t) { return e.timestamp < t; };
    auto lo = std::lower_bound(ev.begin(), ev.end(), window.start, by_time);
    auto hi = std::lower_bound(lo, ev.end(), window.end, by_time);
    return {lo, hi};
}

namespace {

std::optional<Timestamp> lookup_first_seen(std::span<const TemporalMultilayerGraph::FirstSeen> index,
                                           std::uint64_t key) {
    auto it = std::lower_bound(index.begin(), index.end(), key,
                               [](const TemporalMultilayerGraph::FirstSeen& f, std::uint64_t k) { return f.key < k; });
    if (it == index.end() || it->key != key) return std::nullopt;
    return it->timestamp;
}

}  // namespace

std::optional<Timestamp> TemporalMultilayerGraph::first_seen_edge(LayerId layer, NodeIndex source,
                                                                  NodeIndex target) const {
    return lookup_first_seen(layers_.at(layer).edge_first_seen, pair_key(source, target));
}

std::optional<Timestamp> TemporalMultilayerGraph::first_seen_node(LayerId layer, NodeIndex node) const {
    return lookup_first_seen(layers_.at(layer).node_first_seen, node);
}

void TemporalMultilayerGraph::save_snapshot(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write snapshot '" + path.string() + "'");
    out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
    SnapshotWriter w(out);
    w.put(kSnapshotVersion);
    w.put(static_cast<std::uint64_t>(node_count()));
    w.put(static_cast<std::uint32_t>(layer_count()));
    for (const auto& info : registry_.layers()) {
        w.put_string(info.contract_address);
        w.put_string(info.ticker);
        w.put(static_cast<std::int32_t>(info.decimals));
    }
    for (const auto& address : addresses_) w.put_string(address);
    for (const auto& layer : layers_) {
        w.put(static_cast<std::uint64_t>(layer.events.size()));
        for (const Edge& e : layer.events) {
            auto m = static_cast<unsigned __int128>(e.amount.mantissa());
            w.put(e.source);
            w.put(e.target);
            w.put(e.timestamp);
            w.put(static_cast<std::uint64_t>(m));
            w.put(static_cast<std::uint64_t>(m >> 64));
            w.put(static_cast<std::int32_t>(e.amount.scale()));
        }
    }
    if (!out) throw std::runtime_error("failed writing snapshot '" + path.string() + "'");
}

TemporalMultilayerGraph TemporalMultilayerGraph::load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot '" + path.string() + "'");
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kSnapshotMagic) {
        throw std::runtime_error("not a graph snapshot: '" + path.string() + "'");
    }
    SnapshotReader r(in);
    auto version = r.get<std::uint32_t>();
    if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
    auto nodes = r.get<std::uint64_t>();
    auto layer_count = r.get<std::uint32_t>();

    TemporalMultilayerGraph g;
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        auto contract = r.get_string();
        auto ticker = r.get_string();
        auto decimals = r.get<std::int32_t>();
        g.registry_.add(contract, ticker, decimals);
    }
    g.addresses_.reserve(nodes);
    for (std::uint64_t n = 0; n < nodes; ++n) {
        g.addresses_.push_back(r.get_string());
        g.node_ids_.emplace(g.addresses_.back(), static_cast<NodeIndex>(n));
    }
    g.layers_.resize(layer_count);
    for (auto& layer : g.layers_) {
        auto count = r.get<std::uint64_t>();
        layer.events.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            Edge e;
            e.source = r.get<std::uint32_t>();
            e.target = r.get<std::uint32_t>();
            e.timestamp = r.get<std::int64_t>();
            auto lo = r.get<std::uint64_t>();
            auto hi = r.get<std::uint64_t>();
            auto scale = r.get<std::int32_t>();
            auto m = static_cast<__int128>((static_cast<unsigned __int128>(hi) << 64) | lo);
            e.amount = Decimal::from_parts(m, scale);
            if (e.source >= nodes || e.target >= nodes) throw std::runtime_error("snapshot node index out of range");
            if (!layer.events.empty() && e.timestamp < layer.events.back().timestamp) {
                throw std::runtime_error("snapshot events not time-sorted");
            }
            layer.events.push_back(e);
        }
    }
    g.index_layers();
    return g;
}

bool TemporalMultilayerGraph::operator==(const TemporalMultilayerGraph& other) const {
    if (!(registry_ == other.registry_) || addresses_ != other.addresses_ || layers_.size() != other.layers_.size()) {
        return false;
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& a = layers_[l].events;
        const auto& b = other.layers_[l].events;
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].source != b[i].source || a[i].target != b[i].target || a[i].timestamp != b[i].timestamp ||
                a[i].amount.mantissa() != b[i].amount.mantissa() || a[i].amount.scale() != b[i].amount.scale()) {
                return false;
            }
        }
    }
    return true;
}

WindowView::WindowView(const Graph& graph, TimeWindow window, LayerSet layers)
    : graph_(&graph), window_(window), layers_(layers), slices_(graph.layer_count()) {
    for (LayerId l : layers_.layers()) {
        if (l >= graph.layer_count()) throw std::invalid_argument("layer selection exceeds registry");
        slices_[l] = graph.events(l, window_);
    }
}

std::span<const Edge> WindowView::events(LayerId layer) const {
    if (!layers_.contains(layer) || layer >= slices_.size()) return {};
    return slices_[layer];
}

std::size_t WindowView::transaction_count() const {
    std::size_t n = 0;
    for (const auto& s : slices_) n += s.size();
    return n;
}

WindowView window(const Graph& graph, const TimeWindow& w, LayerSet layers) { return WindowView(graph, w, layers); }

std::vector<TimeWindow> rolling_windows(const TimeWindow& range, Duration width, Duration step) {
    if (width <= 0 || step <= 0) throw std::invalid_argument("rolling windows need positive width and step");
    std::vector<TimeWindow> out;
    for (Timestamp start = range.start; start < range.end; start += step) out.emplace_back(start, start + width);
    return out;
}

std::size_t degree(const WindowView& view, NodeIndex node) {
    std::unordered_set<NodeIndex> partners;
    view.for_each_event([&](LayerId, const Edge& e) {
        if (e.source == node) partners.insert(e.target);
        if (e.target == node) partners.insert(e.source);
    });
    return partners.size();
}

std::size_t degree(const WindowView& view, std::string_view address) {
    auto node = view.graph().find_node(address);
    return node ? degree(view, *node) : 0;
}

Decimal node_balance(const WindowView& view, NodeIndex node) {
    Decimal balance;
    view.for_each_event([&](LayerId, const Edge& e) {
        if (e.source == e.target) return;
        if (e.target == node) balance += e.amount;
        if (e.source == node) balance -= e.amount;
    });
    return balance;
}

Decimal node_balance(const WindowView& view, std::string_view address) {
    auto node = view.graph().find_node(address);
    return node ? node_balance(view, *node) : Decimal{};
}

std::optional<Timestamp> first_seen_edge(const Graph& graph, LayerId layer, std::string_view source,
                                         std::string_view target) {
    auto s = graph.find_node(source);
    auto t = graph.find_node(target);
    if (!s || !t) return std::nullopt;
    return graph.first_seen_edge(layer, *s, *t);
}

void PeriodConfig::validate() const {
    if (!(pre.start < pre.end && exclusion.start < exclusion.end && post.start < post.end)) {
        throw std::invalid_argument("period windows must be non-empty");
    }
    if (pre.end > exclusion.start || exclusion.end > post.start) {
        throw std::invalid_argument("periods must be ordered pre <= exclusion <= post and disjoint");
    }
}

std::optional<Timestamp> PeriodConfig::marker(std::string_view label) const {
    for (const auto& [name, t] : markers) {
        if (name == label) return t;
    }
    return std::nullopt;
}

PeriodConfig default_period_config() {
    PeriodConfig p;
    p.pre = TimeWindow(parse_iso_date("2022-04-01"), parse_iso_date("2022-05-02"));
    p.exclusion = TimeWindow(parse_iso_date("2022-05-02"), parse_iso_date("2022-05-17"));
    p.post = TimeWindow(parse_iso_date("2022-05-17"), parse_iso_date("2022-06-16"));
    p.markers = {{"S1", parse_iso_date("2022-04-03")},
                 {"S2", parse_iso_date("2022-04-19")},
                 {"C", parse_iso_date("2022-05-09")},
                 {"T2", parse_iso_date("2022-05-27")}};
    return p;
}

}  // namespace tmlg
