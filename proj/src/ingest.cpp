#include "tmlg/ingest.hpp"

#include "tmlg/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

namespace tmlg {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open '" + path.string() + "'");
    return in;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Reads the header row, guesses the delimiter and maps the wanted columns.
std::vector<std::size_t> read_header(csv::Reader& reader, std::istream& in,
                                     const std::vector<std::string_view>& wanted, bool& empty_file) {
    std::string first;
    empty_file = false;
    // Peek the first line to detect the delimiter, then rewind.
    auto start = in.tellg();
    if (!std::getline(in, first)) {
        empty_file = true;
        return {};
    }
    reader.set_delimiter(csv::detect_delimiter(first));
    in.clear();
    in.seekg(start);

    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        empty_file = true;
        return {};
    }
    std::vector<std::size_t> columns;
    for (auto name : wanted) {
        auto it = std::find_if(fields.begin(), fields.end(),
                               [&](const std::string& f) { return csv::normalize_header(f) == name; });
        if (it == fields.end()) {
            throw IngestError("missing column '" + std::string(name) + "' in header", reader.line());
        }
        columns.push_back(static_cast<std::size_t>(it - fields.begin()));
    }
    return columns;
}

}  // namespace

IngestError::IngestError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string lowercase(std::string_view text) {
    std::string out(trim(text));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

LayerId LayerRegistry::add(std::string_view contract_address, std::string_view ticker, int decimals) {
    std::string address = lowercase(contract_address);
    std::string name(trim(ticker));
    if (address.empty()) throw IngestError("empty contract address");
    if (name.empty()) throw IngestError("empty ticker");
    if (decimals < 0 || decimals > kMaxDecimals) {
        throw IngestError("decimals for " + name + " out of range [0, 36]: " + std::to_string(decimals));
    }
    if (by_address_.contains(address)) throw IngestError("duplicate contract address " + address);
    if (by_ticker_.contains(name)) throw IngestError("duplicate ticker " + name);
    if (layers_.size() >= kMaxLayers) throw IngestError("too many layers (max 64)");
    auto id = static_cast<LayerId>(layers_.size());
    layers_.push_back({address, name, decimals});
    by_address_.emplace(address, id);
    by_ticker_.emplace(name, id);
    return id;
}

std::optional<LayerId> LayerRegistry::find_address(std::string_view contract_address) const {
    auto it = by_address_.find(lowercase(contract_address));
    if (it == by_address_.end()) return std::nullopt;
    return it->second;
}

std::optional<LayerId> LayerRegistry::find_ticker(std::string_view ticker) const {
    auto it = by_ticker_.find(std::string(trim(ticker)));
    if (it == by_ticker_.end()) return std::nullopt;
    return it->second;
}

LayerId LayerRegistry::require_ticker(std::string_view ticker) const {
    auto id = find_ticker(ticker);
    if (!id) throw std::invalid_argument("unknown ticker '" + std::string(ticker) + "'");
    return *id;
}

bool LayerRegistry::operator==(const LayerRegistry& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& a = layers_[i];
        const auto& b = other.layers_[i];
        if (a.contract_address != b.contract_address || a.ticker != b.ticker || a.decimals != b.decimals) return false;
    }
    return true;
}

LayerRegistry read_registry(std::istream& in) {
    csv::Reader reader(in);
    bool empty = false;
    auto cols = read_header(reader, in, {"contract_address", "ticker", "decimals"}, empty);
    LayerRegistry registry;
    if (empty) return registry;
    std::vector<std::string> row;
    while (reader.next(row)) {
        std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;
        if (row.size() < needed) throw IngestError("expected 3 columns", reader.line());
        auto dec_text = trim(row[cols[2]]);
        int decimals = -1;
        auto [ptr, ec] = std::from_chars(dec_text.data(), dec_text.data() + dec_text.size(), decimals);
        if (ec != std::errc{} || ptr != dec_text.data() + dec_text.size()) {
            throw IngestError("non-integer decimals '" + std::string(dec_text) + "'", reader.line());
        }
        try {
            registry.add(row[cols[0]], row[cols[1]], decimals);
        } catch (const IngestError& e) {
            throw IngestError(e.what(), reader.line());
        }
    }
    return registry;
}

LayerRegistry load_registry(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_registry(in);
}

WalletId WalletDictionary::intern(std::string_view address) {
    auto [it, inserted] = ids_.try_emplace(std::string(address), WalletId{static_cast<std::uint32_t>(addresses_.size())});
    if (inserted) addresses_.push_back(it->first);
    return it->second;
}

std::optional<WalletId> WalletDictionary::find(std::string_view address) const {
    auto it = ids_.find(std::string(address));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

TransferLog read_transfers(std::istream& in, const LayerRegistry& registry, const LoadOptions& options) {
    if (registry.empty()) throw IngestError("transfer ingest requires a non-empty registry");
    csv::Reader reader(in);
    bool empty = false;
    auto cols = read_header(reader, in, {"from_address", "to_address", "time_stamp", "value", "contract_address"}, empty);
    TransferLog log;
    if (empty) return log;
    const std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;

    auto skip = [&](const char* reason, const std::string& detail) {
        if (options.strict) throw IngestError(std::string(reason) + ": " + detail, reader.line());
        ++log.stats.rows_skipped;
        ++log.stats.skip_reasons[reason];
    };

    std::vector<std::string> row;
    while (reader.next(row)) {
        ++log.stats.rows_read;
        if (row.size() < needed) {
            skip("missing_field", "expected at least " + std::to_string(needed) + " columns");
            continue;
        }
        auto layer = registry.find_address(row[cols[4]]);
        if (!layer) {
            skip("unknown_contract", "contract " + lowercase(row[cols[4]]));
            continue;
        }
        auto ts = try_parse_timestamp(row[cols[2]]);
        if (!ts) {
            skip("bad_timestamp", "time_stamp '" + row[cols[2]] + "'");
            continue;
        }
        Decimal raw;
        if (!Decimal::try_parse(row[cols[3]], raw)) {
            skip("bad_value", "value '" + row[cols[3]] + "'");
            continue;
        }
        if (raw.is_negative()) {
            skip("negative_value", "value '" + row[cols[3]] + "'");
            continue;
        }
        std::string from = lowercase(row[cols[0]]);
        std::string to = lowercase(row[cols[1]]);
        if (from.empty() || to.empty()) {
            skip("missing_field", "empty address");
            continue;
        }
        if (options.bounds && !options.bounds->contains(*ts)) {
            ++log.stats.rows_skipped;
            ++log.stats.skip_reasons["out_of_bounds"];
            continue;
        }
        Decimal amount;
        try {
            amount = raw.shifted_right(registry[*layer].decimals);
        } catch (const DecimalError& e) {
            skip("bad_value", e.what());
            continue;
        }
        log.events.push_back({log.wallets.intern(from), log.wallets.intern(to), *ts, amount, *layer});
        ++log.stats.rows_kept;
    }
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const TransferEvent& a, const TransferEvent& b) { return a.timestamp < b.timestamp; });
    return log;
}

TransferLog load_transfers(const std::filesystem::path& path, const LayerRegistry& registry,
                           const LoadOptions& options) {
    auto in = open_input(path);
    return read_transfers(in, registry, options);
}

void PriceSeries::add(std::string_view ticker, Timestamp day, double close) {
    if (!(close >= 0.0)) throw IngestError("negative or NaN close for " + std::string(ticker));
    auto& series = series_[std::string(ticker)];
    if (!series.emplace(utc_day_start(day), close).second) {
        throw IngestError("duplicate close for " + std::string(ticker) + " on " + format_iso_date(day));
    }
}

std::optional<double> PriceSeries::close(std::string_view ticker, Timestamp t) const {
    auto it = series_.find(std::string(ticker));
    if (it == series_.end()) return std::nullopt;
    auto day = it->second.find(utc_day_start(t));
    if (day == it->second.end()) return std::nullopt;
    return day->second;
}

PriceSeries read_prices(std::istream& in) {
    csv::Reader reader(in);
    bool empty = false;
    auto cols = read_header(reader, in, {"date", "ticker", "close"}, empty);
    PriceSeries prices;
    if (empty) return prices;
    const std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() < needed) throw IngestError("expected 3 columns", reader.line());
        Timestamp day = 0;
        try {
            day = parse_iso_date(trim(row[cols[0]]));
        } catch (const std::invalid_argument& e) {
            throw IngestError(e.what(), reader.line());
        }
        auto text = trim(row[cols[2]]);
        double close = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), close);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw IngestError("non-numeric close '" + std::string(text) + "'", reader.line());
        }
        try {
            prices.add(trim(row[cols[1]]), day, close);
        } catch (const IngestError& e) {
            throw IngestError(e.what(), reader.line());
        }
    }
    return prices;
}

PriceSeries load_prices(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_prices(in);
}

PriceSeries normalize_price_series(const PriceSeries& prices, Timestamp start_day) {
    PriceSeries out;
    for (const auto& [ticker, series] : prices.tickers()) {
        auto base = series.find(utc_day_start(start_day));
        if (base == series.end()) {
            throw IngestError("no close for " + ticker + " on start date " + format_iso_date(start_day));
        }
        if (base->second == 0.0) throw IngestError("zero close for " + ticker + " on start date");
        for (const auto& [day, close] : series) {
            if (day < base->first) continue;
            out.add(ticker, day, close / base->second);
        }
    }
    return out;
}

}  // namespace tmlg
