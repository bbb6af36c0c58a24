#pragma once

#include "tmlg/decimal.hpp"
#include "tmlg/time.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tmlg {

/// Index of a currency layer in registry order.
using LayerId = std::uint16_t;

/// Interned wallet address. Values index a WalletDictionary.
struct WalletId {
    std::uint32_t value = 0;
    auto operator<=>(const WalletId&) const = default;
};

/// Raised for malformed input files. line() is 0 when not applicable.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::size_t line = 0);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::string lowercase(std::string_view text);

struct LayerInfo {
    std::string contract_address;  // lower-case hex
    std::string ticker;
    int decimals = 0;
};

/// Ordered set of currency layers keyed by contract address and ticker.
class LayerRegistry {
public:
    static constexpr int kMaxDecimals = 36;
    static constexpr std::size_t kMaxLayers = 64;

    /// Appends a layer. Throws IngestError on a duplicate address or ticker,
    /// or decimals outside [0, 36].
    LayerId add(std::string_view contract_address, std::string_view ticker, int decimals);

    std::size_t size() const { return layers_.size(); }
    bool empty() const { return layers_.empty(); }
    const LayerInfo& operator[](LayerId id) const { return layers_.at(id); }
    const std::vector<LayerInfo>& layers() const { return layers_; }

    std::optional<LayerId> find_address(std::string_view contract_address) const;
    std::optional<LayerId> find_ticker(std::string_view ticker) const;
    /// Throws std::invalid_argument naming the ticker when absent.
    LayerId require_ticker(std::string_view ticker) const;

    bool operator==(const LayerRegistry& other) const;

private:
    std::vector<LayerInfo> layers_;
    std::unordered_map<std::string, LayerId> by_address_;
    std::unordered_map<std::string, LayerId> by_ticker_;
};

/// Columns: contract_address, ticker, decimals. Layer order is file order.
LayerRegistry load_registry(const std::filesystem::path& path);
LayerRegistry read_registry(std::istream& in);

/// Bidirectional address <-> WalletId table, ids assigned in first-seen order.
class WalletDictionary {
public:
    WalletId intern(std::string_view address);
    std::optional<WalletId> find(std::string_view address) const;
    const std::string& address(WalletId id) const { return addresses_.at(id.value); }
    std::size_t size() const { return addresses_.size(); }

private:
    std::vector<std::string> addresses_;
    std::unordered_map<std::string, WalletId> ids_;
};

struct TransferEvent {
    WalletId sender;
    WalletId receiver;
    Timestamp timestamp = 0;
    Decimal amount;  // token units, already divided by 10^decimals
    LayerId layer = 0;
};

struct IngestStats {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_skipped = 0;
    std::map<std::string, std::size_t> skip_reasons;
};

struct LoadOptions {
    /// Any bad row becomes a hard error instead of being skipped and counted.
    bool strict = false;
    /// Rows outside these bounds are dropped (counted as "out_of_bounds").
    std::optional<TimeWindow> bounds;
};

struct TransferLog {
    WalletDictionary wallets;
    /// Sorted by timestamp; ties keep input order.
    std::vector<TransferEvent> events;
    IngestStats stats;
};

/// Required columns: from_address, to_address, time_stamp, value,
/// contract_address. Extra columns are ignored.
TransferLog load_transfers(const std::filesystem::path& path, const LayerRegistry& registry,
                           const LoadOptions& options = {});
TransferLog read_transfers(std::istream& in, const LayerRegistry& registry, const LoadOptions& options = {});

/// Daily USD close prices per ticker. Dates are UTC midnights.
class PriceSeries {
public:
    /// Throws IngestError on a duplicate (ticker, day) or a negative price.
    void add(std::string_view ticker, Timestamp day, double close);
    std::optional<double> close(std::string_view ticker, Timestamp t) const;
    bool has_ticker(std::string_view ticker) const { return series_.contains(std::string(ticker)); }
    const std::map<std::string, std::map<Timestamp, double>>& tickers() const { return series_; }
    bool empty() const { return series_.empty(); }

private:
    std::map<std::string, std::map<Timestamp, double>> series_;
};

/// Columns: date (YYYY-MM-DD), ticker, close.
PriceSeries load_prices(const std::filesystem::path& path);
PriceSeries read_prices(std::istream& in);

/// Divides each ticker's series by its close on `start_day`. Throws
/// IngestError naming the ticker when that close is missing or zero.
PriceSeries normalize_price_series(const PriceSeries& prices, Timestamp start_day);

}  // namespace tmlg
