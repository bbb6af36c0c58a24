// Writes the synthetic six-currency fixture (registry.csv, transfers.csv,
// prices.csv) used by the tests, the acceptance run and the README examples.
//
//   make_fixture --out data/fixture [--seed 7] [--scale 1.0]

#include "tmlg/time.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using tmlg::Timestamp;
using tmlg::kSecondsPerDay;

struct Currency {
    const char* contract;
    const char* ticker;
    double weight;
};

constexpr std::array<Currency, 6> kCurrencies{{
    {"0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48", "USDC", 0.30},
    {"0x6b175474e89094c44da98b954eedeac495271d0f", "DAI", 0.12},
    {"0xdac17f958d2ee523a2206206994597c13d831ec7", "USDT", 0.33},
    {"0xa47c8bf37f92abed4a126bda807a7b7498661acd", "USTC", 0.13},
    {"0xd2877702675e6ceb975b4a1dff9fb7baf4c91ea9", "WLUNC", 0.07},
    {"0x8e870d67f660d95d5be530380d0ec0bd388289e1", "USDP", 0.05},
}};
constexpr std::size_t kUstc = 3;
constexpr std::size_t kWlunc = 4;

const std::string kZero = "0x0000000000000000000000000000000000000000";
const std::string kWhale = "0x00000000000000000000000000000000000be1a1";

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string wallet_address(std::uint64_t i) {
    char buf[43];
    std::snprintf(buf, sizeof buf, "0x%016llx%016llx%08llx",
                  static_cast<unsigned long long>(splitmix(i)), static_cast<unsigned long long>(splitmix(i + 1000003)),
                  static_cast<unsigned long long>(splitmix(i + 2000003) & 0xffffffffULL));
    return buf;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

struct Row {
    std::string from;
    std::string to;
    Timestamp time;
    std::string value;
    std::size_t currency;
};

// Activity multiplier per currency and day offset from 2022-04-01.
double intensity(std::size_t currency, int day) {
    const int crash = 38;  // 2022-05-09
    double base = 1.0 + 0.25 * std::sin(day / 4.0);
    int from_crash = day - crash;
    bool terra = currency == kUstc || currency == kWlunc;
    if (from_crash >= -2 && from_crash <= 5) base *= terra ? 3.5 : 1.8;
    if (from_crash > 5 && terra) base *= 0.45;
    return base;
}

std::string amount_text(Rng& rng) {
    double u = rng.unit();
    auto whole = static_cast<std::uint64_t>(std::floor(5.0 / std::pow(1.0 - u * 0.999, 1.3)));
    if (rng.chance(0.2)) return std::to_string(whole) + "." + std::to_string(1 + rng.below(99));
    return std::to_string(whole);
}

double close_price(std::size_t currency, int day, Rng& rng) {
    const double noise = (rng.unit() - 0.5) * 0.002;
    if (currency == kUstc) {
        if (day < 36) return 1.0 + noise;
        if (day < 38) return 0.98 - 0.05 * (day - 36);
        return std::max(0.35 * std::exp(-(day - 38) / 6.0), 0.01) + noise * 0.01;
    }
    if (currency == kWlunc) {
        if (day < 36) return 95.0 - day * 0.6 + noise * 1000;
        if (day < 43) return 64.0 * std::pow(0.1, day - 35);
        return 0.0001 + noise * 0.00001;
    }
    return 1.0 + noise;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Synthetic transfer fixture"};
    std::filesystem::path out = "data/fixture";
    std::uint64_t seed = 7;
    double scale = 1.0;
    cli.add_option("--out", out, "Output directory");
    cli.add_option("--seed", seed, "RNG seed");
    cli.add_option("--scale", scale, "Events per day multiplier");
    CLI11_PARSE(cli, argc, argv);

    Rng rng(seed);
    const Timestamp start = tmlg::parse_iso_date("2022-04-01");
    const int days = 76;  // through 2022-06-15
    const std::size_t wallets = 700;
    const double per_day = 128.0 * scale;

    // Each wallet has a home currency and trades elsewhere occasionally.
    std::vector<std::size_t> home(wallets);
    for (std::size_t w = 0; w < wallets; ++w) home[w] = splitmix(w * 7919 + seed) % kCurrencies.size();
    std::array<std::vector<std::size_t>, kCurrencies.size()> residents;
    for (std::size_t w = 0; w < wallets; ++w) residents[home[w]].push_back(w);

    auto pick_wallet = [&](std::size_t currency) {
        const auto& local = residents[currency];
        if (!local.empty() && rng.chance(0.8)) {
            // Skewed toward low ranks so a few wallets act as hubs.
            double u = rng.unit();
            return local[static_cast<std::size_t>(u * u * static_cast<double>(local.size()))];
        }
        return static_cast<std::size_t>(rng.below(wallets));
    };

    std::vector<Row> rows;
    const std::array<int, 2> whale_days{2, 18};  // 2022-04-03, 2022-04-19
    for (int day = 0; day < days; ++day) {
        const Timestamp day_start = start + day * kSecondsPerDay;
        for (std::size_t c = 0; c < kCurrencies.size(); ++c) {
            const double mean = per_day * kCurrencies[c].weight * intensity(c, day);
            const auto count = static_cast<std::size_t>(mean * (0.7 + 0.6 * rng.unit()));
            std::vector<std::pair<std::size_t, std::size_t>> pairs_today;
            std::vector<Row> day_rows;
            for (std::size_t i = 0; i < count; ++i) {
                Row r;
                r.currency = c;
                r.time = day_start + static_cast<Timestamp>(rng.below(kSecondsPerDay));
                r.value = amount_text(rng);
                if (rng.chance(0.03)) {
                    r.from = kZero;
                    r.to = wallet_address(pick_wallet(c));
                } else if (!pairs_today.empty() && rng.chance(0.12)) {
                    auto [a, b] = pairs_today[rng.below(pairs_today.size())];
                    r.from = wallet_address(b);
                    r.to = wallet_address(a);
                } else {
                    std::size_t a = pick_wallet(c);
                    std::size_t b = rng.chance(0.005) ? a : pick_wallet(c);
                    pairs_today.emplace_back(a, b);
                    r.from = wallet_address(a);
                    r.to = wallet_address(b);
                }
                day_rows.push_back(std::move(r));
            }
            if (c == kUstc && std::find(whale_days.begin(), whale_days.end(), day) != whale_days.end()) {
                // The whale sells 19 times everyone else's volume: 95% of the day.
                long double others = 0;
                for (const auto& r : day_rows) {
                    if (r.from != kZero) others += std::stold(r.value);
                }
                const auto total = static_cast<std::uint64_t>(std::llround(others * 19 * 100));
                const std::uint64_t parts = 4;
                for (std::uint64_t p = 0; p < parts; ++p) {
                    std::uint64_t cents = total / parts + (p == 0 ? total % parts : 0);
                    char value[48];
                    std::snprintf(value, sizeof value, "%llu.%02llu", static_cast<unsigned long long>(cents / 100),
                                  static_cast<unsigned long long>(cents % 100));
                    day_rows.push_back({kWhale, wallet_address(pick_wallet(c)),
                                        day_start + 3600 * static_cast<Timestamp>(2 + 5 * p), value, c});
                }
            }
            rows.insert(rows.end(), day_rows.begin(), day_rows.end());
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });

    std::filesystem::create_directories(out);
    {
        std::ofstream f(out / "registry.csv");
        f << "contract_address,ticker,decimals\n";
        for (const auto& c : kCurrencies) f << c.contract << ',' << c.ticker << ",0\n";
    }
    {
        std::ofstream f(out / "transfers.csv");
        f << "from_address,to_address,time_stamp,value,contract_address\n";
        for (const auto& r : rows) {
            f << r.from << ',' << r.to << ',' << r.time << ',' << r.value << ',' << kCurrencies[r.currency].contract
              << '\n';
        }
    }
    {
        std::ofstream f(out / "prices.csv");
        f << "date,ticker,close\n";
        for (int day = 0; day < days; ++day) {
            for (std::size_t c = 0; c < kCurrencies.size(); ++c) {
                char value[32];
                std::snprintf(value, sizeof value, "%.6f", std::max(close_price(c, day, rng), 0.000001));
                f << tmlg::format_iso_date(start + day * kSecondsPerDay) << ',' << kCurrencies[c].ticker << ','
                  << value << '\n';
            }
        }
    }
    std::cout << rows.size() << " transfers written to " << out.string() << '\n';
    return 0;
}
