#include "tmlg/time.hpp"

#include <charconv>
#include <cstdio>

namespace tmlg {
namespace {

template <typename Int>
bool parse_fixed(std::string_view text, std::size_t pos, std::size_t width, Int& out) {
    if (pos + width > text.size()) return false;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + width, out);
    return ec == std::errc{} && ptr == first + width;
}

unsigned days_in_month(int year, unsigned month) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : kDays[month - 1];
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

TimeWindow::TimeWindow(Timestamp s, Timestamp e) : start(s), end(e) {
    if (!(s < e)) throw std::invalid_argument("time window requires start < end");
}

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
    std::int64_t y = static_cast<std::int64_t>(year) - (month <= 2 ? 1 : 0);
    std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    auto yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    auto doe = static_cast<unsigned>(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    unsigned d = doy - (153 * mp + 2) / 5 + 1;
    unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2 ? 1 : 0)), m, d};
}

Timestamp utc_day_start(Timestamp t) { return floor_div(t, kSecondsPerDay) * kSecondsPerDay; }

Timestamp parse_iso_date(std::string_view text) {
    int year = 0;
    unsigned month = 0;
    unsigned day = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_fixed(text, 0, 4, year) ||
        !parse_fixed(text, 5, 2, month) || !parse_fixed(text, 8, 2, day) || month < 1 || month > 12 ||
        day < 1 || day > days_in_month(year, month)) {
        throw std::invalid_argument("invalid ISO date '" + std::string(text) + "'");
    }
    return days_from_civil(year, month, day) * kSecondsPerDay;
}

Timestamp parse_iso_datetime(std::string_view text) {
    if (text.size() == 10) return parse_iso_date(text);
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    int hh = 0;
    int mm = 0;
    int ss = 0;
    if (text.size() != 19 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':' ||
        !parse_fixed(text, 11, 2, hh) || !parse_fixed(text, 14, 2, mm) || !parse_fixed(text, 17, 2, ss) ||
        hh > 23 || mm > 59 || ss > 60) {
        throw std::invalid_argument("invalid ISO datetime '" + std::string(text) + "'");
    }
    return parse_iso_date(text.substr(0, 10)) + hh * 3600 + mm * 60 + ss;
}

std::optional<Timestamp> try_parse_timestamp(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    Timestamp value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return value;
    try {
        return parse_iso_datetime(text);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::string format_iso_date(Timestamp t) {
    CivilDate d = civil_from_days(floor_div(t, kSecondsPerDay));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

std::string format_iso_datetime(Timestamp t) {
    Timestamp day = utc_day_start(t);
    Timestamp rem = t - day;
    char buf[32];
    std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return format_iso_date(t) + buf;
}

Duration parse_duration(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty duration");
    Duration unit = 1;
    switch (text.back()) {
        case 's': unit = 1; break;
        case 'm': unit = 60; break;
        case 'h': unit = 3600; break;
        case 'd': unit = kSecondsPerDay; break;
        case 'w': unit = 7 * kSecondsPerDay; break;
        default: unit = 0; break;
    }
    std::string_view digits = unit == 0 ? text : text.substr(0, text.size() - 1);
    if (unit == 0) unit = 1;
    Duration value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value <= 0) {
        throw std::invalid_argument("invalid duration '" + std::string(text) + "'");
    }
    return value * unit;
}

std::string format_duration(Duration d) {
    if (d % kSecondsPerDay == 0) return std::to_string(d / kSecondsPerDay) + "d";
    if (d % 3600 == 0) return std::to_string(d / 3600) + "h";
    return std::to_string(d) + "s";
}

TimeWindow parse_window(std::string_view text) {
    auto comma = text.find(',');
    if (comma == std::string_view::npos) {
        throw std::invalid_argument("window must be 'START,END', got '" + std::string(text) + "'");
    }
    auto start = try_parse_timestamp(text.substr(0, comma));
    auto end = try_parse_timestamp(text.substr(comma + 1));
    if (!start || !end) throw std::invalid_argument("invalid window '" + std::string(text) + "'");
    return TimeWindow(*start, *end);
}

}  // namespace tmlg
