#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tmlg {

/// Unix seconds, UTC.
using Timestamp = std::int64_t;
/// Whole seconds.
using Duration = std::int64_t;

inline constexpr Duration kSecondsPerDay = 86'400;

/// Half-open interval [start, end).
struct TimeWindow {
    Timestamp start = 0;
    Timestamp end = 0;

    TimeWindow() = default;
    TimeWindow(Timestamp s, Timestamp e);

    bool contains(Timestamp t) const { return start <= t && t < end; }
    Duration length() const { return end - start; }
    bool operator==(const TimeWindow&) const = default;
};

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
};
CivilDate civil_from_days(std::int64_t days);

/// Start of the UTC calendar day containing t.
Timestamp utc_day_start(Timestamp t);

/// "YYYY-MM-DD" -> UTC midnight. Throws std::invalid_argument.
Timestamp parse_iso_date(std::string_view text);

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[Z]" and the same with a space
/// separator. Throws std::invalid_argument.
Timestamp parse_iso_datetime(std::string_view text);

/// Integer Unix seconds or any form accepted by parse_iso_datetime.
std::optional<Timestamp> try_parse_timestamp(std::string_view text);

std::string format_iso_date(Timestamp t);
std::string format_iso_datetime(Timestamp t);

/// "86400", "86400s", "90m", "12h", "1d", "2w". Must be positive.
Duration parse_duration(std::string_view text);
std::string format_duration(Duration d);

/// "START,END" where each side is a date or datetime; END is exclusive.
TimeWindow parse_window(std::string_view text);

}  // namespace tmlg
