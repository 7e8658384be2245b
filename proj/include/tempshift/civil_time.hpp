#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace tempshift {

/// Civil date in the proleptic Gregorian calendar, UTC, no leap seconds.
struct CivilDateTime {
    int year;
    int month;  // 1..12
    int day;    // 1..31
    int hour;   // 0..23
    int minute; // 0..59
    int second; // 0..59
};

/// Days since 1970-01-01 -> (year, month, day). Hinnant's algorithm.
constexpr std::array<int, 3> civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

/// (year, month, day) -> days since 1970-01-01.
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

/// Unix epoch seconds -> civil UTC date-time.
CivilDateTime civil_from_epoch(std::int64_t t);

/// Civil UTC date-time -> epoch seconds.
std::int64_t epoch_from_civil(const CivilDateTime& c);

/// Parse "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS", "YYYY-MM-DD HH:MM:SS"
/// (optional trailing 'Z') into epoch seconds. Returns nullopt on any other
/// shape or out-of-range field.
std::optional<std::int64_t> parse_iso8601(const std::string& s);

} // namespace tempshift
