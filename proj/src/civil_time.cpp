#include "tempshift/civil_time.hpp"

#include <cctype>
#include <stdexcept>

namespace tempshift {

CivilDateTime civil_from_epoch(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    const auto ymd = civil_from_days(days);
    CivilDateTime c;
    c.year = ymd[0];
    c.month = ymd[1];
    c.day = ymd[2];
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem / 60) % 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

std::int64_t epoch_from_civil(const CivilDateTime& c) {
    return days_from_civil(c.year, c.month, c.day) * 86400 +
           c.hour * 3600 + c.minute * 60 + c.second;
}

namespace {

bool read_digits(const std::string& s, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char ch = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
        v = v * 10 + (ch - '0');
    }
    out = v;
    return true;
}

constexpr int days_in_month(int y, int m) {
    constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[m - 1];
}

} // namespace

std::optional<std::int64_t> parse_iso8601(const std::string& s) {
    CivilDateTime c{0, 0, 0, 0, 0, 0};
    if (!read_digits(s, 0, 4, c.year)) return std::nullopt;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!read_digits(s, 5, 2, c.month)) return std::nullopt;
    if (!read_digits(s, 8, 2, c.day)) return std::nullopt;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        ++pos;
        if (!read_digits(s, pos, 2, c.hour)) return std::nullopt;
        if (pos + 2 >= s.size() || s[pos + 2] != ':') return std::nullopt;
        if (!read_digits(s, pos + 3, 2, c.minute)) return std::nullopt;
        if (pos + 5 >= s.size() || s[pos + 5] != ':') return std::nullopt;
        if (!read_digits(s, pos + 6, 2, c.second)) return std::nullopt;
        pos += 8;
    }
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size()) return std::nullopt;
    if (c.month < 1 || c.month > 12) return std::nullopt;
    if (c.day < 1 || c.day > days_in_month(c.year, c.month)) return std::nullopt;
    if (c.hour > 23 || c.minute > 59 || c.second > 59) return std::nullopt;
    return epoch_from_civil(c);
}

} // namespace tempshift
