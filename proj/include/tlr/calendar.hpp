#pragma once

// Calendar dates at day, month or year granularity, plus parsing and
// day-distance arithmetic. Proleptic Gregorian throughout; no time zones.

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>

#include "tlr/errors.hpp"

namespace tlr {

enum class Granularity { Day, Month, Year };

inline const char* to_string(Granularity g) {
    switch (g) {
        case Granularity::Day: return "day";
        case Granularity::Month: return "month";
        case Granularity::Year: return "year";
    }
    return "?";
}

namespace detail {

inline bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<size_t>(m - 1)];
}

// Serial day number of a civil date (Howard Hinnant's days_from_civil).
inline int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

}  // namespace detail

struct CalendarDate {
    int year = 0;
    int month = 0;  // 0 when absent
    int day = 0;    // 0 when absent
    Granularity granularity = Granularity::Year;

    static CalendarDate make_year(int y) { return {y, 0, 0, Granularity::Year}; }

    static CalendarDate make_month(int y, int m) {
        if (m < 1 || m > 12)
            throw InvalidDate("month out of range: " + std::to_string(m));
        return {y, m, 0, Granularity::Month};
    }

    static CalendarDate make_day(int y, int m, int d) {
        if (m < 1 || m > 12)
            throw InvalidDate("month out of range: " + std::to_string(m));
        if (d < 1 || d > detail::days_in_month(y, m))
            throw InvalidDate("day out of range: " + std::to_string(d));
        return {y, m, d, Granularity::Day};
    }

    // Comparison key: (year, month-or-1, day-or-1), ties broken Day < Month < Year.
    std::tuple<int, int, int, int> order_key() const {
        int g = granularity == Granularity::Day ? 0
                : granularity == Granularity::Month ? 1 : 2;
        return {year, month == 0 ? 1 : month, day == 0 ? 1 : day, g};
    }

    friend bool operator==(const CalendarDate& a, const CalendarDate& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day &&
               a.granularity == b.granularity;
    }
    friend bool operator!=(const CalendarDate& a, const CalendarDate& b) {
        return !(a == b);
    }
    friend bool operator<(const CalendarDate& a, const CalendarDate& b) {
        return a.order_key() < b.order_key();
    }

    // Serial day used for distances; coarse granularities widen to their
    // interval midpoint (month -> day 15, year -> July 1).
    int64_t resolved_serial_day() const {
        switch (granularity) {
            case Granularity::Day:
                return detail::days_from_civil(year, month, day);
            case Granularity::Month:
                return detail::days_from_civil(year, month, 15);
            case Granularity::Year:
                return detail::days_from_civil(year, 7, 1);
        }
        return 0;
    }

    CalendarDate plus_days(int64_t delta) const {
        int y, m, d;
        detail::civil_from_days(resolved_serial_day() + delta, y, m, d);
        return make_day(y, m, d);
    }
};

inline int64_t date_distance_days(const CalendarDate& a, const CalendarDate& b) {
    int64_t diff = a.resolved_serial_day() - b.resolved_serial_day();
    return diff < 0 ? -diff : diff;
}

inline std::string format_date(const CalendarDate& d) {
    char buf[16];
    switch (d.granularity) {
        case Granularity::Day:
            std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
            break;
        case Granularity::Month:
            std::snprintf(buf, sizeof(buf), "%04d-%02d", d.year, d.month);
            break;
        case Granularity::Year:
            std::snprintf(buf, sizeof(buf), "%04d", d.year);
            break;
    }
    return buf;
}

namespace detail {

inline std::string lower_ascii(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::optional<int> month_from_name(const std::string& name) {
    static constexpr std::array<const char*, 12> full = {
        "january", "february", "march",     "april",   "may",      "june",
        "july",    "august",   "september", "october", "november", "december"};
    std::string n = lower_ascii(name);
    if (!n.empty() && n.back() == '.') n.pop_back();
    for (int i = 0; i < 12; ++i) {
        std::string f = full[static_cast<size_t>(i)];
        if (n == f) return i + 1;
        if (n.size() == 3 && f.compare(0, 3, n) == 0) return i + 1;
    }
    return std::nullopt;
}

inline bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace detail

// Accepts ISO forms YYYY, YYYY-MM, YYYY-MM-DD and English forms
// "Month D, YYYY" / "D Month YYYY" / "Month YYYY", plus the relative tokens
// today/yesterday/tomorrow resolved against `reference`. Returns the
// narrowest granularity the text expresses.
inline CalendarDate parse_date(const std::string& text,
                               std::optional<CalendarDate> reference = std::nullopt) {
    std::string s = detail::trim(text);
    if (s.empty()) throw UnparseableDate("empty date expression");

    std::string lower = detail::lower_ascii(s);
    if (lower == "today" || lower == "yesterday" || lower == "tomorrow") {
        if (!reference)
            throw UnparseableDate("relative date '" + s + "' with no reference");
        int64_t delta = lower == "yesterday" ? -1 : lower == "tomorrow" ? 1 : 0;
        return reference->plus_days(delta);
    }

    // ISO: YYYY / YYYY-MM / YYYY-MM-DD.
    if (std::isdigit(static_cast<unsigned char>(s[0])) &&
        s.find('-') != std::string::npos) {
        std::array<std::string, 3> part;
        size_t n = 0, start = 0;
        for (size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == '-') {
                if (n >= 3) throw UnparseableDate("too many components: " + text);
                part[n++] = s.substr(start, i - start);
                start = i + 1;
            }
        }
        for (size_t i = 0; i < n; ++i)
            if (!detail::all_digits(part[i]))
                throw UnparseableDate("non-numeric component: " + text);
        if (part[0].size() != 4)
            throw UnparseableDate("expected 4-digit year: " + text);
        int y = std::stoi(part[0]);
        if (n == 2) return CalendarDate::make_month(y, std::stoi(part[1]));
        return CalendarDate::make_day(y, std::stoi(part[1]), std::stoi(part[2]));
    }
    if (detail::all_digits(s)) {
        if (s.size() != 4) throw UnparseableDate("expected 4-digit year: " + text);
        return CalendarDate::make_year(std::stoi(s));
    }

    // English forms. Split on spaces and commas.
    std::array<std::string, 4> word;
    size_t words = 0;
    {
        std::string cur;
        for (char c : s) {
            if (c == ' ' || c == ',' || c == '\t') {
                if (!cur.empty()) {
                    if (words >= 4) throw UnparseableDate("unrecognized form: " + text);
                    word[words++] = cur;
                    cur.clear();
                }
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) {
            if (words >= 4) throw UnparseableDate("unrecognized form: " + text);
            word[words++] = cur;
        }
    }

    auto parse_year = [&](const std::string& w) {
        if (!detail::all_digits(w) || w.size() != 4)
            throw UnparseableDate("expected 4-digit year: " + text);
        return std::stoi(w);
    };

    if (words == 2) {
        // Month YYYY
        auto m = detail::month_from_name(word[0]);
        if (!m) throw UnparseableDate("unknown month name: " + text);
        return CalendarDate::make_month(parse_year(word[1]), *m);
    }
    if (words == 3) {
        // Month D, YYYY  |  D Month YYYY
        if (auto m = detail::month_from_name(word[0])) {
            if (!detail::all_digits(word[1]))
                throw UnparseableDate("expected day number: " + text);
            return CalendarDate::make_day(parse_year(word[2]), *m, std::stoi(word[1]));
        }
        if (auto m = detail::month_from_name(word[1])) {
            if (!detail::all_digits(word[0]))
                throw UnparseableDate("expected day number: " + text);
            return CalendarDate::make_day(parse_year(word[2]), *m, std::stoi(word[0]));
        }
    }
    throw UnparseableDate("unrecognized date expression: " + text);
}

}  // namespace tlr
