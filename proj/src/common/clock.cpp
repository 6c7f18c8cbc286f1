#include "transit/common/clock.hpp"

#include "transit/common/error.hpp"

#include <charconv>
#include <cstdio>

namespace transit {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Howard Hinnant's days-from-civil / civil-from-days.
CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = floor_div(z, 146097);
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = floor_div(y, 400);
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t day_number(Millis t) { return floor_div(t, kDay); }

Weekday weekday_from_days(std::int64_t days) {
    // 1970-01-01 was a Thursday.
    auto idx = floor_div(days + 3, 7);
    auto wd = days + 3 - idx * 7;
    return static_cast<Weekday>(wd);
}

}  // namespace

CivilDate civil_from_millis(Millis t) noexcept { return civil_from_days(day_number(t)); }

Weekday weekday_of(Millis t) noexcept { return weekday_from_days(day_number(t)); }

int minute_of_day(Millis t) noexcept {
    return static_cast<int>((t - day_number(t) * kDay) / kMinute);
}

std::string_view to_string(Weekday d) noexcept {
    static constexpr std::string_view names[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
    return names[static_cast<int>(d)];
}

Weekday parse_weekday(std::string_view s) {
    for (int i = 0; i < 7; ++i)
        if (to_string(static_cast<Weekday>(i)) == s) return static_cast<Weekday>(i);
    throw Error(Errc::invalid_argument, "unknown weekday '" + std::string(s) + "'");
}

std::string_view to_string(Period p) noexcept {
    switch (p) {
    case Period::day: return "day";
    case Period::week: return "week";
    case Period::month: return "month";
    }
    return "?";
}

Period parse_period(std::string_view s) {
    if (s == "day") return Period::day;
    if (s == "week") return Period::week;
    if (s == "month") return Period::month;
    throw Error(Errc::invalid_argument, "unknown period '" + std::string(s) + "'");
}

std::string period_key(Period p, Millis t) {
    char buf[32];
    const auto days = day_number(t);
    const auto date = civil_from_days(days);
    switch (p) {
    case Period::day:
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", date.year, date.month, date.day);
        break;
    case Period::month:
        std::snprintf(buf, sizeof buf, "%04d-%02u", date.year, date.month);
        break;
    case Period::week: {
        // ISO week: the week belongs to the year of its Thursday.
        const auto wd = static_cast<std::int64_t>(weekday_from_days(days));
        const auto thursday = days - wd + 3;
        const auto th = civil_from_days(thursday);
        const auto jan1 = days_from_civil(th.year, 1, 1);
        const auto week = (thursday - jan1) / 7 + 1;
        std::snprintf(buf, sizeof buf, "%04d-W%02d", th.year, static_cast<int>(week));
        break;
    }
    }
    return buf;
}

Millis parse_timestamp(std::string_view s) {
    if (!s.empty() && s.find('-') == std::string_view::npos) {
        Millis v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && p == s.data() + s.size()) return v;
        throw Error(Errc::invalid_argument, "bad timestamp '" + std::string(s) + "'");
    }
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char z = 0;
    const std::string str(s);
    int n = std::sscanf(str.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &sec, &z);
    if (n != 7) {
        sec = 0;
        n = std::sscanf(str.c_str(), "%4d-%2u-%2uT%2u:%2u%c", &y, &mo, &d, &h, &mi, &z);
        if (n != 6) throw Error(Errc::invalid_argument, "bad timestamp '" + str + "'");
    }
    if (z != 'Z' || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 59)
        throw Error(Errc::invalid_argument, "bad timestamp '" + str + "'");
    return days_from_civil(y, mo, d) * kDay + h * kHour + mi * kMinute + sec * 1000;
}

std::string format_timestamp(Millis t) {
    const auto days = day_number(t);
    const auto date = civil_from_days(days);
    const auto rem = t - days * kDay;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", date.year, date.month,
                  date.day, static_cast<int>(rem / kHour), static_cast<int>(rem % kHour / kMinute),
                  static_cast<int>(rem % kMinute / 1000));
    return buf;
}

}  // namespace transit
