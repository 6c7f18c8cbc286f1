#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>

namespace transit {

/// Logical milliseconds since 1970-01-01T00:00:00Z.
using Millis = std::int64_t;

constexpr Millis kMinute = 60'000;
constexpr Millis kHour = 60 * kMinute;
constexpr Millis kDay = 24 * kHour;

/// Simulation clock. Only the driver advances it; the ledger and contracts
/// receive the current value as an argument and never read wall time.
class SimClock {
public:
    explicit SimClock(Millis start = 0) : now_(start) {}

    Millis now() const {
        std::lock_guard lk(mu_);
        return now_;
    }
    /// Moves forward to `t`; earlier values are ignored (monotone).
    void advance_to(Millis t) {
        std::lock_guard lk(mu_);
        if (t > now_) now_ = t;
    }
    void advance_by(Millis d) {
        std::lock_guard lk(mu_);
        if (d > 0) now_ += d;
    }

private:
    mutable std::mutex mu_;
    Millis now_;
};

enum class Weekday { mon, tue, wed, thu, fri, sat, sun };

struct CivilDate {
    int year;
    unsigned month;  // 1..12
    unsigned day;    // 1..31
};

CivilDate civil_from_millis(Millis t) noexcept;
Weekday weekday_of(Millis t) noexcept;
int minute_of_day(Millis t) noexcept;

std::string_view to_string(Weekday d) noexcept;
Weekday parse_weekday(std::string_view s);  // throws Error(invalid_argument)

enum class Period { day, week, month };

std::string_view to_string(Period p) noexcept;
Period parse_period(std::string_view s);

/// "2024-02-13", "2024-W07" (ISO week, UTC) or "2024-02".
std::string period_key(Period p, Millis t);

/// Parses "YYYY-MM-DDTHH:MM[:SS]Z" or a plain integer millisecond count.
Millis parse_timestamp(std::string_view s);
std::string format_timestamp(Millis t);

}  // namespace transit
