#pragma once

#include <cstdint>
#include <string>

namespace did::corpus {

enum class Weekday { Mon = 1, Tue, Wed, Thu, Fri, Sat, Sun };

std::string to_string(Weekday w);

/// A calendar date in the proleptic Gregorian calendar. Construction
/// validates the day against the month/year; invalid dates throw.
class CivilDate {
public:
    CivilDate(int year, int month, int day);

    int year() const { return year_; }
    int month() const { return month_; }
    int day() const { return day_; }

    /// Days since 1970-01-01 (negative before the epoch).
    std::int64_t days_since_epoch() const;
    static CivilDate from_days_since_epoch(std::int64_t days);

    CivilDate plus_days(std::int64_t days) const;

    /// "YYYY-MM-DD"
    std::string to_iso() const;
    static CivilDate from_iso(const std::string& text);

    auto operator<=>(const CivilDate&) const = default;

private:
    int year_;
    int month_;
    int day_;
};

Weekday day_of_week(const CivilDate& d);

inline bool is_weekend(const CivilDate& d) {
    Weekday w = day_of_week(d);
    return w == Weekday::Sat || w == Weekday::Sun;
}

}  // namespace did::corpus
