#include "did/dates.hpp"

#include <charconv>
#include <chrono>

#include "did/errors.hpp"

namespace did::corpus {

namespace {

std::chrono::year_month_day to_ymd(int y, int m, int d) {
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                       std::chrono::day{unsigned(d)}};
}

}  // namespace

std::string to_string(Weekday w) {
    switch (w) {
        case Weekday::Mon: return "Monday";
        case Weekday::Tue: return "Tuesday";
        case Weekday::Wed: return "Wednesday";
        case Weekday::Thu: return "Thursday";
        case Weekday::Fri: return "Friday";
        case Weekday::Sat: return "Saturday";
        case Weekday::Sun: return "Sunday";
    }
    return "?";
}

CivilDate::CivilDate(int year, int month, int day)
    : year_(year), month_(month), day_(day) {
    if (month < 1 || month > 12 || day < 1 || day > 31 || !to_ymd(year, month, day).ok()) {
        throw ValidationError("invalid civil date " + std::to_string(year) + "-" +
                              std::to_string(month) + "-" + std::to_string(day));
    }
}

std::int64_t CivilDate::days_since_epoch() const {
    std::chrono::sys_days sd{to_ymd(year_, month_, day_)};
    return sd.time_since_epoch().count();
}

CivilDate CivilDate::from_days_since_epoch(std::int64_t days) {
    std::chrono::sys_days sd{std::chrono::days{days}};
    std::chrono::year_month_day ymd{sd};
    return CivilDate(int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day())));
}

CivilDate CivilDate::plus_days(std::int64_t days) const {
    return from_days_since_epoch(days_since_epoch() + days);
}

std::string CivilDate::to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year_, month_, day_);
    return buf;
}

CivilDate CivilDate::from_iso(const std::string& text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        std::from_chars(text.data(), text.data() + 4, y).ec != std::errc{} ||
        std::from_chars(text.data() + 5, text.data() + 7, m).ec != std::errc{} ||
        std::from_chars(text.data() + 8, text.data() + 10, d).ec != std::errc{}) {
        throw ParseError("expected YYYY-MM-DD, got \"" + text + "\"");
    }
    return CivilDate(y, m, d);
}

Weekday day_of_week(const CivilDate& d) {
    std::chrono::weekday w{std::chrono::sys_days{to_ymd(d.year(), d.month(), d.day())}};
    return Weekday(w.iso_encoding());  // 1=Mon .. 7=Sun
}

}  // namespace did::corpus
