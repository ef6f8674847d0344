#ifndef COREXTM_DATES_HPP_
#define COREXTM_DATES_HPP_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace corextm {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]" and the ISO "T" separator,
// optionally followed by "Z", a numeric offset or a zone name (ignored).
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);

inline Date day_of(Timestamp t) {
  return std::chrono::floor<std::chrono::days>(t);
}

// Monday that starts the ISO week containing d.
Date week_start(Date d);

// Inclusive on both ends, at day granularity.
struct DateRange {
  Date start;
  Date end;

  bool contains(Timestamp t) const {
    const Date d = day_of(t);
    return d >= start && d <= end;
  }
};

DateRange default_study_window();

}  // namespace corextm

#endif  // COREXTM_DATES_HPP_
