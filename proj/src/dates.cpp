#include "corextm/dates.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace corextm {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, size_t pos, size_t len, int* out) {
  if (pos + len > s.size()) return false;
  for (size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, *out);
  return ec == std::errc();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  int y = 0, m = 0, d = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_int(text, 0, 4, &y) || !read_int(text, 5, 2, &m) ||
      !read_int(text, 8, 2, &d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  if (text.size() > 10) {
    const char sep = text[10];
    if (sep != ' ' && sep != 'T') return std::nullopt;
  }
  return sys_days{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  const auto date = parse_date(text.substr(0, std::min<size_t>(10, text.size())));
  if (!date) return std::nullopt;
  if (text.size() > 10 && text[10] != ' ' && text[10] != 'T') return std::nullopt;
  Timestamp ts{*date};
  std::string_view rest = text.size() > 10 ? trim(text.substr(11)) : std::string_view{};
  if (rest.empty()) return ts;

  int hh = 0, mm = 0, ss = 0;
  if (!read_int(rest, 0, 2, &hh) || rest.size() < 5 || rest[2] != ':' ||
      !read_int(rest, 3, 2, &mm)) {
    return std::nullopt;
  }
  size_t pos = 5;
  if (rest.size() >= 8 && rest[5] == ':') {
    if (!read_int(rest, 6, 2, &ss)) return std::nullopt;
    pos = 8;
    // Fractional seconds are truncated.
    if (pos < rest.size() && rest[pos] == '.') {
      ++pos;
      while (pos < rest.size() && std::isdigit(static_cast<unsigned char>(rest[pos]))) ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  ts += hours{hh} + minutes{mm} + seconds{ss};

  std::string_view zone = trim(rest.substr(pos));
  if (zone.empty() || zone == "Z" || zone == "UTC") return ts;
  if (zone[0] == '+' || zone[0] == '-') {
    int oh = 0, om = 0;
    std::string_view digits = zone.substr(1);
    if (!read_int(digits, 0, 2, &oh)) return std::nullopt;
    if (digits.size() >= 5 && digits[2] == ':') {
      if (!read_int(digits, 3, 2, &om)) return std::nullopt;
    } else if (digits.size() >= 4) {
      if (!read_int(digits, 2, 2, &om)) return std::nullopt;
    }
    const auto offset = hours{oh} + minutes{om};
    return zone[0] == '+' ? ts - offset : ts + offset;
  }
  // Zone abbreviations ("SAST", ...) are not resolved; the wall time is kept.
  for (char c : zone) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return ts;
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(Timestamp t) {
  const Date d = day_of(t);
  const hh_mm_ss hms{t - d};
  return fmt::format("{} {:02d}:{:02d}:{:02d}", format_date(d), hms.hours().count(),
                     hms.minutes().count(), hms.seconds().count());
}

Date week_start(Date d) {
  const weekday wd{d};
  // iso_encoding: Monday = 1 ... Sunday = 7
  return d - days{wd.iso_encoding() - 1};
}

DateRange default_study_window() {
  return {sys_days{2020y / March / 1}, sys_days{2020y / May / 17}};
}

}  // namespace corextm
