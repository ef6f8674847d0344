#include "corextm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corextm/error.hpp"

namespace corextm {

namespace {

using nlohmann::json;

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error while reading '{}'", path.string()));
  return ss.str();
}

// Splits free-form mention cells: "['a', 'b']", "a,b", "@a @b", "[]".
std::vector<std::string> split_mention_cell(std::string_view cell) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::string h = normalize_handle(cur);
    if (!h.empty()) out.push_back(std::move(h));
    cur.clear();
  };
  for (char c : cell) {
    if (c == '[' || c == ']' || c == '\'' || c == '"') continue;
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

struct RawFields {
  std::string id, date, username, tweet;
  std::vector<std::string> mentions;
};

// Shared validation for both readers. Returns false and fills `why` when the
// row cannot become a Microblog.
bool build_record(RawFields raw, Microblog* out, std::string* why) {
  if (blank(raw.id)) {
    *why = "missing id";
    return false;
  }
  const auto ts = parse_timestamp(raw.date);
  if (!ts) {
    *why = fmt::format("unparseable timestamp '{}'", raw.date);
    return false;
  }
  std::string author = normalize_handle(raw.username);
  if (author.empty()) {
    *why = "missing username";
    return false;
  }
  if (blank(raw.tweet)) {
    *why = "empty text";
    return false;
  }
  out->id = std::move(raw.id);
  out->timestamp = *ts;
  // Keep the author's display casing; matching is done on folded handles.
  std::string_view display = raw.username;
  while (!display.empty() && (display.front() == '@' || std::isspace(static_cast<unsigned char>(display.front())))) {
    display.remove_prefix(1);
  }
  while (!display.empty() && std::isspace(static_cast<unsigned char>(display.back()))) {
    display.remove_suffix(1);
  }
  out->author = std::string(display);
  out->text = std::move(raw.tweet);
  out->mentions = std::move(raw.mentions);
  return true;
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  return {};
}

// RFC 4180 style: quoted fields may contain separators, doubled quotes and
// newlines.
std::vector<std::vector<std::string>> parse_csv_rows(std::string_view content,
                                                     std::vector<size_t>* bad_rows) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;
  size_t row_line = 1;
  for (size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
        ++line;
        row_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes && bad_rows) bad_rows->push_back(row_line);
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    if (!in_quotes) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string normalize_handle(std::string_view handle) {
  while (!handle.empty() && std::isspace(static_cast<unsigned char>(handle.front()))) {
    handle.remove_prefix(1);
  }
  while (!handle.empty() && std::isspace(static_cast<unsigned char>(handle.back()))) {
    handle.remove_suffix(1);
  }
  while (!handle.empty() && handle.front() == '@') handle.remove_prefix(1);
  return lower_ascii(handle);
}

AccountList::AccountList(const std::vector<std::string>& handles) {
  for (const auto& h : handles) {
    std::string folded = normalize_handle(h);
    if (folded.empty()) continue;
    if (!handles_.insert(folded).second) {
      throw ConfigError(fmt::format("duplicate account handle '{}'", h));
    }
  }
  if (handles_.empty()) throw ConfigError("account list is empty");
}

bool AccountList::contains(std::string_view handle) const {
  return handles_.count(normalize_handle(handle)) > 0;
}

AccountList AccountList::defaults() {
  return AccountList({"CyrilRamaphosa", "DrZweliMkhize", "HealthZA", "nicd_sa"});
}

AccountList AccountList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read account list '{}'", path.string()));
  std::vector<std::string> handles;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (!blank(line)) handles.push_back(line);
  }
  return AccountList(handles);
}

RecordFormat record_format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower_ascii(path.extension().string());
  if (ext == ".csv") return RecordFormat::kCsv;
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return RecordFormat::kJsonl;
  throw ConfigError(fmt::format("cannot infer record format from '{}'", path.string()));
}

ParseResult parse_records_jsonl(std::string_view content) {
  ParseResult result;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (blank(line)) continue;

    auto skip = [&](const std::string& why) {
      ++result.skipped;
      result.warnings.push_back(fmt::format("line {}: {}", line_no, why));
    };

    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      skip("not a JSON object");
      continue;
    }
    RawFields raw;
    if (auto it = obj.find("id"); it != obj.end()) raw.id = json_scalar(*it);
    if (auto it = obj.find("date"); it != obj.end() && it->is_string()) raw.date = *it;
    if (auto it = obj.find("username"); it != obj.end() && it->is_string()) raw.username = *it;
    if (auto it = obj.find("tweet"); it != obj.end() && it->is_string()) raw.tweet = *it;
    if (auto it = obj.find("mentions"); it != obj.end()) {
      if (it->is_array()) {
        for (const auto& m : *it) {
          std::string h;
          if (m.is_string()) {
            h = m.get<std::string>();
          } else if (m.is_object()) {
            if (auto sn = m.find("screen_name"); sn != m.end() && sn->is_string()) {
              h = *sn;
            } else if (auto un = m.find("username"); un != m.end() && un->is_string()) {
              h = *un;
            }
          }
          h = normalize_handle(h);
          if (!h.empty()) raw.mentions.push_back(std::move(h));
        }
      } else if (it->is_string()) {
        raw.mentions = split_mention_cell(it->get<std::string>());
      }
    }
    Microblog record;
    std::string why;
    if (build_record(std::move(raw), &record, &why)) {
      result.records.push_back(std::move(record));
    } else {
      skip(why);
    }
  }
  return result;
}

ParseResult parse_records_csv(std::string_view content) {
  ParseResult result;
  std::vector<size_t> bad_rows;
  auto rows = parse_csv_rows(content, &bad_rows);
  for (size_t line : bad_rows) {
    ++result.skipped;
    result.warnings.push_back(fmt::format("line {}: unterminated quoted field", line));
  }
  if (rows.empty()) return result;

  std::unordered_map<std::string, size_t> col;
  for (size_t i = 0; i < rows[0].size(); ++i) col[lower_ascii(rows[0][i])] = i;
  for (const char* required : {"id", "date", "username", "tweet"}) {
    if (!col.count(required)) {
      throw IoError(fmt::format("CSV header lacks required column '{}'", required));
    }
  }
  auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return {};
    return row[it->second];
  };

  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    RawFields raw{cell(row, "id"), cell(row, "date"), cell(row, "username"),
                  cell(row, "tweet"), split_mention_cell(cell(row, "mentions"))};
    Microblog record;
    std::string why;
    if (build_record(std::move(raw), &record, &why)) {
      result.records.push_back(std::move(record));
    } else {
      ++result.skipped;
      result.warnings.push_back(fmt::format("row {}: {}", r, why));
    }
  }
  return result;
}

ParseResult parse_records(const std::filesystem::path& path, RecordFormat format) {
  const std::string content = read_file(path);
  return format == RecordFormat::kCsv ? parse_records_csv(content)
                                      : parse_records_jsonl(content);
}

void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<Microblog>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) {
    json obj = {{"id", r.id},
                {"date", format_timestamp(r.timestamp)},
                {"username", r.author},
                {"tweet", r.text},
                {"mentions", r.mentions}};
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

CorpusPartition partition(const std::vector<Microblog>& records,
                          const AccountList& officials, const DateRange& window) {
  if (window.start > window.end) {
    throw ConfigError(fmt::format("window start {} is after end {}",
                                  format_date(window.start), format_date(window.end)));
  }
  CorpusPartition out;
  std::unordered_set<std::string> seen;
  for (const auto& post : records) {
    if (!window.contains(post.timestamp)) {
      ++out.dropped_out_of_window;
      continue;
    }
    if (!seen.insert(post.id).second) {
      ++out.dropped_duplicate;
      continue;
    }
    if (officials.contains(post.author)) {
      out.official.push_back(post);
      continue;
    }
    bool references = std::any_of(post.mentions.begin(), post.mentions.end(),
                                  [&](const std::string& m) { return officials.contains(m); });
    if (!references) {
      const std::string folded = lower_ascii(post.text);
      references = std::any_of(
          officials.handles().begin(), officials.handles().end(),
          [&](const std::string& h) { return folded.find("@" + h) != std::string::npos; });
    }
    if (references) {
      out.public_posts.push_back(post);
    } else {
      ++out.dropped_unrelated;
    }
  }
  out.dropped = out.dropped_out_of_window + out.dropped_duplicate + out.dropped_unrelated;
  return out;
}

CorpusStats corpus_stats(const std::vector<Microblog>& records, size_t top_n) {
  CorpusStats stats;
  stats.total_posts = records.size();
  if (records.empty()) return stats;

  std::map<std::string, size_t> per_user;
  std::map<Date, size_t> per_week;
  for (const auto& r : records) {
    ++per_user[r.author];
    ++per_week[week_start(day_of(r.timestamp))];
    size_t words = 0;
    std::istringstream ss(r.text);
    std::string tok;
    while (ss >> tok) ++words;
    ++stats.word_count_histogram[words];
  }
  stats.unique_users = per_user.size();

  std::vector<std::pair<std::string, size_t>> users(per_user.begin(), per_user.end());
  std::stable_sort(users.begin(), users.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (users.size() > top_n) users.resize(top_n);
  stats.top_users = std::move(users);

  const Date first = per_week.begin()->first;
  const Date last = per_week.rbegin()->first;
  for (Date w = first; w <= last; w += std::chrono::days{7}) {
    auto it = per_week.find(w);
    stats.weekly_counts.emplace_back(w, it == per_week.end() ? 0 : it->second);
  }
  return stats;
}

std::string stats_to_json(const CorpusStats& stats, int indent) {
  json out;
  out["total_posts"] = stats.total_posts;
  out["unique_users"] = stats.unique_users;
  out["top_users"] = json::array();
  for (const auto& [user, n] : stats.top_users) {
    out["top_users"].push_back({{"user", user}, {"posts", n}});
  }
  out["weekly_counts"] = json::array();
  for (const auto& [week, n] : stats.weekly_counts) {
    out["weekly_counts"].push_back({{"week_start", format_date(week)}, {"posts", n}});
  }
  out["word_count_histogram"] = json::array();
  for (const auto& [words, n] : stats.word_count_histogram) {
    out["word_count_histogram"].push_back({{"words", words}, {"posts", n}});
  }
  return out.dump(indent);
}

}  // namespace corextm
