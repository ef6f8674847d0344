#ifndef COREXTM_CORPUS_HPP_
#define COREXTM_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corextm/dates.hpp"

namespace corextm {

struct Microblog {
  std::string id;
  Timestamp timestamp;
  std::string author;                 // handle without "@"
  std::string text;
  std::vector<std::string> mentions;  // handles without "@"
};

// Case-insensitive set of tracked handles. Stored case-folded, "@" stripped.
class AccountList {
 public:
  AccountList() = default;
  // Throws ConfigError on an empty list or on duplicates after case folding.
  explicit AccountList(const std::vector<std::string>& handles);

  bool contains(std::string_view handle) const;
  const std::set<std::string>& handles() const { return handles_; }
  bool empty() const { return handles_.empty(); }

  // The four national accounts tracked in the original study.
  static AccountList defaults();
  // One handle per line; blank lines and '#' comments ignored.
  static AccountList load(const std::filesystem::path& path);

 private:
  std::set<std::string> handles_;
};

std::string normalize_handle(std::string_view handle);

enum class RecordFormat { kJsonl, kCsv };

RecordFormat record_format_from_path(const std::filesystem::path& path);

struct ParseResult {
  std::vector<Microblog> records;
  size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Reads a scraper dump. Malformed rows are skipped and counted; an
// unreadable file throws IoError.
ParseResult parse_records(const std::filesystem::path& path, RecordFormat format);
ParseResult parse_records_jsonl(std::string_view content);
ParseResult parse_records_csv(std::string_view content);

// JSONL in the same field layout parse_records reads.
void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<Microblog>& records);

struct CorpusPartition {
  std::vector<Microblog> official;
  std::vector<Microblog> public_posts;
  size_t dropped = 0;
  size_t dropped_out_of_window = 0;
  size_t dropped_duplicate = 0;
  size_t dropped_unrelated = 0;
};

// Authors in `officials` go to the official set; other posts that mention a
// tracked handle (mention list or literal "@handle" in text) go to the public
// set; everything else, including out-of-window posts, is dropped.
CorpusPartition partition(const std::vector<Microblog>& records,
                          const AccountList& officials, const DateRange& window);

struct CorpusStats {
  size_t total_posts = 0;
  size_t unique_users = 0;
  std::vector<std::pair<std::string, size_t>> top_users;
  // Contiguous Monday-start weeks from first to last post, zeros included.
  std::vector<std::pair<Date, size_t>> weekly_counts;
  std::map<size_t, size_t> word_count_histogram;  // words per post -> posts
};

CorpusStats corpus_stats(const std::vector<Microblog>& records, size_t top_n = 50);

std::string stats_to_json(const CorpusStats& stats, int indent = 2);

}  // namespace corextm

#endif  // COREXTM_CORPUS_HPP_
