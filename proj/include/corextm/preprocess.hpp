#ifndef COREXTM_PREPROCESS_HPP_
#define COREXTM_PREPROCESS_HPP_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corextm {

using TokenList = std::vector<std::string>;

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_urls = true;
  bool strip_mentions = true;
  bool keep_hashtag_text = true;  // "#lockdown" -> "lockdown"; off drops the tag
  int min_token_len = 2;
  std::set<std::string> stopwords = default_stopwords();

  static std::set<std::string> default_stopwords();
  // Copy with `words` removed from the stopword list.
  TokenizerConfig exempting(const std::vector<std::string>& words) const;
};

// Transforms run in a fixed order: URL strip, mention strip, hashtag unwrap,
// lowercase, split, length filter, stopword filter. Words are maximal runs of
// ASCII alphanumerics, '_', and non-ASCII bytes (so UTF-8 words survive);
// apostrophes are kept when surrounded by word characters.
TokenList tokenize(std::string_view text, const TokenizerConfig& cfg);

// Per-document tokenization; OpenMP-parallel over documents.
std::vector<TokenList> tokenize_all(const std::vector<std::string>& texts,
                                    const TokenizerConfig& cfg);

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<int64_t> doc_freq);

  size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(size_t column) const { return words_[column]; }
  int64_t doc_freq(size_t column) const { return doc_freq_[column]; }
  // -1 when absent.
  int64_t find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) >= 0; }
  uint64_t fingerprint() const { return fingerprint_; }

  // "word<TAB>doc_freq" per line, in column order.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> words_;
  std::vector<int64_t> doc_freq_;
  std::unordered_map<std::string, size_t> index_;
  uint64_t fingerprint_ = 0;
};

// FNV-1a over the newline-joined word list; binds models to vocabularies.
uint64_t vocabulary_fingerprint(const std::vector<std::string>& words);

// Keeps words with doc_freq >= min_df, then the max_vocab most frequent
// (ties lexicographic), columns in descending doc_freq order. `forced` words
// are always included regardless of either cutoff. Throws ConfigError when
// the result is empty or on bad cutoffs.
Vocabulary build_vocabulary(const std::vector<TokenList>& docs, int64_t min_df,
                            int64_t max_vocab,
                            const std::vector<std::string>& forced = {});

// Sparse binary incidence matrix. Each row is a sorted, duplicate-free list
// of word columns present in that document.
struct DocTermMatrix {
  size_t n_docs = 0;
  size_t n_words = 0;
  std::vector<std::vector<uint32_t>> rows;
  std::vector<std::string> doc_ids;
  uint64_t vocab_fingerprint = 0;

  size_t nnz() const;

  // Text sidecar:
  //   # corextm-dtm v1
  //   <n_docs> <n_words> <fingerprint-hex>
  //   <doc_id>[ <col>]*            (one line per row, columns ascending)
  void save(const std::filesystem::path& path) const;
  static DocTermMatrix load(const std::filesystem::path& path);
};

// Out-of-vocabulary tokens are ignored; empty rows are kept so rows stay
// aligned with `doc_ids`. When `doc_ids` is empty, ids are row numbers.
DocTermMatrix vectorize(const std::vector<TokenList>& docs, const Vocabulary& vocab,
                        std::vector<std::string> doc_ids = {});

}  // namespace corextm

#endif  // COREXTM_PREPROCESS_HPP_
