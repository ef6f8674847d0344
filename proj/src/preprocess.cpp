#include "corextm/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "corextm/error.hpp"

namespace corextm {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool starts_with_ci(std::string_view s, size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

size_t utf8_length(std::string_view s) {
  size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

// Replaces URLs, mentions and hashtag markers with spaces according to cfg.
std::string strip_markup(std::string_view text, const TokenizerConfig& cfg) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (cfg.strip_urls && (starts_with_ci(text, i, "http://") ||
                           starts_with_ci(text, i, "https://") ||
                           starts_with_ci(text, i, "www."))) {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back(' ');
      continue;
    }
    const char c = text[i];
    if (c == '@' && cfg.strip_mentions) {
      ++i;
      while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i])) &&
             static_cast<unsigned char>(text[i]) < 0x80) {
        ++i;
      }
      out.push_back(' ');
      continue;
    }
    if (c == '#') {
      ++i;
      if (!cfg.keep_hashtag_text) {
        while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
      }
      out.push_back(' ');
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

uint64_t fnv1a(std::string_view bytes, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::set<std::string> TokenizerConfig::default_stopwords() {
  return {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
      "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he",
      "him", "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's",
      "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "that'll", "these", "those", "am", "is", "are",
      "was", "were", "be", "been", "being", "have", "has", "had", "having", "do",
      "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because",
      "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
      "between", "into", "through", "during", "before", "after", "above", "below",
      "to", "from", "up", "down", "in", "out", "on", "off", "over", "under", "again",
      "further", "then", "once", "here", "there", "when", "where", "why", "how", "all",
      "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
      "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t",
      "can", "will", "just", "don", "don't", "should", "should've", "now", "d", "ll",
      "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
      "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't",
      "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn",
      "mustn't", "needn", "needn't", "shan", "shan't", "shouldn", "shouldn't",
      "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn", "wouldn't",
      "rt", "amp", "via"};
}

TokenizerConfig TokenizerConfig::exempting(const std::vector<std::string>& words) const {
  TokenizerConfig copy = *this;
  for (const auto& w : words) copy.stopwords.erase(w);
  return copy;
}

TokenList tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::string cleaned = strip_markup(text, cfg);
  if (cfg.lowercase) {
    for (char& c : cleaned) {
      if (static_cast<unsigned char>(c) < 0x80) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
  }
  const size_t min_len = static_cast<size_t>(std::max(cfg.min_token_len, 1));

  TokenList tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && utf8_length(cur) >= min_len && !cfg.stopwords.count(cur)) {
      tokens.push_back(cur);
    }
    cur.clear();
  };
  for (size_t i = 0; i < cleaned.size(); ++i) {
    const auto c = static_cast<unsigned char>(cleaned[i]);
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(c));
    } else if (c == '\'' && !cur.empty() && i + 1 < cleaned.size() &&
               is_word_byte(static_cast<unsigned char>(cleaned[i + 1]))) {
      cur.push_back('\'');
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<TokenList> tokenize_all(const std::vector<std::string>& texts,
                                    const TokenizerConfig& cfg) {
  std::vector<TokenList> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = tokenize(texts[static_cast<size_t>(i)], cfg);
  }
  return out;
}

uint64_t vocabulary_fingerprint(const std::vector<std::string>& words) {
  uint64_t h = fnv1a("corextm-vocab");
  for (const auto& w : words) {
    h = fnv1a(w, h);
    h = fnv1a("\n", h);
  }
  return h;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<int64_t> doc_freq)
    : words_(std::move(words)), doc_freq_(std::move(doc_freq)) {
  if (words_.size() != doc_freq_.size()) {
    throw InvariantError("vocabulary words and doc_freq differ in length");
  }
  for (size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw InvariantError(fmt::format("duplicate vocabulary word '{}'", words_[i]));
    }
  }
  fingerprint_ = vocabulary_fingerprint(words_);
}

int64_t Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : static_cast<int64_t>(it->second);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << doc_freq_[i] << '\n';
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::vector<std::string> words;
  std::vector<int64_t> df;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    int64_t value = 0;
    if (tab == std::string::npos ||
        std::from_chars(line.data() + tab + 1, line.data() + line.size(), value).ec !=
            std::errc()) {
      throw IoError(fmt::format("{}:{}: expected 'word<TAB>doc_freq'", path.string(), line_no));
    }
    words.push_back(line.substr(0, tab));
    df.push_back(value);
  }
  return Vocabulary(std::move(words), std::move(df));
}

Vocabulary build_vocabulary(const std::vector<TokenList>& docs, int64_t min_df,
                            int64_t max_vocab, const std::vector<std::string>& forced) {
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
  if (max_vocab < 1) throw ConfigError("max_vocab must be >= 1");

  // std::map keeps the reduction order-independent.
  std::map<std::string, int64_t> df;
  for (const auto& doc : docs) {
    TokenList uniq = doc;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto& w : uniq) ++df[w];
  }

  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [w, n] : df) {
    if (n >= min_df) kept.emplace_back(w, n);
  }
  auto by_df = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::sort(kept.begin(), kept.end(), by_df);
  if (kept.size() > static_cast<size_t>(max_vocab)) kept.resize(static_cast<size_t>(max_vocab));

  for (const auto& w : forced) {
    if (w.empty()) continue;
    const bool present = std::any_of(kept.begin(), kept.end(),
                                     [&](const auto& p) { return p.first == w; });
    if (present) continue;
    auto it = df.find(w);
    kept.emplace_back(w, it == df.end() ? 0 : it->second);
  }
  std::sort(kept.begin(), kept.end(), by_df);

  if (kept.empty()) throw ConfigError("vocabulary is empty after filtering");
  std::vector<std::string> words;
  std::vector<int64_t> freq;
  words.reserve(kept.size());
  freq.reserve(kept.size());
  for (auto& [w, n] : kept) {
    words.push_back(std::move(w));
    freq.push_back(n);
  }
  return Vocabulary(std::move(words), std::move(freq));
}

size_t DocTermMatrix::nnz() const {
  size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

void DocTermMatrix::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << "# corextm-dtm v1\n";
  out << n_docs << ' ' << n_words << ' ' << fmt::format("{:016x}", vocab_fingerprint) << '\n';
  for (size_t d = 0; d < n_docs; ++d) {
    out << doc_ids[d];
    for (uint32_t c : rows[d]) out << ' ' << c;
    out << '\n';
  }
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

DocTermMatrix DocTermMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || line != "# corextm-dtm v1") {
    throw IoError(fmt::format("'{}' is not a corextm-dtm v1 file", path.string()));
  }
  DocTermMatrix m;
  std::string fp;
  if (!std::getline(in, line)) throw IoError("truncated matrix header");
  std::istringstream header(line);
  if (!(header >> m.n_docs >> m.n_words >> fp)) throw IoError("malformed matrix header");
  m.vocab_fingerprint = std::stoull(fp, nullptr, 16);
  m.rows.resize(m.n_docs);
  m.doc_ids.resize(m.n_docs);
  for (size_t d = 0; d < m.n_docs; ++d) {
    if (!std::getline(in, line)) throw IoError("matrix file has fewer rows than declared");
    std::istringstream ss(line);
    ss >> m.doc_ids[d];
    uint32_t c = 0;
    while (ss >> c) {
      if (c >= m.n_words) throw IoError("matrix column out of range");
      if (!m.rows[d].empty() && c <= m.rows[d].back()) {
        throw IoError("matrix row columns must be strictly ascending");
      }
      m.rows[d].push_back(c);
    }
  }
  return m;
}

DocTermMatrix vectorize(const std::vector<TokenList>& docs, const Vocabulary& vocab,
                        std::vector<std::string> doc_ids) {
  if (vocab.empty()) throw ConfigError("cannot vectorize against an empty vocabulary");
  if (!doc_ids.empty() && doc_ids.size() != docs.size()) {
    throw ConfigError("doc_ids and docs differ in length");
  }
  DocTermMatrix m;
  m.n_docs = docs.size();
  m.n_words = vocab.size();
  m.vocab_fingerprint = vocab.fingerprint();
  m.rows.resize(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t d = 0; d < n; ++d) {
    auto& row = m.rows[static_cast<size_t>(d)];
    for (const auto& tok : docs[static_cast<size_t>(d)]) {
      const int64_t c = vocab.find(tok);
      if (c >= 0) row.push_back(static_cast<uint32_t>(c));
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  if (doc_ids.empty()) {
    doc_ids.reserve(docs.size());
    for (size_t d = 0; d < docs.size(); ++d) doc_ids.push_back(std::to_string(d));
  }
  m.doc_ids = std::move(doc_ids);
  return m;
}

}  // namespace corextm
