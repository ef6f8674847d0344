#include "corextm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "corextm/error.hpp"

namespace corextm {

namespace {

double idf(size_t n_docs, size_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

void check_labels(const std::vector<TokenList>& docs, const std::vector<int>& labels, size_t m,
                  const char* which) {
  if (docs.size() != labels.size()) {
    throw ConfigError(fmt::format("{} docs ({}) and labels ({}) differ in length", which,
                                  docs.size(), labels.size()));
  }
  for (int l : labels) {
    if (l < 0 || static_cast<size_t>(l) >= m) {
      throw ConfigError(fmt::format("{} label {} outside [0, {})", which, l, m));
    }
  }
}

// Sub-corpus summary over interned term ids, sorted by term:
// summed term frequency and document frequency.
struct TermStats {
  uint32_t term;
  double tf;
  uint32_t df;
};

using SubcorpusProfile = std::vector<TermStats>;

std::vector<SubcorpusProfile> profile_by_label(const std::vector<TokenList>& docs,
                                               const std::vector<int>& labels, size_t m,
                                               std::unordered_map<std::string, uint32_t>* ids,
                                               std::vector<size_t>* sizes) {
  std::vector<std::map<uint32_t, std::pair<double, uint32_t>>> acc(m);
  sizes->assign(m, 0);
  for (size_t d = 0; d < docs.size(); ++d) {
    const auto t = static_cast<size_t>(labels[d]);
    ++(*sizes)[t];
    std::map<uint32_t, double> counts;
    for (const auto& tok : docs[d]) {
      auto [it, fresh] = ids->emplace(tok, static_cast<uint32_t>(ids->size()));
      counts[it->second] += 1.0;
    }
    for (const auto& [term, n] : counts) {
      auto& slot = acc[t][term];
      slot.first += n;
      slot.second += 1;
    }
  }
  std::vector<SubcorpusProfile> out(m);
  for (size_t t = 0; t < m; ++t) {
    out[t].reserve(acc[t].size());
    for (const auto& [term, s] : acc[t]) out[t].push_back({term, s.first, s.second});
  }
  return out;
}

// Merge-join of two sorted profiles; both aggregate vectors share the idf
// computed on their union.
std::optional<double> profile_cosine(const SubcorpusProfile& a, size_t n_a,
                                     const SubcorpusProfile& b, size_t n_b,
                                     TermWeighting weighting) {
  if (n_a == 0 || n_b == 0) return std::nullopt;
  const size_t n = n_a + n_b;
  double dot = 0, na = 0, nb = 0;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const bool take_a = j == b.size() || (i < a.size() && a[i].term <= b[j].term);
    const bool take_b = i == a.size() || (j < b.size() && b[j].term <= a[i].term);
    const double tf_a = take_a ? a[i].tf : 0.0;
    const double tf_b = take_b ? b[j].tf : 0.0;
    const size_t df = (take_a ? a[i].df : 0) + (take_b ? b[j].df : 0);
    const double w = weighting == TermWeighting::kTfIdf ? idf(n, df) : 1.0;
    const double va = tf_a * w, vb = tf_b * w;
    dot += va * vb;
    na += va * va;
    nb += vb * vb;
    if (take_a) ++i;
    if (take_b) ++j;
  }
  if (na == 0 || nb == 0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

}  // namespace

const char* source_name(Source s) { return s == Source::kOfficial ? "official" : "public"; }

TimelineSeries topic_timeline(const std::vector<Microblog>& docs, const std::vector<int>& labels,
                              int topic, Source source, const DateRange& window) {
  if (docs.size() != labels.size()) {
    throw ConfigError(fmt::format("timeline: {} docs but {} labels", docs.size(), labels.size()));
  }
  if (window.start > window.end) throw ConfigError("timeline: window start after end");
  std::map<Date, size_t> hits, totals;
  for (size_t d = 0; d < docs.size(); ++d) {
    if (!window.contains(docs[d].timestamp)) continue;
    const Date w = week_start(day_of(docs[d].timestamp));
    ++totals[w];
    if (labels[d] == topic) ++hits[w];
  }
  TimelineSeries s;
  s.topic = topic;
  s.source = source;
  for (Date w = week_start(window.start); w <= window.end; w += std::chrono::days{7}) {
    const size_t n = hits.count(w) ? hits[w] : 0;
    const size_t total = totals.count(w) ? totals[w] : 0;
    s.buckets.emplace_back(w, n);
    s.normalized.push_back(total ? static_cast<double>(n) / static_cast<double>(total) : 0.0);
  }
  return s;
}

std::vector<TimelineSeries> topic_timelines(const std::vector<Microblog>& docs,
                                            const std::vector<int>& labels, int n_topics,
                                            Source source, const DateRange& window) {
  std::vector<TimelineSeries> out;
  for (int t = 0; t < n_topics; ++t) out.push_back(topic_timeline(docs, labels, t, source, window));
  return out;
}

std::vector<EventMarker> default_events() {
  auto d = [](const char* s) { return *parse_date(s); };
  return {{d("2020-03-15"), "National state of disaster declared"},
          {d("2020-03-23"), "Lockdown announced"},
          {d("2020-03-27"), "Lockdown level 5 begins"},
          {d("2020-04-23"), "Level 4 announced"},
          {d("2020-05-01"), "Level 4 begins"}};
}

std::vector<EventMarker> load_events(const std::filesystem::path& path, const DateRange& window) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read event file '{}'", path.string()));
  std::vector<EventMarker> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    const auto date = parse_date(line.substr(0, comma));
    if (!date || comma == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'YYYY-MM-DD,label'", path.string(), line_no));
    }
    if (*date < window.start || *date > window.end) {
      throw ConfigError(fmt::format("{}:{}: event date outside the study window", path.string(),
                                    line_no));
    }
    std::string label = line.substr(comma + 1);
    while (!label.empty() && (label.back() == '\r' || label.back() == ' ')) label.pop_back();
    out.push_back({*date, label});
  }
  return out;
}

std::optional<double> subcorpus_similarity(const std::vector<const TokenList*>& a,
                                           const std::vector<const TokenList*>& b,
                                           TermWeighting weighting) {
  if (a.empty() || b.empty()) return std::nullopt;
  // Vectorizer fitted on the union of both sides.
  std::map<std::string, size_t> df;
  for (const auto* side : {&a, &b}) {
    for (const TokenList* doc : *side) {
      std::vector<std::string> uniq(doc->begin(), doc->end());
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (const auto& w : uniq) ++df[w];
    }
  }
  const size_t n = a.size() + b.size();
  auto aggregate = [&](const std::vector<const TokenList*>& side) {
    std::map<std::string, double> sum;
    for (const TokenList* doc : side) {
      std::map<std::string, double> tf;
      for (const auto& w : *doc) tf[w] += 1.0;
      for (const auto& [w, c] : tf) {
        sum[w] += c * (weighting == TermWeighting::kTfIdf ? idf(n, df[w]) : 1.0);
      }
    }
    return sum;
  };
  const auto va = aggregate(a);
  const auto vb = aggregate(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [w, x] : va) {
    na += x * x;
    if (auto it = vb.find(w); it != vb.end()) dot += x * it->second;
  }
  for (const auto& [w, y] : vb) nb += y * y;
  if (na == 0 || nb == 0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

SimilarityMatrix similarity_heatmap(const std::vector<TokenList>& official_docs,
                                    const std::vector<int>& official_labels,
                                    const std::vector<TokenList>& public_docs,
                                    const std::vector<int>& public_labels, size_t m,
                                    TermWeighting weighting) {
  check_labels(official_docs, official_labels, m, "official");
  check_labels(public_docs, public_labels, m, "public");
  std::unordered_map<std::string, uint32_t> ids;
  std::vector<size_t> n_off, n_pub;
  const auto off = profile_by_label(official_docs, official_labels, m, &ids, &n_off);
  const auto pub = profile_by_label(public_docs, public_labels, m, &ids, &n_pub);

  SimilarityMatrix out;
  out.rows = out.cols = m;
  out.values.assign(m * m, 0.0);
  out.undefined.assign(m * m, 0);
  const auto cells = static_cast<std::ptrdiff_t>(m * m);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const size_t t = static_cast<size_t>(c) / m, u = static_cast<size_t>(c) % m;
    const auto v = profile_cosine(off[t], n_off[t], pub[u], n_pub[u], weighting);
    out.values[static_cast<size_t>(c)] = v.value_or(0.0);
    out.undefined[static_cast<size_t>(c)] = !v.has_value();
  }
  return out;
}

namespace reference {

SimilarityMatrix similarity_heatmap(const std::vector<TokenList>& official_docs,
                                    const std::vector<int>& official_labels,
                                    const std::vector<TokenList>& public_docs,
                                    const std::vector<int>& public_labels, size_t m,
                                    TermWeighting weighting) {
  check_labels(official_docs, official_labels, m, "official");
  check_labels(public_docs, public_labels, m, "public");
  SimilarityMatrix out;
  out.rows = out.cols = m;
  out.values.assign(m * m, 0.0);
  out.undefined.assign(m * m, 0);
  for (size_t t = 0; t < m; ++t) {
    std::vector<const TokenList*> a;
    for (size_t d = 0; d < official_docs.size(); ++d) {
      if (official_labels[d] == static_cast<int>(t)) a.push_back(&official_docs[d]);
    }
    for (size_t u = 0; u < m; ++u) {
      std::vector<const TokenList*> b;
      for (size_t d = 0; d < public_docs.size(); ++d) {
        if (public_labels[d] == static_cast<int>(u)) b.push_back(&public_docs[d]);
      }
      const auto v = subcorpus_similarity(a, b, weighting);
      out.values[t * m + u] = v.value_or(0.0);
      out.undefined[t * m + u] = !v.has_value();
    }
  }
  return out;
}

}  // namespace reference

double power_law_slope(std::vector<size_t> counts) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  if (counts.size() > 50) counts.resize(50);
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  if (counts.size() < 3) {
    throw ConfigError(fmt::format("power_law_slope needs >= 3 positive counts, got {}", counts.size()));
  }
  const double n = static_cast<double>(counts.size());
  double mx = 0, my = 0;
  for (size_t r = 0; r < counts.size(); ++r) {
    mx += std::log(static_cast<double>(r + 1));
    my += std::log(static_cast<double>(counts[r]));
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t r = 0; r < counts.size(); ++r) {
    const double dx = std::log(static_cast<double>(r + 1)) - mx;
    sxy += dx * (std::log(static_cast<double>(counts[r])) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string timelines_csv(const std::vector<TimelineSeries>& series) {
  std::string out = "topic,source,week,count,normalized\n";
  for (const auto& s : series) {
    for (size_t i = 0; i < s.buckets.size(); ++i) {
      out += fmt::format("{},{},{},{},{:.17g}\n", s.topic, source_name(s.source),
                         format_date(s.buckets[i].first), s.buckets[i].second, s.normalized[i]);
    }
  }
  return out;
}

std::string heatmap_csv(const SimilarityMatrix& matrix) {
  std::string out = "official_topic,public_topic,similarity,undefined\n";
  for (size_t r = 0; r < matrix.rows; ++r) {
    for (size_t c = 0; c < matrix.cols; ++c) {
      out += fmt::format("{},{},{:.17g},{}\n", r, c, matrix.at(r, c),
                         matrix.is_undefined(r, c) ? 1 : 0);
    }
  }
  return out;
}

}  // namespace corextm
