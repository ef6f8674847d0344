#ifndef COREXTM_ANALYTICS_HPP_
#define COREXTM_ANALYTICS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corextm/corpus.hpp"
#include "corextm/dates.hpp"
#include "corextm/preprocess.hpp"

namespace corextm {

enum class Source { kOfficial, kPublic };

const char* source_name(Source s);

struct TimelineSeries {
  int topic = 0;
  Source source = Source::kOfficial;
  std::vector<std::pair<Date, size_t>> buckets;  // Monday-start weeks, ascending
  // Fraction of that week's labeled posts from the same source.
  std::vector<double> normalized;
};

// Weekly counts of posts labeled `topic`, every week of `window` present.
// Throws ConfigError when docs and labels differ in length.
TimelineSeries topic_timeline(const std::vector<Microblog>& docs, const std::vector<int>& labels,
                              int topic, Source source, const DateRange& window);

std::vector<TimelineSeries> topic_timelines(const std::vector<Microblog>& docs,
                                            const std::vector<int>& labels, int n_topics,
                                            Source source, const DateRange& window);

struct EventMarker {
  Date date;
  std::string label;
};

// Policy dates marked on the original study's timelines.
std::vector<EventMarker> default_events();
// "YYYY-MM-DD,label" per line; '#' comments and blank lines skipped. Markers
// outside `window` are rejected with ConfigError.
std::vector<EventMarker> load_events(const std::filesystem::path& path, const DateRange& window);

// rows = official topics, columns = public topics.
struct SimilarityMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;
  std::vector<uint8_t> undefined;  // an empty sub-corpus; value is 0

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
  bool is_undefined(size_t r, size_t c) const { return undefined[r * cols + c] != 0; }
};

enum class TermWeighting { kTf, kTfIdf };

// Cosine similarity between two sub-corpora. The weighting is fitted on their
// union (each document one unit, idf = ln((1 + N) / (1 + df)) + 1) and each
// sub-corpus is the sum of its document vectors. nullopt when either side is
// empty or has no terms.
std::optional<double> subcorpus_similarity(const std::vector<const TokenList*>& a,
                                           const std::vector<const TokenList*>& b,
                                           TermWeighting weighting = TermWeighting::kTfIdf);

// Cell (t, u) compares official docs labeled t with public docs labeled u.
// Parallel over cells. Throws ConfigError on labels outside [0, m) or
// misaligned inputs.
SimilarityMatrix similarity_heatmap(const std::vector<TokenList>& official_docs,
                                    const std::vector<int>& official_labels,
                                    const std::vector<TokenList>& public_docs,
                                    const std::vector<int>& public_labels, size_t m,
                                    TermWeighting weighting = TermWeighting::kTfIdf);

namespace reference {
// Serial cell-by-cell evaluation through subcorpus_similarity.
SimilarityMatrix similarity_heatmap(const std::vector<TokenList>& official_docs,
                                    const std::vector<int>& official_labels,
                                    const std::vector<TokenList>& public_docs,
                                    const std::vector<int>& public_labels, size_t m,
                                    TermWeighting weighting = TermWeighting::kTfIdf);
}  // namespace reference

// Least-squares slope of log(count) against log(rank) over the top 50
// positive counts. Throws ConfigError with fewer than 3 positive counts.
double power_law_slope(std::vector<size_t> counts);

// Long format: topic,source,week,count,normalized
std::string timelines_csv(const std::vector<TimelineSeries>& series);
// official_topic,public_topic,similarity,undefined
std::string heatmap_csv(const SimilarityMatrix& matrix);

}  // namespace corextm

#endif  // COREXTM_ANALYTICS_HPP_
