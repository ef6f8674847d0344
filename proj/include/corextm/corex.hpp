#ifndef COREXTM_COREX_HPP_
#define COREXTM_COREX_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "corextm/preprocess.hpp"

namespace corextm {

// Ordered anchor-word groups; group g anchors topic g.
struct SeedSet {
  std::vector<std::vector<std::string>> groups;
  double anchor_strength = 2.0;

  // Lowercases words, drops empties and within-group duplicates. Throws
  // ConfigError when anchor_strength < 1.
  void normalize();
  std::vector<std::string> all_words() const;

  // The thirteen curated COVID-19 seed groups of the original study.
  static SeedSet defaults();
  // One group per line, comma-separated words. Blank lines and '#' comments
  // are skipped.
  static SeedSet load(const std::filesystem::path& path, double anchor_strength = 2.0);
  static SeedSet parse(std::string_view text, double anchor_strength = 2.0);
  void save(const std::filesystem::path& path) const;
  std::string to_text() const;
};

struct FitOptions {
  int n_topics = 20;
  int n_iter = 100;
  uint64_t rng_seed = 1;
  double smoothing = 1e-3;
  double alpha_step = 0.5;    // lambda in the alpha blend
  double temperature = 20.0;  // sharpness of the alpha soft competition
  double tc_tolerance = 1e-6;
};

// Soft-count tables from one pass over the non-empty documents. `mass` is the
// posterior weight of y_j = y; `present` the weight of (x_i = 1, y_j = y).
struct SoftCounts {
  size_t n_topics = 0;
  size_t n_words = 0;
  double n_samples = 0;
  std::vector<double> mass;     // [topic][y]
  std::vector<double> present;  // [topic][word][y]

  // 2x2 smoothed table indexed [x][y].
  std::array<std::array<double, 2>, 2> table(size_t topic, size_t word,
                                             double smoothing) const;

  bool operator==(const SoftCounts&) const = default;
};

class CorexModel {
 public:
  size_t n_topics() const { return n_topics_; }
  size_t n_words() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  uint64_t vocab_fingerprint() const { return vocab_fingerprint_; }
  double anchor_strength() const { return anchor_strength_; }
  double smoothing() const { return smoothing_; }
  const std::vector<std::pair<uint32_t, uint32_t>>& anchors() const { return anchors_; }

  double alpha(size_t topic, size_t word) const { return alpha_[topic * n_words() + word]; }
  double mi(size_t topic, size_t word) const { return mi_[topic * n_words() + word]; }
  // log p(x_word = x | y_topic = y)
  double log_marginal(size_t topic, size_t word, int y, int x) const {
    return log_marginals_[((topic * n_words() + word) * 2 + y) * 2 + x];
  }
  // log p(y_topic = 1)
  double log_prior(size_t topic) const { return log_prior_[topic]; }
  const std::vector<double>& tc_history() const { return tc_history_; }
  const SoftCounts& soft_counts() const { return counts_; }

  const std::vector<double>& alpha_data() const { return alpha_; }
  const std::vector<double>& mi_data() const { return mi_; }

  // Self-describing text file; see corex.cpp for the layout.
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static CorexModel load(const std::filesystem::path& path);
  static CorexModel deserialize(std::string_view text);

  bool operator==(const CorexModel&) const = default;

 private:
  friend class ModelBuilder;

  size_t n_topics_ = 0;
  std::vector<std::string> words_;
  uint64_t vocab_fingerprint_ = 0;
  double anchor_strength_ = 2.0;
  double smoothing_ = 1e-3;
  std::vector<std::pair<uint32_t, uint32_t>> anchors_;  // (topic, word)
  std::vector<double> alpha_;          // [topic][word]
  std::vector<double> log_marginals_;  // [topic][word][y][x]
  std::vector<double> log_prior_;      // [topic]
  std::vector<double> tc_history_;
  std::vector<double> mi_;  // [topic][word]
  SoftCounts counts_;
};

// Mutable access for the fitting kernels and the deserializer.
class ModelBuilder {
 public:
  explicit ModelBuilder(CorexModel* model) : m_(model) {}
  size_t& n_topics() { return m_->n_topics_; }
  std::vector<std::string>& words() { return m_->words_; }
  uint64_t& vocab_fingerprint() { return m_->vocab_fingerprint_; }
  double& anchor_strength() { return m_->anchor_strength_; }
  double& smoothing() { return m_->smoothing_; }
  std::vector<std::pair<uint32_t, uint32_t>>& anchors() { return m_->anchors_; }
  std::vector<double>& alpha() { return m_->alpha_; }
  std::vector<double>& log_marginals() { return m_->log_marginals_; }
  std::vector<double>& log_prior() { return m_->log_prior_; }
  std::vector<double>& tc_history() { return m_->tc_history_; }
  std::vector<double>& mi() { return m_->mi_; }
  SoftCounts& counts() { return m_->counts_; }

 private:
  CorexModel* m_;
};

// Anchored CorEx over binary word-presence variables. Empty rows carry no
// evidence and are left out of the soft counts. Throws ConfigError when a
// seed word is missing from `vocab`, when there are more seed groups than
// topics, or when every row is empty.
CorexModel fit(const DocTermMatrix& matrix, const Vocabulary& vocab, const SeedSet& seeds,
               const FitOptions& options);

// Word present more often when the topic is on than when it is off. Only
// such words compete for a topic's weight and qualify as its keywords; MI
// alone cannot tell "present with y" from "absent with y".
inline bool positively_associated(const CorexModel& model, size_t topic, size_t word) {
  return model.log_marginal(topic, word, 1, 1) > model.log_marginal(topic, word, 0, 1);
}

// MI with the topic if positively associated, else 0. Drives the alpha
// competition.
inline double signed_mi(const CorexModel& model, size_t topic, size_t word) {
  return positively_associated(model, topic, word) ? model.mi(topic, word) : 0.0;
}

struct PosteriorTable {
  size_t n_docs = 0;
  size_t n_topics = 0;
  std::vector<double> prob;      // p(y_j = 1 | x), [doc][topic]
  std::vector<double> log_odds;  // log p(y_j = 1 | x) - log p(y_j = 0 | x)
  std::vector<double> log_z;     // per-(doc, topic) log normalizer
  std::vector<uint8_t> empty;    // row had no in-vocabulary words

  double p(size_t doc, size_t topic) const { return prob[doc * n_topics + topic]; }
  std::vector<double> row(size_t doc) const;
};

// Frozen-parameter inference; OpenMP-parallel over documents. Throws
// ConfigError when the matrix was built from a different vocabulary.
PosteriorTable posterior(const CorexModel& model, const DocTermMatrix& matrix);

struct Labeling {
  std::vector<int> topics;
  std::vector<uint8_t> empty;  // labeled by prior, no evidence
};

// argmax over topics of the posterior log-odds, lowest index on ties.
Labeling label(const CorexModel& model, const DocTermMatrix& matrix);
Labeling label_from_posterior(const PosteriorTable& post);

// Words of `topic` ranked by alpha * MI (so anchors lead), preferring words
// whose highest-scoring topic is `topic`; remaining slots are filled from the
// rest. Only positively associated words with a positive score that occur in
// at least one fitted document are eligible, so the list may be shorter than k.
std::vector<std::string> top_words(const CorexModel& model, size_t topic, size_t k = 10);

// I(X;Y) in nats of a non-negative 2x2 table [x][y]; normalized internally.
// Throws ConfigError on a negative or all-zero table.
double mutual_information(const std::array<std::array<double, 2>, 2>& joint);

// Last entry of tc_history; throws ConfigError for an unfitted model.
double tc_bound(const CorexModel& model);

namespace kernels {

// The pieces of one fitting iteration, exposed for the serial reference, the
// tests and the benchmark.

struct EStepResult {
  std::vector<double> q1;     // [doc][topic], p(y = 1 | x)
  std::vector<double> log_z;     // [doc][topic]
  std::vector<double> log_odds;  // [doc][topic]
  double tc = 0;
};

// Rows in `docs` index into `matrix`; only they are scored.
EStepResult estep(const CorexModel& model, const DocTermMatrix& matrix,
                  const std::vector<uint32_t>& docs);

SoftCounts accumulate(const DocTermMatrix& matrix, const std::vector<uint32_t>& docs,
                      const std::vector<double>& q1, size_t n_topics);

}  // namespace kernels

}  // namespace corextm

#endif  // COREXTM_COREX_HPP_
