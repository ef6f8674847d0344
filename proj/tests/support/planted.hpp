#ifndef COREXTM_TESTS_PLANTED_HPP_
#define COREXTM_TESTS_PLANTED_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "corextm/corpus.hpp"
#include "corextm/preprocess.hpp"

namespace corextm::testing {

// Synthetic corpus with disjoint per-topic vocabularies plus shared noise.
struct PlantedSpec {
  size_t n_docs = 1000;
  size_t n_topics = 5;
  size_t words_per_topic = 20;
  size_t noise_words = 50;
  size_t min_topic_words = 8;
  size_t max_topic_words = 15;
  size_t max_noise_words = 3;
  uint64_t seed = 7;
};

struct PlantedCorpus {
  std::vector<TokenList> docs;
  std::vector<int> truth;
  std::vector<std::vector<std::string>> topic_vocab;
  std::vector<std::string> noise_vocab;
};

// Word w of topic t is "t<t>w<ww>"; noise word k is "noise<kk>".
PlantedCorpus make_planted(const PlantedSpec& spec);

// One anchor per topic: the first word of each planted vocabulary.
std::vector<std::vector<std::string>> planted_anchor_groups(const PlantedCorpus& corpus);

// Microblogs whose text is the space-joined tokens, dated across the default
// study window. `author` is used for every post; `mention` (if non-empty) is
// appended to the mention list.
std::vector<Microblog> as_microblogs(const PlantedCorpus& corpus, size_t begin, size_t end,
                                     const std::string& author, const std::string& mention,
                                     const std::string& id_prefix);

// Independent Bernoulli(p) columns, named "w<ii>".
std::vector<TokenList> make_independent(size_t n_docs, size_t n_words, double p, uint64_t seed);

}  // namespace corextm::testing

#endif  // COREXTM_TESTS_PLANTED_HPP_
