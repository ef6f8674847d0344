#include "planted.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace corextm::testing {

PlantedCorpus make_planted(const PlantedSpec& spec) {
  PlantedCorpus out;
  for (size_t t = 0; t < spec.n_topics; ++t) {
    std::vector<std::string> vocab;
    for (size_t w = 0; w < spec.words_per_topic; ++w) vocab.push_back(fmt::format("t{}w{:02d}", t, w));
    out.topic_vocab.push_back(std::move(vocab));
  }
  for (size_t k = 0; k < spec.noise_words; ++k) out.noise_vocab.push_back(fmt::format("noise{:02d}", k));

  std::mt19937_64 rng(spec.seed);
  std::vector<size_t> topic_idx(spec.words_per_topic), noise_idx(spec.noise_words);
  std::iota(topic_idx.begin(), topic_idx.end(), 0);
  std::iota(noise_idx.begin(), noise_idx.end(), 0);
  std::uniform_int_distribution<size_t> n_topic_words(spec.min_topic_words, spec.max_topic_words);
  std::uniform_int_distribution<size_t> n_noise(0, spec.max_noise_words);
  for (size_t d = 0; d < spec.n_docs; ++d) {
    const int topic = static_cast<int>(d % spec.n_topics);
    std::shuffle(topic_idx.begin(), topic_idx.end(), rng);
    std::shuffle(noise_idx.begin(), noise_idx.end(), rng);
    TokenList doc;
    const size_t k = std::min(n_topic_words(rng), spec.words_per_topic);
    for (size_t i = 0; i < k; ++i) doc.push_back(out.topic_vocab[topic][topic_idx[i]]);
    const size_t z = std::min(n_noise(rng), spec.noise_words);
    for (size_t i = 0; i < z; ++i) doc.push_back(out.noise_vocab[noise_idx[i]]);
    std::shuffle(doc.begin(), doc.end(), rng);
    out.docs.push_back(std::move(doc));
    out.truth.push_back(topic);
  }
  return out;
}

std::vector<std::vector<std::string>> planted_anchor_groups(const PlantedCorpus& corpus) {
  std::vector<std::vector<std::string>> groups;
  for (const auto& v : corpus.topic_vocab) groups.push_back({v.front()});
  return groups;
}

std::vector<Microblog> as_microblogs(const PlantedCorpus& corpus, size_t begin, size_t end,
                                     const std::string& author, const std::string& mention,
                                     const std::string& id_prefix) {
  std::vector<Microblog> out;
  const auto window = default_study_window();
  const auto span = (window.end - window.start).count() + 1;
  for (size_t d = begin; d < end; ++d) {
    Microblog m;
    m.id = fmt::format("{}{}", id_prefix, d);
    m.timestamp = Timestamp{window.start + std::chrono::days{static_cast<long>(d) % span}} +
                  std::chrono::hours{12};
    m.author = author;
    std::string text;
    for (const auto& tok : corpus.docs[d]) {
      if (!text.empty()) text.push_back(' ');
      text += tok;
    }
    m.text = std::move(text);
    if (!mention.empty()) m.mentions.push_back(mention);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<TokenList> make_independent(size_t n_docs, size_t n_words, double p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<TokenList> docs(n_docs);
  for (auto& doc : docs) {
    for (size_t w = 0; w < n_words; ++w) {
      if (coin(rng)) doc.push_back(fmt::format("w{:02d}", w));
    }
  }
  return docs;
}

}  // namespace corextm::testing
