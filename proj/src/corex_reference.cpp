#include "corextm/corex_reference.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "corextm/error.hpp"

namespace corextm::reference {

namespace {

std::vector<uint8_t> dense(const DocTermMatrix& matrix, uint32_t doc) {
  std::vector<uint8_t> x(matrix.n_words, 0);
  for (uint32_t c : matrix.rows[doc]) x[c] = 1;
  return x;
}

void set_parameters(ModelBuilder& b, const SoftCounts& c, double s) {
  const size_t m = c.n_topics, v = c.n_words;
  b.log_prior().assign(m, 0.0);
  b.log_marginals().assign(m * v * 4, 0.0);
  b.mi().assign(m * v, 0.0);
  for (size_t j = 0; j < m; ++j) {
    b.log_prior()[j] = std::log((c.mass[j * 2 + 1] + s) / (c.n_samples + 2 * s));
    for (size_t i = 0; i < v; ++i) {
      double t[2][2];
      for (int y = 0; y < 2; ++y) {
        const double on = c.present[(j * v + i) * 2 + y];
        t[1][y] = on + s;
        t[0][y] = std::max(0.0, c.mass[j * 2 + y] - on) + s;
        for (int x = 0; x < 2; ++x) {
          b.log_marginals()[((j * v + i) * 2 + y) * 2 + x] = std::log(t[x][y] / (t[0][y] + t[1][y]));
        }
      }
      b.mi()[j * v + i] = mutual_information({{{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}});
    }
  }
  b.counts() = c;
}

void normalize_word(std::vector<double>& alpha, size_t m, size_t v, size_t i) {
  double total = 0;
  for (size_t j = 0; j < m; ++j) total += alpha[j * v + i];
  if (total > 1.0) {
    for (size_t j = 0; j < m; ++j) alpha[j * v + i] /= total;
  }
}

void pin_anchors(ModelBuilder& b, size_t m, size_t v, double strength) {
  for (const auto& [topic, word] : b.anchors()) {
    for (size_t j = 0; j < m; ++j) b.alpha()[j * v + word] = 0.0;
  }
  for (const auto& [topic, word] : b.anchors()) b.alpha()[topic * v + word] = strength;
}

}  // namespace

kernels::EStepResult estep(const CorexModel& model, const DocTermMatrix& matrix,
                           const std::vector<uint32_t>& docs) {
  const size_t m = model.n_topics(), v = model.n_words();
  kernels::EStepResult out;
  out.q1.resize(docs.size() * m);
  out.log_z.resize(docs.size() * m);
  out.log_odds.resize(docs.size() * m);
  for (size_t k = 0; k < docs.size(); ++k) {
    const auto x = dense(matrix, docs[k]);
    for (size_t j = 0; j < m; ++j) {
      const double p1 = std::exp(model.log_prior(j));
      const double py[2] = {1.0 - p1, p1};
      double score[2];
      for (int y = 0; y < 2; ++y) {
        score[y] = std::log(py[y]);
        for (size_t i = 0; i < v; ++i) {
          const int xi = x[i];
          const double px = py[0] * std::exp(model.log_marginal(j, i, 0, xi)) +
                            py[1] * std::exp(model.log_marginal(j, i, 1, xi));
          score[y] += model.alpha(j, i) * (model.log_marginal(j, i, y, xi) - std::log(px));
        }
      }
      const double z = std::log(std::exp(score[0]) + std::exp(score[1]));
      out.q1[k * m + j] = std::exp(score[1] - z);
      out.log_z[k * m + j] = z;
      out.log_odds[k * m + j] = score[1] - score[0];
    }
  }
  out.tc = 0;
  for (size_t j = 0; j < m; ++j) {
    double sum = 0;
    for (size_t k = 0; k < docs.size(); ++k) sum += out.log_z[k * m + j];
    if (!docs.empty()) out.tc += sum / static_cast<double>(docs.size());
  }
  return out;
}

SoftCounts accumulate(const DocTermMatrix& matrix, const std::vector<uint32_t>& docs,
                      const std::vector<double>& q1, size_t n_topics) {
  SoftCounts c;
  c.n_topics = n_topics;
  c.n_words = matrix.n_words;
  c.n_samples = static_cast<double>(docs.size());
  c.mass.assign(n_topics * 2, 0.0);
  c.present.assign(n_topics * matrix.n_words * 2, 0.0);
  for (size_t k = 0; k < docs.size(); ++k) {
    const auto x = dense(matrix, docs[k]);
    for (size_t j = 0; j < n_topics; ++j) {
      const double w[2] = {1.0 - q1[k * n_topics + j], q1[k * n_topics + j]};
      for (int y = 0; y < 2; ++y) {
        c.mass[j * 2 + y] += w[y];
        for (size_t i = 0; i < matrix.n_words; ++i) {
          if (x[i]) c.present[(j * matrix.n_words + i) * 2 + y] += w[y];
        }
      }
    }
  }
  return c;
}

CorexModel fit(const DocTermMatrix& matrix, const Vocabulary& vocab, const SeedSet& seeds,
               const FitOptions& options) {
  if (options.n_topics < 1 || options.n_iter < 1) throw ConfigError("bad fit options");
  if (seeds.groups.size() > static_cast<size_t>(options.n_topics)) {
    throw ConfigError("more seed groups than topics");
  }
  const size_t m = static_cast<size_t>(options.n_topics);
  const size_t v = vocab.size();

  CorexModel model;
  ModelBuilder b(&model);
  b.n_topics() = m;
  b.words() = vocab.words();
  b.vocab_fingerprint() = vocab.fingerprint();
  b.anchor_strength() = seeds.anchor_strength;
  b.smoothing() = options.smoothing;
  for (size_t g = 0; g < seeds.groups.size(); ++g) {
    for (const auto& w : seeds.groups[g]) {
      const int64_t col = vocab.find(w);
      if (col < 0) throw ConfigError(fmt::format("seed word '{}' is not in the vocabulary", w));
      b.anchors().emplace_back(static_cast<uint32_t>(g), static_cast<uint32_t>(col));
    }
  }
  std::vector<uint32_t> docs;
  for (size_t d = 0; d < matrix.n_docs; ++d) {
    if (!matrix.rows[d].empty()) docs.push_back(static_cast<uint32_t>(d));
  }
  if (docs.empty()) throw ConfigError("every document is empty; nothing to fit");

  std::mt19937_64 rng(options.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  b.alpha().assign(m * v, 0.0);
  for (size_t idx = 0; idx < m * v; ++idx) b.alpha()[idx] = 0.5 + 0.5 * unit(rng);
  for (size_t i = 0; i < v; ++i) normalize_word(b.alpha(), m, v, i);
  pin_anchors(b, m, v, seeds.anchor_strength);

  std::vector<double> q1(docs.size() * m);
  for (size_t idx = 0; idx < q1.size(); ++idx) q1[idx] = unit(rng);
  for (size_t g = 0; g < seeds.groups.size(); ++g) {
    size_t n_cols = 0;
    for (const auto& a : b.anchors()) n_cols += a.first == g;
    if (n_cols == 0) continue;
    for (size_t k = 0; k < docs.size(); ++k) {
      const auto x = dense(matrix, docs[k]);
      size_t hits = 0;
      for (const auto& [topic, word] : b.anchors()) {
        if (topic == g) hits += x[word];
      }
      q1[k * m + g] = 0.5 * q1[k * m + g] + 0.5 * static_cast<double>(hits) / static_cast<double>(n_cols);
    }
  }
  set_parameters(b, accumulate(matrix, docs, q1, m), options.smoothing);
  for (double& lp : b.log_prior()) lp = std::log(0.5);

  for (int it = 0; it < options.n_iter; ++it) {
    const auto e = estep(model, matrix, docs);
    set_parameters(b, accumulate(matrix, docs, e.q1, m), options.smoothing);
    for (size_t i = 0; i < v; ++i) {
      double best = 0;
      for (size_t j = 0; j < m; ++j) best = std::max(best, signed_mi(model, j, i));
      for (size_t j = 0; j < m; ++j) {
        double& a = b.alpha()[j * v + i];
        a = (1.0 - options.alpha_step) * a +
            options.alpha_step * std::exp(options.temperature * (signed_mi(model, j, i) - best));
        a = std::min(1.0, std::max(0.0, a));
      }
      normalize_word(b.alpha(), m, v, i);
    }
    pin_anchors(b, m, v, seeds.anchor_strength);
    b.tc_history().push_back(e.tc);
    const auto& h = model.tc_history();
    if (h.size() >= 2 && std::abs(h[h.size() - 1] - h[h.size() - 2]) < options.tc_tolerance) break;
  }
  return model;
}

}  // namespace corextm::reference
