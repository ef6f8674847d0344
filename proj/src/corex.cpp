#include "corextm/corex.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "corextm/error.hpp"

namespace corextm {

namespace {

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string lower_copy(std::string s) {
  for (char& c : s) {
    if (static_cast<unsigned char>(c) < 0x80) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return s;
}

// Shortest round-trip representation.
void put_double(std::string* out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out->append(buf, ptr);
}

// Writes log p(x | y), log p(y = 1) and MI from a fresh set of soft counts.
void apply_counts(ModelBuilder& b, SoftCounts counts, double smoothing) {
  const size_t m = counts.n_topics;
  const size_t v = counts.n_words;
  auto& logm = b.log_marginals();
  auto& mi = b.mi();
  auto& prior = b.log_prior();
  logm.assign(m * v * 4, 0.0);
  mi.assign(m * v, 0.0);
  prior.assign(m, 0.0);
  for (size_t j = 0; j < m; ++j) {
    const double p1 = (counts.mass[j * 2 + 1] + smoothing) / (counts.n_samples + 2 * smoothing);
    prior[j] = std::log(p1);
    for (size_t i = 0; i < v; ++i) {
      const auto t = counts.table(j, i, smoothing);
      for (int y = 0; y < 2; ++y) {
        const double col = t[0][y] + t[1][y];
        logm[((j * v + i) * 2 + y) * 2 + 0] = std::log(t[0][y] / col);
        logm[((j * v + i) * 2 + y) * 2 + 1] = std::log(t[1][y] / col);
      }
      mi[j * v + i] = mutual_information(t);
    }
  }
  b.counts() = std::move(counts);
}

// A word's weights across topics sum to at most one, so its information is
// split between topics rather than counted once per topic.
void cap_word_weight(std::vector<double>* alpha, size_t n_topics, size_t n_words, size_t word) {
  double total = 0;
  for (size_t j = 0; j < n_topics; ++j) total += (*alpha)[j * n_words + word];
  if (total <= 1.0) return;
  for (size_t j = 0; j < n_topics; ++j) (*alpha)[j * n_words + word] /= total;
}

void update_alpha(const CorexModel& model, ModelBuilder& b, size_t n_topics, size_t n_words,
                  double step, double temperature, double anchor_strength) {
  auto& alpha = b.alpha();
  for (size_t i = 0; i < n_words; ++i) {
    double best = 0;
    for (size_t j = 0; j < n_topics; ++j) best = std::max(best, signed_mi(model, j, i));
    for (size_t j = 0; j < n_topics; ++j) {
      double& a = alpha[j * n_words + i];
      a = (1.0 - step) * a + step * std::exp(temperature * (signed_mi(model, j, i) - best));
      a = std::clamp(a, 0.0, 1.0);
    }
    cap_word_weight(&alpha, n_topics, n_words, i);
  }
  // An anchor word only feeds the topic(s) it anchors.
  for (const auto& [topic, word] : b.anchors()) {
    for (size_t j = 0; j < n_topics; ++j) alpha[j * n_words + word] = 0.0;
  }
  for (const auto& [topic, word] : b.anchors()) alpha[topic * n_words + word] = anchor_strength;
}

}  // namespace

// ---------------------------------------------------------------------------
// SeedSet

void SeedSet::normalize() {
  if (!(anchor_strength >= 1.0)) {
    throw ConfigError(fmt::format("anchor_strength must be >= 1, got {}", anchor_strength));
  }
  for (auto& group : groups) {
    std::vector<std::string> clean;
    for (auto& w : group) {
      std::string t = lower_copy(trim_copy(w));
      if (t.empty()) continue;
      if (std::find(clean.begin(), clean.end(), t) == clean.end()) clean.push_back(std::move(t));
    }
    group = std::move(clean);
  }
}

std::vector<std::string> SeedSet::all_words() const {
  std::vector<std::string> out;
  for (const auto& g : groups) {
    for (const auto& w : g) {
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
  }
  return out;
}

SeedSet SeedSet::defaults() {
  SeedSet s;
  s.groups = {
      {"movement", "travel"},
      {"coughing", "nose", "touching", "avoid", "droplets"},
      {"death", "cases", "recovered", "recoveries"},
      {"kids", "children", "school"},
      {"testing", "tests", "screening", "screen", "swab"},
      {"economy", "investment"},
      {"alcohol", "wine", "beer", "drinking"},
      {"retrenched", "lost", "jobs"},
      {"smoking", "cigarettes", "cigarettes", "smoke"},
      {"government", "president", "minister", "command"},
      {"home", "distancing", "lockdown"},
      {"doctor", "ppe", "masks", "nurse", "healthcare", "hospital"},
      {"fake", "news"},
  };
  s.normalize();
  return s;
}

SeedSet SeedSet::parse(std::string_view text, double anchor_strength) {
  SeedSet s;
  s.anchor_strength = anchor_strength;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim_copy(line).empty()) continue;
    std::vector<std::string> group;
    std::istringstream fields(line);
    std::string word;
    while (std::getline(fields, word, ',')) group.push_back(word);
    s.groups.push_back(std::move(group));
  }
  s.normalize();
  return s;
}

SeedSet SeedSet::load(const std::filesystem::path& path, double anchor_strength) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read seed file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), anchor_strength);
}

std::string SeedSet::to_text() const {
  std::string out;
  for (const auto& g : groups) {
    for (size_t i = 0; i < g.size(); ++i) {
      if (i) out.push_back(',');
      out += g[i];
    }
    out.push_back('\n');
  }
  return out;
}

void SeedSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << to_text();
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

// ---------------------------------------------------------------------------
// Soft counts and MI

std::array<std::array<double, 2>, 2> SoftCounts::table(size_t topic, size_t word,
                                                       double smoothing) const {
  std::array<std::array<double, 2>, 2> t{};
  for (int y = 0; y < 2; ++y) {
    const double on = present[(topic * n_words + word) * 2 + y];
    const double off = std::max(0.0, mass[topic * 2 + y] - on);
    t[1][y] = on + smoothing;
    t[0][y] = off + smoothing;
  }
  return t;
}

double mutual_information(const std::array<std::array<double, 2>, 2>& joint) {
  double total = 0;
  for (const auto& row : joint) {
    for (double c : row) {
      if (!(c >= 0)) throw ConfigError("mutual_information: negative or NaN count");
      total += c;
    }
  }
  if (total <= 0) throw ConfigError("mutual_information: all-zero table");
  const double px[2] = {(joint[0][0] + joint[0][1]) / total, (joint[1][0] + joint[1][1]) / total};
  const double py[2] = {(joint[0][0] + joint[1][0]) / total, (joint[0][1] + joint[1][1]) / total};
  double mi = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double pxy = joint[x][y] / total;
      if (pxy > 0) mi += pxy * std::log(pxy / (px[x] * py[y]));
    }
  }
  return std::max(0.0, mi);
}

double tc_bound(const CorexModel& model) {
  if (model.tc_history().empty()) throw ConfigError("tc_bound: model has not been fitted");
  return model.tc_history().back();
}

// ---------------------------------------------------------------------------
// Kernels

namespace kernels {

EStepResult estep(const CorexModel& model, const DocTermMatrix& matrix,
                  const std::vector<uint32_t>& docs) {
  const size_t m = model.n_topics();
  const size_t v = model.n_words();

  // Every word contributes its "absent" term; present words swap it for the
  // "present" term. base[j][y] holds the all-absent score, delta[i][j][y]
  // the per-present-word correction.
  std::vector<double> base(m * 2);
  std::vector<double> delta(v * m * 2);
  for (size_t j = 0; j < m; ++j) {
    const double lp1 = model.log_prior(j);
    const double lp0 = std::log1p(-std::exp(lp1));
    const double lp[2] = {lp0, lp1};
    double acc[2] = {lp0, lp1};
    for (size_t i = 0; i < v; ++i) {
      const double a = model.alpha(j, i);
      double lpx[2];
      for (int x = 0; x < 2; ++x) {
        lpx[x] = log_sum_exp(lp[0] + model.log_marginal(j, i, 0, x),
                             lp[1] + model.log_marginal(j, i, 1, x));
      }
      for (int y = 0; y < 2; ++y) {
        const double off = model.log_marginal(j, i, y, 0) - lpx[0];
        const double on = model.log_marginal(j, i, y, 1) - lpx[1];
        acc[y] += a * off;
        delta[(i * m + j) * 2 + y] = a * (on - off);
      }
    }
    base[j * 2] = acc[0];
    base[j * 2 + 1] = acc[1];
  }

  EStepResult out;
  const size_t n = docs.size();
  out.q1.assign(n * m, 0.0);
  out.log_z.assign(n * m, 0.0);
  out.log_odds.assign(n * m, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    std::vector<double> score(m * 2);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const auto& row = matrix.rows[docs[static_cast<size_t>(k)]];
      std::copy(base.begin(), base.end(), score.begin());
      for (uint32_t i : row) {
        const double* d = &delta[static_cast<size_t>(i) * m * 2];
        for (size_t t = 0; t < m * 2; ++t) score[t] += d[t];
      }
      for (size_t j = 0; j < m; ++j) {
        const double z = log_sum_exp(score[j * 2], score[j * 2 + 1]);
        out.q1[static_cast<size_t>(k) * m + j] = std::exp(score[j * 2 + 1] - z);
        out.log_z[static_cast<size_t>(k) * m + j] = z;
        out.log_odds[static_cast<size_t>(k) * m + j] = score[j * 2 + 1] - score[j * 2];
      }
    }
  }

  // Fixed-order reduction keeps the bound bit-reproducible across thread counts.
  double tc = 0;
  if (n > 0) {
    for (size_t j = 0; j < m; ++j) {
      double sum = 0;
      for (size_t k = 0; k < n; ++k) sum += out.log_z[k * m + j];
      tc += sum / static_cast<double>(n);
    }
  }
  out.tc = tc;
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
  const size_t v = matrix.n_words;
  const auto m = static_cast<std::ptrdiff_t>(n_topics);
  // Parallel over topics; each topic sums its documents in order, so results
  // do not depend on the thread count.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < m; ++jj) {
    const auto j = static_cast<size_t>(jj);
    double mass0 = 0, mass1 = 0;
    double* present = &c.present[j * v * 2];
    for (size_t k = 0; k < docs.size(); ++k) {
      const double p1 = q1[k * n_topics + j];
      const double p0 = 1.0 - p1;
      mass0 += p0;
      mass1 += p1;
      for (uint32_t i : matrix.rows[docs[k]]) {
        present[i * 2] += p0;
        present[i * 2 + 1] += p1;
      }
    }
    c.mass[j * 2] = mass0;
    c.mass[j * 2 + 1] = mass1;
  }
  return c;
}

}  // namespace kernels

// ---------------------------------------------------------------------------
// Fit / inference

CorexModel fit(const DocTermMatrix& matrix, const Vocabulary& vocab, const SeedSet& seeds,
               const FitOptions& options) {
  if (options.n_topics < 1) throw ConfigError("n_topics must be >= 1");
  if (options.n_iter < 1) throw ConfigError("n_iter must be >= 1");
  if (seeds.groups.size() > static_cast<size_t>(options.n_topics)) {
    throw ConfigError(fmt::format("{} seed groups but only {} topics", seeds.groups.size(),
                                  options.n_topics));
  }
  if (!(seeds.anchor_strength >= 1.0)) throw ConfigError("anchor_strength must be >= 1");
  if (matrix.vocab_fingerprint != vocab.fingerprint() || matrix.n_words != vocab.size()) {
    throw ConfigError("document-term matrix was built from a different vocabulary");
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
  b.alpha().resize(m * v);
  for (double& a : b.alpha()) a = 0.5 + 0.5 * unit(rng);
  for (size_t i = 0; i < v; ++i) cap_word_weight(&b.alpha(), m, v, i);
  for (const auto& [topic, word] : b.anchors()) {
    for (size_t j = 0; j < m; ++j) b.alpha()[j * v + word] = 0.0;
  }
  for (const auto& [topic, word] : b.anchors()) b.alpha()[topic * v + word] = seeds.anchor_strength;

  // Random soft assignments give marginals that are perturbed corpus
  // frequencies; priors start flat.
  std::vector<double> q1(docs.size() * m);
  for (double& q : q1) q = unit(rng);
  // Anchored topics start half-way toward the fraction of their anchor words
  // present in each document.
  for (size_t g = 0; g < seeds.groups.size(); ++g) {
    std::vector<uint32_t> cols;
    for (const auto& [topic, word] : b.anchors()) {
      if (topic == g) cols.push_back(word);
    }
    if (cols.empty()) continue;
    for (size_t k = 0; k < docs.size(); ++k) {
      const auto& row = matrix.rows[docs[k]];
      size_t hits = 0;
      for (uint32_t c : cols) hits += std::binary_search(row.begin(), row.end(), c);
      q1[k * m + g] = 0.5 * q1[k * m + g] +
                      0.5 * static_cast<double>(hits) / static_cast<double>(cols.size());
    }
  }
  apply_counts(b, kernels::accumulate(matrix, docs, q1, m), options.smoothing);
  std::fill(b.log_prior().begin(), b.log_prior().end(), std::log(0.5));

  for (int it = 0; it < options.n_iter; ++it) {
    auto e = kernels::estep(model, matrix, docs);
    apply_counts(b, kernels::accumulate(matrix, docs, e.q1, m), options.smoothing);
    update_alpha(model, b, m, v, options.alpha_step, options.temperature, seeds.anchor_strength);
    auto& hist = b.tc_history();
    hist.push_back(e.tc);
    if (hist.size() >= 2 && std::abs(hist.back() - hist[hist.size() - 2]) < options.tc_tolerance) {
      break;
    }
  }
  return model;
}

std::vector<double> PosteriorTable::row(size_t doc) const {
  return {prob.begin() + static_cast<std::ptrdiff_t>(doc * n_topics),
          prob.begin() + static_cast<std::ptrdiff_t>((doc + 1) * n_topics)};
}

PosteriorTable posterior(const CorexModel& model, const DocTermMatrix& matrix) {
  if (matrix.vocab_fingerprint != model.vocab_fingerprint() ||
      matrix.n_words != model.n_words()) {
    throw ConfigError("vocabulary fingerprint of the matrix does not match the model");
  }
  const size_t m = model.n_topics();
  PosteriorTable out;
  out.n_docs = matrix.n_docs;
  out.n_topics = m;
  out.prob.assign(matrix.n_docs * m, 0.0);
  out.log_odds.assign(matrix.n_docs * m, 0.0);
  out.log_z.assign(matrix.n_docs * m, 0.0);
  out.empty.assign(matrix.n_docs, 0);

  std::vector<uint32_t> docs;
  for (size_t d = 0; d < matrix.n_docs; ++d) {
    if (matrix.rows[d].empty()) {
      out.empty[d] = 1;
      for (size_t j = 0; j < m; ++j) {
        const double lp1 = model.log_prior(j);
        out.prob[d * m + j] = std::exp(lp1);
        out.log_odds[d * m + j] = lp1 - std::log1p(-std::exp(lp1));
      }
    } else {
      docs.push_back(static_cast<uint32_t>(d));
    }
  }
  const auto e = kernels::estep(model, matrix, docs);
  for (size_t k = 0; k < docs.size(); ++k) {
    const size_t d = docs[k];
    for (size_t j = 0; j < m; ++j) {
      const double q = e.q1[k * m + j];
      out.prob[d * m + j] = q;
      out.log_z[d * m + j] = e.log_z[k * m + j];
      out.log_odds[d * m + j] = e.log_odds[k * m + j];
    }
  }
  return out;
}

Labeling label_from_posterior(const PosteriorTable& post) {
  Labeling out;
  out.topics.resize(post.n_docs, 0);
  out.empty = post.empty;
  for (size_t d = 0; d < post.n_docs; ++d) {
    size_t best = 0;
    for (size_t j = 1; j < post.n_topics; ++j) {
      if (post.log_odds[d * post.n_topics + j] > post.log_odds[d * post.n_topics + best]) best = j;
    }
    out.topics[d] = static_cast<int>(best);
  }
  return out;
}

Labeling label(const CorexModel& model, const DocTermMatrix& matrix) {
  return label_from_posterior(posterior(model, matrix));
}

std::vector<std::string> top_words(const CorexModel& model, size_t topic, size_t k) {
  if (topic >= model.n_topics()) {
    throw ConfigError(fmt::format("topic {} out of range (n_topics = {})", topic, model.n_topics()));
  }
  if (k == 0) throw ConfigError("top_words: k must be >= 1");
  const size_t v = model.n_words();
  const size_t m = model.n_topics();
  const auto& present = model.soft_counts().present;
  auto score = [&](size_t j, size_t i) {
    return positively_associated(model, j, i) ? model.alpha(j, i) * model.mi(j, i) : 0.0;
  };
  std::vector<uint32_t> owned, others;
  for (size_t i = 0; i < v; ++i) {
    if (!(score(topic, i) > 0)) continue;
    // Smoothing gives never-seen (forced) words a sliver of MI; skip them.
    if (!present.empty() && present[(topic * v + i) * 2] + present[(topic * v + i) * 2 + 1] <= 0) {
      continue;
    }
    size_t best = 0;
    for (size_t j = 1; j < m; ++j) {
      if (score(j, i) > score(best, i)) best = j;
    }
    (best == topic ? owned : others).push_back(static_cast<uint32_t>(i));
  }
  auto by_mi = [&](uint32_t a, uint32_t b) {
    const double ma = score(topic, a), mb = score(topic, b);
    return ma != mb ? ma > mb : a < b;
  };
  std::sort(owned.begin(), owned.end(), by_mi);
  std::sort(others.begin(), others.end(), by_mi);
  std::vector<std::string> out;
  for (const auto* list : {&owned, &others}) {
    for (uint32_t i : *list) {
      if (out.size() == k) return out;
      out.push_back(model.words()[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
//
//   corextm-model 1
//   n_topics <m>
//   n_words <V>
//   vocab_fingerprint <16 hex digits>
//   anchor_strength <real>
//   smoothing <real>
//   n_samples <real>
//   anchors <count>            then <count> lines "<topic> <word-column>"
//   words                      then V lines, one word each, column order
//   log_prior                  then m lines, log p(y_j = 1)
//   alpha                      then m lines of V values
//   log_marginals              then m*V lines "<y0x0> <y0x1> <y1x0> <y1x1>"
//   mi                         then m lines of V values
//   mass                       then m lines "<y0> <y1>"
//   present                    then m*V lines "<y0> <y1>"
//   tc_history <n>             then one line of n values (may be empty)
//   end
//
// Reals use the shortest representation that round-trips exactly.

std::string CorexModel::serialize() const {
  const size_t m = n_topics_;
  const size_t v = words_.size();
  std::string s;
  s.reserve(64 * m * v + 1024);
  auto num = [&](double x) { put_double(&s, x); };
  s += "corextm-model 1\n";
  s += fmt::format("n_topics {}\nn_words {}\nvocab_fingerprint {:016x}\n", m, v, vocab_fingerprint_);
  s += "anchor_strength ";
  num(anchor_strength_);
  s += "\nsmoothing ";
  num(smoothing_);
  s += "\nn_samples ";
  num(counts_.n_samples);
  s += fmt::format("\nanchors {}\n", anchors_.size());
  for (const auto& [t, w] : anchors_) s += fmt::format("{} {}\n", t, w);
  s += "words\n";
  for (const auto& w : words_) {
    s += w;
    s += '\n';
  }
  auto rows = [&](const char* name, const std::vector<double>& data, size_t n_rows, size_t width) {
    s += name;
    s += '\n';
    for (size_t r = 0; r < n_rows; ++r) {
      for (size_t c = 0; c < width; ++c) {
        if (c) s += ' ';
        num(data[r * width + c]);
      }
      s += '\n';
    }
  };
  rows("log_prior", log_prior_, m, 1);
  rows("alpha", alpha_, m, v);
  rows("log_marginals", log_marginals_, m * v, 4);
  rows("mi", mi_, m, v);
  rows("mass", counts_.mass, m, 2);
  rows("present", counts_.present, m * v, 2);
  s += fmt::format("tc_history {}\n", tc_history_.size());
  for (size_t i = 0; i < tc_history_.size(); ++i) {
    if (i) s += ' ';
    num(tc_history_[i]);
  }
  s += "\nend\n";
  return s;
}

void CorexModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << serialize();
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::string_view line() {
    if (pos_ >= text_.size()) throw IoError("model file is truncated");
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view l = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return l;
  }

  std::string_view keyed(std::string_view key) {
    std::string_view l = line();
    if (l.substr(0, key.size()) != key || (l.size() > key.size() && l[key.size()] != ' ')) {
      throw IoError(fmt::format("model file line {}: expected '{}'", line_no_, key));
    }
    return l.size() > key.size() ? l.substr(key.size() + 1) : std::string_view{};
  }

  template <typename T>
  T keyed_value(std::string_view key, int base = 10) {
    return parse<T>(keyed(key), base);
  }

  template <typename T>
  T parse(std::string_view token, int base = 10) {
    T value{};
    std::from_chars_result r{};
    if constexpr (std::is_floating_point_v<T>) {
      r = std::from_chars(token.data(), token.data() + token.size(), value);
    } else {
      r = std::from_chars(token.data(), token.data() + token.size(), value, base);
    }
    if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
      throw IoError(fmt::format("model file line {}: bad number '{}'", line_no_, token));
    }
    return value;
  }

  std::vector<double> reals(size_t expected) {
    std::vector<double> out;
    std::string_view l = line();
    size_t p = 0;
    while (p < l.size()) {
      size_t q = l.find(' ', p);
      if (q == std::string_view::npos) q = l.size();
      if (q > p) out.push_back(parse<double>(l.substr(p, q - p)));
      p = q + 1;
    }
    if (out.size() != expected) {
      throw IoError(fmt::format("model file line {}: expected {} values, found {}", line_no_,
                                expected, out.size()));
    }
    return out;
  }

  void block(std::string_view name, std::vector<double>* data, size_t n_rows, size_t width) {
    keyed(name);
    data->clear();
    data->reserve(n_rows * width);
    for (size_t r = 0; r < n_rows; ++r) {
      auto row = reals(width);
      data->insert(data->end(), row.begin(), row.end());
    }
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  size_t line_no_ = 0;
};

}  // namespace

CorexModel CorexModel::deserialize(std::string_view text) {
  Reader r(text);
  if (r.line() != "corextm-model 1") throw IoError("not a corextm-model v1 file");
  CorexModel model;
  ModelBuilder b(&model);
  const auto m = r.keyed_value<size_t>("n_topics");
  const auto v = r.keyed_value<size_t>("n_words");
  b.n_topics() = m;
  b.vocab_fingerprint() = r.keyed_value<uint64_t>("vocab_fingerprint", 16);
  b.anchor_strength() = r.keyed_value<double>("anchor_strength");
  b.smoothing() = r.keyed_value<double>("smoothing");
  const auto n_samples = r.keyed_value<double>("n_samples");
  const auto n_anchors = r.keyed_value<size_t>("anchors");
  for (size_t a = 0; a < n_anchors; ++a) {
    std::string_view l = r.line();
    const size_t sp = l.find(' ');
    if (sp == std::string_view::npos) throw IoError("malformed anchor line");
    const auto t = r.parse<uint32_t>(l.substr(0, sp));
    const auto w = r.parse<uint32_t>(l.substr(sp + 1));
    if (t >= m || w >= v) throw IoError("anchor out of range");
    b.anchors().emplace_back(t, w);
  }
  r.keyed("words");
  b.words().reserve(v);
  for (size_t i = 0; i < v; ++i) b.words().emplace_back(r.line());
  if (vocabulary_fingerprint(b.words()) != model.vocab_fingerprint()) {
    throw IoError("model vocabulary does not match its fingerprint");
  }
  r.block("log_prior", &b.log_prior(), m, 1);
  r.block("alpha", &b.alpha(), m, v);
  r.block("log_marginals", &b.log_marginals(), m * v, 4);
  r.block("mi", &b.mi(), m, v);
  auto& counts = b.counts();
  counts.n_topics = m;
  counts.n_words = v;
  counts.n_samples = n_samples;
  r.block("mass", &counts.mass, m, 2);
  r.block("present", &counts.present, m * v, 2);
  const auto n_hist = r.keyed_value<size_t>("tc_history");
  b.tc_history() = r.reals(n_hist);
  if (r.line() != "end") throw IoError("model file lacks 'end' marker");
  return model;
}

CorexModel CorexModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace corextm
