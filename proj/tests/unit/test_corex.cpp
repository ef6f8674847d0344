#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "corextm/corex.hpp"
#include "corextm/error.hpp"
#include "planted.hpp"

using namespace corextm;

namespace {

// Direct summation over the four cells, written independently of the library.
double mi_oracle(const std::array<std::array<double, 2>, 2>& t) {
  const double n = t[0][0] + t[0][1] + t[1][0] + t[1][1];
  double px[2] = {(t[0][0] + t[0][1]) / n, (t[1][0] + t[1][1]) / n};
  double py[2] = {(t[0][0] + t[1][0]) / n, (t[0][1] + t[1][1]) / n};
  double s = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double p = t[x][y] / n;
      if (p > 0) s += p * std::log(p / (px[x] * py[y]));
    }
  }
  return s;
}

struct TwoCluster {
  std::vector<TokenList> docs;
  Vocabulary vocab;
  DocTermMatrix matrix;
};

// 100 docs: the first 50 draw from a1..a5, the rest from b1..b5.
TwoCluster two_cluster(uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.6);
  TwoCluster c;
  for (int d = 0; d < 100; ++d) {
    const char prefix = d < 50 ? 'a' : 'b';
    TokenList t;
    for (int k = 1; k <= 5; ++k) {
      if (coin(rng)) t.push_back(std::string(1, prefix) + std::to_string(k));
    }
    if (t.empty()) t.push_back(std::string(1, prefix) + "1");
    c.docs.push_back(t);
  }
  c.vocab = build_vocabulary(c.docs, 1, 100);
  c.matrix = vectorize(c.docs, c.vocab);
  return c;
}

SeedSet seeds_of(std::vector<std::vector<std::string>> groups, double strength = 2.0) {
  SeedSet s;
  s.groups = std::move(groups);
  s.anchor_strength = strength;
  return s;
}

FitOptions options(int m, int iters = 100, uint64_t seed = 1) {
  FitOptions o;
  o.n_topics = m;
  o.n_iter = iters;
  o.rng_seed = seed;
  return o;
}

bool all_start_with(const std::vector<std::string>& words, char c) {
  for (const auto& w : words) {
    if (w.empty() || w[0] != c) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("mutual information oracles") {
  CHECK(mutual_information({{{0.5, 0.0}, {0.0, 0.5}}}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(mutual_information({{{0.25, 0.25}, {0.25, 0.25}}})) < 1e-15);
  const std::array<std::array<double, 2>, 2> t = {{{0.4, 0.1}, {0.1, 0.4}}};
  CHECK(std::abs(mutual_information(t) - mi_oracle(t)) < 1e-12);
  CHECK(mutual_information(t) == doctest::Approx(0.192745).epsilon(1e-6));
  // Unnormalised counts give the same answer.
  CHECK(std::abs(mutual_information({{{40, 10}, {10, 40}}}) - mi_oracle(t)) < 1e-12);
}

TEST_CASE("mutual information is non-negative and zero on product tables") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::array<std::array<double, 2>, 2> t = {{{u(rng), u(rng)}, {u(rng), u(rng)}}};
    CHECK(mutual_information(t) >= 0.0);
    const double a = u(rng), b = u(rng);
    const std::array<std::array<double, 2>, 2> prod = {{{a * b, a * (1 - b)}, {(1 - a) * b, (1 - a) * (1 - b)}}};
    CHECK(std::abs(mutual_information(prod)) < 1e-12);
  }
}

TEST_CASE("mutual information rejects bad tables") {
  CHECK_THROWS_AS(mutual_information({{{0, 0}, {0, 0}}}), ConfigError);
  CHECK_THROWS_AS(mutual_information({{{-1, 1}, {1, 1}}}), ConfigError);
}

TEST_CASE("seed sets: defaults, parsing, dedupe") {
  const SeedSet d = SeedSet::defaults();
  REQUIRE(d.groups.size() == 13);
  CHECK(d.groups[8] == std::vector<std::string>{"smoking", "cigarettes", "smoke"});
  CHECK(d.groups[11].size() == 6);
  CHECK(d.anchor_strength == 2.0);
  const SeedSet p = SeedSet::parse("# comment\nA, b ,a\n\nc\n", 3.0);
  REQUIRE(p.groups.size() == 2);
  CHECK(p.groups[0] == std::vector<std::string>{"a", "b"});
  CHECK(p.groups[1] == std::vector<std::string>{"c"});
  CHECK(p.anchor_strength == 3.0);
  CHECK(SeedSet::parse(p.to_text(), 3.0).groups == p.groups);
  CHECK_THROWS_AS(SeedSet::parse("a", 0.5), ConfigError);
  CHECK_THROWS_AS(SeedSet::load("/nonexistent/seeds.txt"), ConfigError);
}

TEST_CASE("two-cluster corpus: anchored topics recover their clusters") {
  const auto c = two_cluster();
  const CorexModel m = fit(c.matrix, c.vocab, seeds_of({{"a1"}, {"b1"}}), options(2));
  CHECK(all_start_with(top_words(m, 0, 5), 'a'));
  CHECK(all_start_with(top_words(m, 1, 5), 'b'));
  CHECK(top_words(m, 0, 1) == std::vector<std::string>{"a1"});

  const Labeling lab = label(m, c.matrix);
  REQUIRE(lab.topics.size() == 100);
  for (int d = 0; d < 100; ++d) CHECK(lab.topics[d] == (d < 50 ? 0 : 1));

  const auto a_doc = vectorize({{"a2", "a3"}}, c.vocab);
  const auto post = posterior(m, a_doc);
  REQUIRE(post.n_docs == 1);
  CHECK(post.p(0, 0) > post.p(0, 1));
  CHECK(tc_bound(m) > 0.0);
}

TEST_CASE("anchors are pinned and weights stay in range") {
  const auto c = two_cluster();
  const CorexModel m = fit(c.matrix, c.vocab, seeds_of({{"a1", "a2"}, {"b1"}}, 3.5), options(3));
  const auto a1 = static_cast<size_t>(c.vocab.find("a1"));
  const auto a2 = static_cast<size_t>(c.vocab.find("a2"));
  const auto b1 = static_cast<size_t>(c.vocab.find("b1"));
  CHECK(m.alpha(0, a1) == 3.5);
  CHECK(m.alpha(0, a2) == 3.5);
  CHECK(m.alpha(1, b1) == 3.5);
  CHECK(m.anchors().size() == 3);
  for (size_t j = 0; j < m.n_topics(); ++j) {
    for (size_t i = 0; i < m.n_words(); ++i) {
      const bool anchored = (j == 0 && (i == a1 || i == a2)) || (j == 1 && i == b1);
      if (!anchored) {
        CHECK(m.alpha(j, i) >= 0.0);
        CHECK(m.alpha(j, i) <= 1.0);
      }
      for (int y = 0; y < 2; ++y) {
        const double total = std::exp(m.log_marginal(j, i, y, 0)) + std::exp(m.log_marginal(j, i, y, 1));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  CHECK(m.tc_history().size() <= 100);
}

TEST_CASE("empty rows get the prior and are flagged") {
  const auto c = two_cluster();
  const CorexModel m = fit(c.matrix, c.vocab, seeds_of({{"a1"}, {"b1"}}), options(2));
  const auto mat = vectorize({{}, {"zzz"}, {"a1"}}, c.vocab);
  const auto post = posterior(m, mat);
  REQUIRE(post.n_docs == 3);
  for (size_t d = 0; d < 2; ++d) {
    CHECK(post.empty[d] == 1);
    for (size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(post.p(d, j) - std::exp(m.log_prior(j))) < 1e-12);
    }
  }
  CHECK(post.empty[2] == 0);
  for (double p : post.prob) {
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  for (double lo : post.log_odds) CHECK(std::isfinite(lo));
  const Labeling lab = label_from_posterior(post);
  CHECK(lab.empty == std::vector<uint8_t>{1, 1, 0});
}

TEST_CASE("label ties go to the lowest topic index") {
  PosteriorTable t;
  t.n_docs = 2;
  t.n_topics = 3;
  t.prob = {0.5, 0.5, 0.2, 0.1, 0.7, 0.7};
  t.log_odds = {0.0, 0.0, -1.0, -2.0, 0.8, 0.8};
  t.log_z = std::vector<double>(6, 0.0);
  t.empty = {0, 0};
  const Labeling lab = label_from_posterior(t);
  CHECK(lab.topics == std::vector<int>{0, 1});
}

TEST_CASE("fit rejects bad configurations") {
  const auto c = two_cluster();
  CHECK_THROWS_AS(fit(c.matrix, c.vocab, seeds_of({{"nope"}}), options(2)), ConfigError);
  CHECK_THROWS_AS(fit(c.matrix, c.vocab, seeds_of({{"a1"}, {"b1"}, {"a2"}}), options(2)), ConfigError);
  const auto empty = vectorize({{}, {"zzz"}}, c.vocab);
  CHECK_THROWS_AS(fit(empty, c.vocab, SeedSet{}, options(2)), ConfigError);
  CHECK_THROWS_AS(tc_bound(CorexModel{}), ConfigError);
}

TEST_CASE("posterior refuses a matrix from another vocabulary") {
  const auto c = two_cluster();
  const CorexModel m = fit(c.matrix, c.vocab, seeds_of({{"a1"}}), options(2, 10));
  const Vocabulary other({"x", "y"}, {1, 1});
  CHECK_THROWS_AS(posterior(m, vectorize({{"x"}}, other)), ConfigError);
}

TEST_CASE("top_words truncates and validates") {
  const auto c = two_cluster();
  const CorexModel m = fit(c.matrix, c.vocab, seeds_of({{"a1"}, {"b1"}}), options(2));
  CHECK(top_words(m, 0, 50).size() <= c.vocab.size());
  CHECK(top_words(m, 0, 3).size() == 3);
  CHECK_THROWS_AS(top_words(m, 0, 0), ConfigError);
  CHECK_THROWS_AS(top_words(m, 2, 3), ConfigError);
  // Forced words that never occur are not keywords.
  const Vocabulary v = build_vocabulary(c.docs, 1, 100, {"ghost"});
  const CorexModel g = fit(vectorize(c.docs, v), v, seeds_of({{"a1"}, {"b1"}}), options(2));
  for (size_t t = 0; t < 2; ++t) {
    const auto words = top_words(g, t, 50);
    CHECK(std::find(words.begin(), words.end(), "ghost") == words.end());
  }
}

TEST_CASE("fits are bit-identical across runs and thread counts") {
  const auto pc = testing::make_planted({.n_docs = 400});
  const Vocabulary v = build_vocabulary(pc.docs, 1, 1000);
  const auto mat = vectorize(pc.docs, v);
  const SeedSet s = seeds_of(testing::planted_anchor_groups(pc));
  const CorexModel a = fit(mat, v, s, options(5, 50, 3));
  const CorexModel b = fit(mat, v, s, options(5, 50, 3));
  CHECK(a == b);
  CHECK(a.serialize() == b.serialize());
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const CorexModel serial = fit(mat, v, s, options(5, 50, 3));
  omp_set_num_threads(saved);
  CHECK(serial == a);
  const CorexModel other_seed = fit(mat, v, s, options(5, 50, 4));
  CHECK_FALSE(other_seed.alpha_data() == a.alpha_data());
}

TEST_CASE("stored MI matches brute force on the final soft counts") {
  std::vector<TokenList> docs;
  std::mt19937_64 rng(21);
  for (int d = 0; d < 20; ++d) {
    TokenList t;
    for (int k = 0; k < 6; ++k) {
      if (rng() % 3 == 0) t.push_back((d % 2 ? "p" : "q") + std::to_string(k));
    }
    if (rng() % 2) t.push_back("shared");
    docs.push_back(t);
  }
  const Vocabulary v = build_vocabulary(docs, 1, 100);
  const auto mat = vectorize(docs, v);
  const CorexModel m = fit(mat, v, seeds_of({{"p0"}}), options(3, 30));
  const SoftCounts& sc = m.soft_counts();
  const double s = m.smoothing();
  size_t fitted = 0;
  for (const auto& row : mat.rows) fitted += !row.empty();
  for (size_t j = 0; j < m.n_topics(); ++j) {
    CHECK(sc.mass[j * 2] + sc.mass[j * 2 + 1] == doctest::Approx(static_cast<double>(fitted)));
    for (size_t i = 0; i < m.n_words(); ++i) {
      const double c0 = sc.present[(j * v.size() + i) * 2];
      const double c1 = sc.present[(j * v.size() + i) * 2 + 1];
      size_t df = 0;
      for (const auto& row : mat.rows) df += std::binary_search(row.begin(), row.end(), i);
      CHECK(c0 + c1 == doctest::Approx(static_cast<double>(df)));
      const std::array<std::array<double, 2>, 2> t = {
          {{sc.mass[j * 2] - c0 + s, sc.mass[j * 2 + 1] - c1 + s}, {c0 + s, c1 + s}}};
      CHECK(std::abs(m.mi(j, i) - mi_oracle(t)) < 1e-9);
    }
  }
}

TEST_CASE("TC bound converges to the exact TC of the generating distribution") {
  // y ~ Bern(0.5); given y, ten conditionally independent words. All the
  // dependence runs through y, so the exact TC is sum H(X_i) - H(X).
  const double on = 0.7, off = 0.05;
  auto pw = [&](int cluster, int y) { return cluster == y ? on : off; };
  double h_joint = 0, h_marg = 0;
  for (int i = 0; i < 10; ++i) {
    const double p1 = 0.5 * pw(i < 5, 1) + 0.5 * pw(i < 5, 0);
    h_marg -= p1 * std::log(p1) + (1 - p1) * std::log(1 - p1);
  }
  for (int state = 0; state < 1024; ++state) {
    double p = 0;
    for (int y = 0; y < 2; ++y) {
      double q = 0.5;
      for (int i = 0; i < 10; ++i) {
        const double pi = pw(i < 5, y);
        q *= (state >> i) & 1 ? pi : 1 - pi;
      }
      p += q;
    }
    h_joint -= p * std::log(p);
  }
  const double exact_tc = h_marg - h_joint;

  std::mt19937_64 rng(2);
  std::vector<TokenList> docs;
  for (int d = 0; d < 20000; ++d) {
    const int y = static_cast<int>(rng() % 2);
    TokenList t;
    for (int i = 0; i < 10; ++i) {
      if (std::bernoulli_distribution(pw(i < 5, y))(rng)) t.push_back("v" + std::to_string(i));
    }
    docs.push_back(t);
  }
  const Vocabulary v = build_vocabulary(docs, 1, 100);
  const CorexModel m = fit(vectorize(docs, v), v, SeedSet{}, options(1, 200));
  const double tc = tc_bound(m);
  MESSAGE("exact TC " << exact_tc << ", fitted bound " << tc);
  // One latent factor is the true structure, so the in-sample bound lands on
  // the exact value up to sampling error (about 0.01 nats at this size).
  CHECK(std::abs(tc - exact_tc) < 0.03);
}

TEST_CASE("TC trajectory: window-5 average is non-decreasing") {
  const auto pc = testing::make_planted({});
  const Vocabulary v = build_vocabulary(pc.docs, 1, 1000);
  const CorexModel m = fit(vectorize(pc.docs, v), v, seeds_of(testing::planted_anchor_groups(pc)),
                           options(5));
  const auto& h = m.tc_history();
  REQUIRE(h.size() >= 5);
  double prev = -1e300;
  for (size_t i = 0; i + 5 <= h.size(); ++i) {
    double avg = 0;
    for (size_t k = i; k < i + 5; ++k) avg += h[k] / 5.0;
    CHECK(avg >= prev - 1e-6);
    prev = avg;
  }
}

TEST_CASE("independent columns carry almost no TC") {
  const auto docs = testing::make_independent(500, 50, 0.5, 13);
  const Vocabulary v = build_vocabulary(docs, 1, 100);
  const CorexModel m = fit(vectorize(docs, v), v, SeedSet{}, options(20));
  CHECK(tc_bound(m) < 0.05);
}

TEST_CASE("model serialisation round trips exactly") {
  const auto c = two_cluster();
  const CorexModel m = fit(c.matrix, c.vocab, seeds_of({{"a1"}, {"b1"}}), options(2));
  const auto path = std::filesystem::temp_directory_path() / "corextm_model_rt.txt";
  m.save(path);
  const CorexModel back = CorexModel::load(path);
  CHECK(back == m);
  CHECK(back.serialize() == m.serialize());
  CHECK(label(back, c.matrix).topics == label(m, c.matrix).topics);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(CorexModel::deserialize("not a model"), IoError);
  std::string text = m.serialize();
  CHECK_THROWS_AS(CorexModel::deserialize(text.substr(0, text.size() / 2)), IoError);
  CHECK_THROWS_AS(CorexModel::load("/nonexistent/model.txt"), IoError);
}
