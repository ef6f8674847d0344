#include <doctest.h>

#include <cmath>
#include <numeric>

#include "corextm/analytics.hpp"
#include "corextm/corex.hpp"
#include "corextm/corex_reference.hpp"
#include "planted.hpp"

using namespace corextm;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double d = 0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct Setup {
  testing::PlantedCorpus pc;
  Vocabulary vocab;
  DocTermMatrix matrix;
  SeedSet seeds;
  FitOptions opts;
};

Setup setup(size_t n_docs, int iters) {
  Setup s;
  s.pc = testing::make_planted({.n_docs = n_docs});
  s.pc.docs.push_back({});  // an empty row must be skipped by both
  s.vocab = build_vocabulary(s.pc.docs, 1, 1000);
  s.matrix = vectorize(s.pc.docs, s.vocab);
  s.seeds.groups = testing::planted_anchor_groups(s.pc);
  s.seeds.groups.pop_back();  // leave one topic unanchored
  s.opts.n_topics = 6;
  s.opts.n_iter = iters;
  s.opts.tc_tolerance = 0;  // same iteration count on both sides
  return s;
}

}  // namespace

TEST_CASE("parallel E-step and accumulation match the dense serial versions") {
  const Setup s = setup(300, 5);
  const CorexModel m = fit(s.matrix, s.vocab, s.seeds, s.opts);
  std::vector<uint32_t> docs;
  for (uint32_t d = 0; d < s.matrix.n_docs; ++d) {
    if (!s.matrix.rows[d].empty()) docs.push_back(d);
  }
  const auto fast = kernels::estep(m, s.matrix, docs);
  const auto slow = reference::estep(m, s.matrix, docs);
  CHECK(max_abs_diff(fast.q1, slow.q1) < 1e-9);
  CHECK(max_abs_diff(fast.log_z, slow.log_z) < 1e-9);
  CHECK(max_abs_diff(fast.log_odds, slow.log_odds) < 1e-9);
  CHECK(std::abs(fast.tc - slow.tc) < 1e-9);

  const auto a = kernels::accumulate(s.matrix, docs, fast.q1, m.n_topics());
  const auto b = reference::accumulate(s.matrix, docs, fast.q1, m.n_topics());
  CHECK(a.n_samples == b.n_samples);
  CHECK(max_abs_diff(a.mass, b.mass) < 1e-9);
  CHECK(max_abs_diff(a.present, b.present) < 1e-9);
}

TEST_CASE("parallel and reference fits agree") {
  const Setup s = setup(500, 40);
  const CorexModel fast = fit(s.matrix, s.vocab, s.seeds, s.opts);
  const CorexModel slow = reference::fit(s.matrix, s.vocab, s.seeds, s.opts);
  REQUIRE(fast.tc_history().size() == slow.tc_history().size());
  CHECK(max_abs_diff(fast.tc_history(), slow.tc_history()) < 1e-9);
  CHECK(max_abs_diff(fast.alpha_data(), slow.alpha_data()) < 1e-9);
  CHECK(max_abs_diff(fast.mi_data(), slow.mi_data()) < 1e-9);
  CHECK(fast.anchors() == slow.anchors());
  CHECK(label(fast, s.matrix).topics == label(slow, s.matrix).topics);
  for (size_t t = 0; t < fast.n_topics(); ++t) CHECK(top_words(fast, t) == top_words(slow, t));
}

TEST_CASE("parallel and reference heatmaps agree") {
  const auto pc = testing::make_planted({.n_docs = 600});
  std::vector<TokenList> off(pc.docs.begin(), pc.docs.begin() + 100);
  std::vector<TokenList> pub(pc.docs.begin() + 100, pc.docs.end());
  std::vector<int> lo(pc.truth.begin(), pc.truth.begin() + 100);
  std::vector<int> lp(pc.truth.begin() + 100, pc.truth.end());
  lp[0] = 6;  // topic 6 exists only on the public side; 5 is empty on both
  for (auto w : {TermWeighting::kTf, TermWeighting::kTfIdf}) {
    const auto a = similarity_heatmap(off, lo, pub, lp, 7, w);
    const auto b = reference::similarity_heatmap(off, lo, pub, lp, 7, w);
    CHECK(a.undefined == b.undefined);
    CHECK(max_abs_diff(a.values, b.values) < 1e-12);
  }
}
