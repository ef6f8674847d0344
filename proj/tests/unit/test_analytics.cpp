#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <random>

#include "corextm/analytics.hpp"
#include "corextm/error.hpp"

using namespace corextm;

namespace {

Microblog at(const std::string& day, std::string id = "x") {
  return {std::move(id), *parse_timestamp(day), "u", "t", {}};
}

std::string fmt_day(int day) {
  return "2020-04-" + std::string(day < 10 ? "0" : "") + std::to_string(day);
}

// OLS slope written out longhand for the oracle.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("timeline: hand-counted spike") {
  std::vector<Microblog> docs = {at("2020-04-27 09:00"), at("2020-04-29 10:00"),
                                 at("2020-05-03 23:00"), at("2020-03-10"), at("2020-04-28")};
  std::vector<int> labels = {5, 5, 5, 2, 1};
  const auto s = topic_timeline(docs, labels, 5, Source::kOfficial, default_study_window());
  // 2020-02-24 (week holding March 1) through 2020-05-11.
  REQUIRE(s.buckets.size() == 12);
  CHECK(format_date(s.buckets.front().first) == "2020-02-24");
  CHECK(format_date(s.buckets.back().first) == "2020-05-11");
  for (const auto& [week, n] : s.buckets) {
    CHECK(n == (format_date(week) == "2020-04-27" ? 3u : 0u));
  }
  for (size_t i = 1; i < s.buckets.size(); ++i) CHECK(s.buckets[i - 1].first < s.buckets[i].first);
  // Week of 04-27 holds four labeled posts, three of them topic 5.
  for (size_t i = 0; i < s.buckets.size(); ++i) {
    if (format_date(s.buckets[i].first) == "2020-04-27") CHECK(s.normalized[i] == doctest::Approx(0.75));
  }
}

TEST_CASE("timeline: absent topic is all zeros; misaligned input is fatal") {
  const std::vector<Microblog> docs = {at("2020-04-01")};
  const auto s = topic_timeline(docs, {0}, 3, Source::kPublic, default_study_window());
  for (const auto& [w, n] : s.buckets) CHECK(n == 0);
  for (double v : s.normalized) CHECK(v == 0.0);
  CHECK_THROWS_AS(topic_timeline(docs, {0, 1}, 0, Source::kPublic, default_study_window()),
                  ConfigError);
}

TEST_CASE("timeline: normalised share is count over week total") {
  const std::vector<Microblog> docs = {at("2020-04-06"), at("2020-04-07"), at("2020-04-08"),
                                       at("2020-04-09")};
  const auto s = topic_timeline(docs, {1, 0, 0, 0}, 1, Source::kOfficial, default_study_window());
  for (size_t i = 0; i < s.buckets.size(); ++i) {
    if (format_date(s.buckets[i].first) == "2020-04-06") CHECK(s.normalized[i] == 0.25);
  }
}

TEST_CASE("timelines: topic counts sum to the weekly total") {
  std::mt19937 rng(4);
  std::vector<Microblog> docs;
  std::vector<int> labels;
  for (int i = 0; i < 500; ++i) {
    const int day = 1 + static_cast<int>(rng() % 28);
    docs.push_back(at(fmt_day(day)));
    labels.push_back(static_cast<int>(rng() % 6));
  }
  const auto all = topic_timelines(docs, labels, 6, Source::kPublic, default_study_window());
  size_t grand = 0;
  for (size_t w = 0; w < all[0].buckets.size(); ++w) {
    size_t sum = 0;
    double share = 0;
    for (const auto& s : all) {
      sum += s.buckets[w].second;
      share += s.normalized[w];
      CHECK(s.normalized[w] >= 0.0);
      CHECK(s.normalized[w] <= 1.0);
    }
    if (sum > 0) CHECK(share == doctest::Approx(1.0));
    grand += sum;
  }
  CHECK(grand == docs.size());
}

TEST_CASE("events: defaults and file loading") {
  const auto ev = default_events();
  REQUIRE(ev.size() == 5);
  for (const auto& e : ev) CHECK(default_study_window().contains(Timestamp(e.date)));
  const auto dir = std::filesystem::temp_directory_path() / "corextm_events";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.txt") << "# c\n2020-03-23,lockdown announced\n\n";
    std::ofstream(dir / "out.txt") << "2021-01-01,later\n";
    std::ofstream(dir / "bad.txt") << "yesterday,oops\n";
  }
  const auto loaded = load_events(dir / "ok.txt", default_study_window());
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].label == "lockdown announced");
  CHECK_THROWS_AS(load_events(dir / "out.txt", default_study_window()), ConfigError);
  CHECK_THROWS_AS(load_events(dir / "bad.txt", default_study_window()), ConfigError);
  CHECK_THROWS_AS(load_events(dir / "missing.txt", default_study_window()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sub-corpus cosine fixtures") {
  const TokenList ab = {"a", "b"}, ac = {"a", "c"}, xy = {"x", "y"};
  CHECK(std::abs(*subcorpus_similarity({&ab}, {&ac}, TermWeighting::kTf) - 0.5) < 1e-12);
  CHECK(std::abs(*subcorpus_similarity({&ab, &ac}, {&ac, &ab}) - 1.0) < 1e-12);
  CHECK(*subcorpus_similarity({&ab}, {&xy}) == 0.0);
  CHECK_FALSE(subcorpus_similarity({}, {&ab}).has_value());
  const TokenList none;
  CHECK_FALSE(subcorpus_similarity({&none}, {&ab}).has_value());
}

TEST_CASE("sub-corpus cosine against a hand-built TF-IDF oracle") {
  // S_t = {"a b", "a"}, S_u = {"a c"}: N = 3, df(a)=3, df(b)=1, df(c)=1.
  const TokenList d1 = {"a", "b"}, d2 = {"a"}, d3 = {"a", "c"};
  const double ia = std::log(4.0 / 4.0) + 1, ib = std::log(4.0 / 2.0) + 1;
  const double t[3] = {2 * ia, ib, 0}, u[3] = {ia, 0, ib};
  const double dot = t[0] * u[0] + t[1] * u[1] + t[2] * u[2];
  const double nt = std::sqrt(t[0] * t[0] + t[1] * t[1]), nu = std::sqrt(u[0] * u[0] + u[2] * u[2]);
  CHECK(std::abs(*subcorpus_similarity({&d1, &d2}, {&d3}) - dot / (nt * nu)) < 1e-12);
}

TEST_CASE("heatmap: identical corpora give a symmetric unit-diagonal matrix") {
  std::vector<TokenList> docs = {{"a", "b"}, {"a", "c"}, {"d"}, {"d", "e"}, {"b", "e"}};
  std::vector<int> labels = {0, 0, 1, 1, 2};
  const auto h = similarity_heatmap(docs, labels, docs, labels, 4);
  for (size_t t = 0; t < 3; ++t) {
    CHECK(std::abs(h.at(t, t) - 1.0) < 1e-12);
    for (size_t u = 0; u < 3; ++u) CHECK(std::abs(h.at(t, u) - h.at(u, t)) < 1e-12);
  }
  CHECK(h.is_undefined(3, 3));
  CHECK(h.at(3, 0) == 0.0);
  for (double v : h.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("heatmap is invariant under document reordering") {
  std::mt19937 rng(8);
  std::vector<TokenList> off, pub;
  std::vector<int> lo, lp;
  for (int i = 0; i < 80; ++i) {
    TokenList t;
    for (int k = 0; k < 4; ++k) t.push_back("w" + std::to_string(rng() % 15));
    (i % 2 ? off : pub).push_back(t);
    (i % 2 ? lo : lp).push_back(static_cast<int>(rng() % 3));
  }
  const auto a = similarity_heatmap(off, lo, pub, lp, 3);
  std::vector<size_t> perm(off.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<TokenList> off2;
  std::vector<int> lo2;
  for (size_t p : perm) {
    off2.push_back(off[p]);
    lo2.push_back(lo[p]);
  }
  const auto b = similarity_heatmap(off2, lo2, pub, lp, 3);
  for (size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-12);
}

TEST_CASE("heatmap rejects out-of-range labels") {
  std::vector<TokenList> docs = {{"a"}};
  CHECK_THROWS_AS(similarity_heatmap(docs, {3}, docs, {0}, 3), ConfigError);
  CHECK_THROWS_AS(similarity_heatmap(docs, {0, 1}, docs, {0}, 3), ConfigError);
}

TEST_CASE("power-law slope oracles") {
  std::vector<size_t> exact;
  for (int r = 1; r <= 40; ++r) exact.push_back(static_cast<size_t>(std::lround(1000.0 / r)));
  // Rounding to integers moves the points slightly; compare to the OLS oracle
  // on the same integers, and to -1 within the rounding error.
  std::vector<double> x, y;
  for (size_t i = 0; i < exact.size(); ++i) {
    x.push_back(std::log(static_cast<double>(i + 1)));
    y.push_back(std::log(static_cast<double>(exact[i])));
  }
  CHECK(std::abs(power_law_slope(exact) - ols_slope(x, y)) < 1e-12);
  CHECK(std::abs(power_law_slope({1000, 500, 250, 125}) - ols_slope(
      {0, std::log(2.0), std::log(3.0), std::log(4.0)},
      {std::log(1000.0), std::log(500.0), std::log(250.0), std::log(125.0)})) < 1e-12);
  CHECK(power_law_slope({100, 25, 11}) == doctest::Approx(-2.0).epsilon(0.025));
  CHECK(std::abs(power_law_slope({7, 7, 7, 7})) < 1e-12);
  CHECK_THROWS_AS(power_law_slope({5, 3}), ConfigError);
}

TEST_CASE("power-law slope is exactly -1 on lcm(1..40)/r counts") {
  size_t l = 1;
  for (size_t r = 2; r <= 40; ++r) l = std::lcm(l, r);
  std::vector<size_t> counts;
  for (size_t r = 1; r <= 40; ++r) counts.push_back(l / r);
  CHECK(std::abs(power_law_slope(counts) + 1.0) < 1e-6);
  CHECK_THROWS_AS(power_law_slope({5, 3, 0, 0}), ConfigError);
}

TEST_CASE("power-law slope uses only the top 50 counts, in any input order") {
  std::vector<size_t> counts;
  for (int r = 1; r <= 50; ++r) counts.push_back(static_cast<size_t>(1000000 / (r * r)));
  const double top = power_law_slope(counts);
  for (int r = 0; r < 30; ++r) counts.push_back(1);
  std::reverse(counts.begin(), counts.end());
  CHECK(power_law_slope(counts) == doctest::Approx(top).epsilon(1e-12));
}

TEST_CASE("csv writers") {
  SimilarityMatrix m;
  m.rows = m.cols = 2;
  m.values = {1.0, 0.25, 0.0, 0.5};
  m.undefined = {0, 0, 1, 0};
  const std::string csv = heatmap_csv(m);
  CHECK(csv.rfind("official_topic,public_topic,similarity,undefined\n", 0) == 0);
  CHECK(csv.find("1,0,0,1\n") != std::string::npos);
  CHECK(csv.find("0,1,0.25,0\n") != std::string::npos);

  const std::vector<Microblog> docs = {at("2020-03-02")};
  const auto s = topic_timeline(docs, {0}, 0, Source::kOfficial, default_study_window());
  const std::string tl = timelines_csv({s});
  CHECK(tl.rfind("topic,source,week,count,normalized\n", 0) == 0);
  CHECK(tl.find("0,official,2020-03-02,1,1\n") != std::string::npos);
}
