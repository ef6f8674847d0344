#include "corextm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "corextm/error.hpp"
#include "corextm/svg.hpp"

namespace corextm {

const char* seed_mode_name(SeedMode mode) {
  return mode == SeedMode::kExtractedOnly ? "extracted_only" : "extracted_plus_curated";
}

SeedMode parse_seed_mode(std::string_view text) {
  if (text == "extracted_only") return SeedMode::kExtractedOnly;
  if (text == "extracted_plus_curated") return SeedMode::kExtractedPlusCurated;
  throw ConfigError(fmt::format(
      "seed_mode must be extracted_only or extracted_plus_curated, got '{}'", text));
}

void PipelineConfig::validate() const {
  if (top_k < 1) throw ConfigError(fmt::format("top_k must be >= 1, got {}", top_k));
  if (n_topics < 1) throw ConfigError(fmt::format("n_topics must be >= 1, got {}", n_topics));
  if (n_iter < 1) throw ConfigError(fmt::format("n_iter must be >= 1, got {}", n_iter));
  if (static_cast<size_t>(n_topics) < curated_seeds.groups.size()) {
    throw ConfigError(fmt::format("n_topics ({}) is smaller than the number of seed groups ({})",
                                  n_topics, curated_seeds.groups.size()));
  }
  if (!(anchor_strength >= 1.0)) {
    throw ConfigError(fmt::format("anchor_strength must be >= 1, got {}", anchor_strength));
  }
  if (official_min_df < 1 || public_min_df < 1) throw ConfigError("min_df must be >= 1");
  if (max_vocab < 1) throw ConfigError("max_vocab must be >= 1");
  if (window.end < window.start) throw ConfigError("window ends before it starts");
  if (officials.empty()) throw ConfigError("official account list is empty");
}

TierInput prepare_tier(const std::vector<Microblog>& posts, const TokenizerConfig& tokenizer,
                       int64_t min_df, int64_t max_vocab, const std::vector<std::string>& forced) {
  const TokenizerConfig tok = tokenizer.exempting(forced);
  std::vector<std::string> texts;
  std::vector<std::string> ids;
  texts.reserve(posts.size());
  ids.reserve(posts.size());
  for (const auto& p : posts) {
    texts.push_back(p.text);
    ids.push_back(p.id);
  }
  TierInput in;
  in.tokens = tokenize_all(texts, tok);
  in.vocab = build_vocabulary(in.tokens, min_df, max_vocab, forced);
  in.matrix = vectorize(in.tokens, in.vocab, std::move(ids));
  return in;
}

SeedSet extract_seed_keywords(const CorexModel& model, int top_k, double anchor_strength) {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  SeedSet s;
  s.anchor_strength = anchor_strength;
  for (size_t g = 0; g < model.n_topics(); ++g) {
    s.groups.push_back(top_words(model, g, static_cast<size_t>(top_k)));
  }
  return s;
}

TieredResult run_two_tier(const CorpusPartition& partition, const PipelineConfig& cfg) {
  cfg.validate();
  if (partition.official.empty()) throw ConfigError("official corpus is empty");
  if (partition.public_posts.empty()) throw ConfigError("public corpus is empty");

  TieredResult r;
  SeedSet curated = cfg.curated_seeds;
  curated.anchor_strength = cfg.anchor_strength;
  curated.normalize();

  FitOptions opts;
  opts.n_topics = cfg.n_topics;
  opts.n_iter = cfg.n_iter;
  opts.rng_seed = cfg.rng_seed;

  r.official = prepare_tier(partition.official, cfg.tokenizer, cfg.official_min_df, cfg.max_vocab,
                            curated.all_words());
  r.official_model = fit(r.official.matrix, r.official.vocab, curated, opts);
  r.extracted_seeds = extract_seed_keywords(r.official_model, cfg.top_k, cfg.anchor_strength);

  r.public_seeds = r.extracted_seeds;
  if (cfg.seed_mode == SeedMode::kExtractedPlusCurated) {
    for (size_t g = 0; g < curated.groups.size(); ++g) {
      auto& group = r.public_seeds.groups[g];
      group.insert(group.end(), curated.groups[g].begin(), curated.groups[g].end());
    }
    r.public_seeds.normalize();
  }
  for (size_t g = 0; g < r.public_seeds.groups.size(); ++g) {
    if (r.public_seeds.groups[g].empty()) {
      r.warnings.push_back(
          fmt::format("topic {} has no extracted keywords; it is unanchored in the public model", g));
    }
  }

  r.public_tier = prepare_tier(partition.public_posts, cfg.tokenizer, cfg.public_min_df,
                               cfg.max_vocab, r.public_seeds.all_words());
  r.public_model = fit(r.public_tier.matrix, r.public_tier.vocab, r.public_seeds, opts);

  r.official_labels = label(r.official_model, r.official.matrix);
  r.public_labels = label(r.public_model, r.public_tier.matrix);
  return r;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["seeds_path"] = cfg.seeds_path.string();
  j["curated_seeds"] = cfg.curated_seeds.groups;
  j["n_topics"] = cfg.n_topics;
  j["n_iter"] = cfg.n_iter;
  j["top_k"] = cfg.top_k;
  j["seed_mode"] = seed_mode_name(cfg.seed_mode);
  j["rng_seed"] = cfg.rng_seed;
  j["anchor_strength"] = cfg.anchor_strength;
  j["window"] = {{"start", format_date(cfg.window.start)}, {"end", format_date(cfg.window.end)}};
  j["officials"] = std::vector<std::string>(cfg.officials.handles().begin(),
                                            cfg.officials.handles().end());
  j["official_min_df"] = cfg.official_min_df;
  j["public_min_df"] = cfg.public_min_df;
  j["max_vocab"] = cfg.max_vocab;
  const auto& t = cfg.tokenizer;
  j["tokenizer"] = {{"lowercase", t.lowercase},
                    {"strip_urls", t.strip_urls},
                    {"strip_mentions", t.strip_mentions},
                    {"keep_hashtag_text", t.keep_hashtag_text},
                    {"min_token_len", t.min_token_len},
                    {"n_stopwords", t.stopwords.size()}};
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : cfg.events) events.push_back({{"date", format_date(e.date)}, {"label", e.label}});
  j["events"] = events;
  return j;
}

TcSummary summarize_tc(const CorexModel& model) {
  TcSummary s;
  const auto& h = model.tc_history();
  s.iterations = h.size();
  if (h.empty()) return s;
  s.first = h.front();
  s.last = h.back();
  s.max = *std::max_element(h.begin(), h.end());
  return s;
}

std::string labels_csv(const std::vector<std::string>& doc_ids, const Labeling& labels) {
  if (doc_ids.size() != labels.topics.size()) {
    throw InvariantError("labels_csv: ids and labels differ in length");
  }
  std::string out = "doc_id,topic,empty\n";
  for (size_t d = 0; d < doc_ids.size(); ++d) {
    std::string id = doc_ids[d];
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : id) {
        if (c == '"') q += '"';
        q += c;
      }
      id = q + "\"";
    }
    out += fmt::format("{},{},{}\n", id, labels.topics[d], labels.empty[d] ? 1 : 0);
  }
  return out;
}

std::pair<std::vector<std::string>, Labeling> parse_labels_csv(std::string_view text) {
  std::vector<std::string> ids;
  Labeling lab;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header) {
      header = false;
      if (line.rfind("doc_id,", 0) == 0) continue;
    }
    if (line.empty()) continue;
    // Topic and flag never contain commas, so split from the right.
    const size_t c2 = line.rfind(',');
    const size_t c1 = (c2 == std::string::npos || c2 == 0) ? std::string::npos : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) throw IoError(fmt::format("labels line {}: malformed", line_no));
    std::string id = line.substr(0, c1);
    if (id.size() >= 2 && id.front() == '"' && id.back() == '"') {
      std::string u;
      for (size_t i = 1; i + 1 < id.size(); ++i) {
        if (id[i] == '"' && i + 2 < id.size() && id[i + 1] == '"') ++i;
        u += id[i];
      }
      id = u;
    }
    try {
      lab.topics.push_back(std::stoi(line.substr(c1 + 1, c2 - c1 - 1)));
      lab.empty.push_back(static_cast<uint8_t>(std::stoi(line.substr(c2 + 1)) != 0));
    } catch (const std::exception&) {
      throw IoError(fmt::format("labels line {}: malformed", line_no));
    }
    ids.push_back(std::move(id));
  }
  return {std::move(ids), std::move(lab)};
}

std::string file_hash(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string topic_name(const SeedSet& seeds, size_t g) {
  if (g < seeds.groups.size() && !seeds.groups[g].empty()) {
    return fmt::format("{} {}", g, seeds.groups[g].front());
  }
  return std::to_string(g);
}

std::string top_words_csv(const CorexModel& official, const CorexModel& pub, int k) {
  std::string out = "model,topic,rank,word,mi\n";
  auto emit = [&](const char* name, const CorexModel& m) {
    for (size_t g = 0; g < m.n_topics(); ++g) {
      const auto words = top_words(m, g, static_cast<size_t>(k));
      for (size_t r = 0; r < words.size(); ++r) {
        const auto col = std::find(m.words().begin(), m.words().end(), words[r]) - m.words().begin();
        out += fmt::format("{},{},{},{},{:.17g}\n", name, g, r + 1, words[r],
                           m.mi(g, static_cast<size_t>(col)));
      }
    }
  };
  emit("official", official);
  emit("public", pub);
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  std::string s = format_timestamp(now);
  s[10] = 'T';
  return s + "Z";
}

}  // namespace

RunOutputs write_run_artifacts(const TieredResult& r, const CorpusPartition& partition,
                               const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                               const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                               bool emit_csv, bool emit_svg, bool emit_manifest) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  RunOutputs out;
  auto put = [&](const fs::path& rel, std::string_view content) {
    fs::create_directories((out_dir / rel).parent_path(), ec);
    write_text_file(out_dir / rel, content);
    out.files.push_back(rel);
  };

  put("official_model.txt", r.official_model.serialize());
  put("public_model.txt", r.public_model.serialize());
  r.official.vocab.save(out_dir / "official_vocab.tsv");
  out.files.emplace_back("official_vocab.tsv");
  r.public_tier.vocab.save(out_dir / "public_vocab.tsv");
  out.files.emplace_back("public_vocab.tsv");
  put("official_labels.csv", labels_csv(r.official.matrix.doc_ids, r.official_labels));
  put("public_labels.csv", labels_csv(r.public_tier.matrix.doc_ids, r.public_labels));
  put("extracted_seeds.txt", r.extracted_seeds.to_text());
  put("public_seeds.txt", r.public_seeds.to_text());
  put("top_words.csv", top_words_csv(r.official_model, r.public_model, cfg.top_k));

  const auto m = static_cast<size_t>(cfg.n_topics);
  const auto off_tl = topic_timelines(partition.official, r.official_labels.topics, cfg.n_topics,
                                      Source::kOfficial, cfg.window);
  const auto pub_tl = topic_timelines(partition.public_posts, r.public_labels.topics, cfg.n_topics,
                                      Source::kPublic, cfg.window);
  const SimilarityMatrix heat = similarity_heatmap(r.official.tokens, r.official_labels.topics,
                                                   r.public_tier.tokens, r.public_labels.topics, m);
  if (emit_csv) {
    std::vector<TimelineSeries> all = off_tl;
    all.insert(all.end(), pub_tl.begin(), pub_tl.end());
    put("timelines.csv", timelines_csv(all));
    put("heatmap.csv", heatmap_csv(heat));
  }
  if (emit_svg) {
    for (size_t g = 0; g < m; ++g) {
      const std::string name = topic_name(r.extracted_seeds, g);
      for (bool normalized : {false, true}) {
        const auto chart = svg::timeline_chart(off_tl[g], pub_tl[g], cfg.events, normalized, name);
        put(fmt::format("timelines/topic_{:02d}_{}.svg", g, normalized ? "share" : "counts"),
            svg::render_line_chart(chart));
      }
    }
    std::vector<std::string> rows, cols;
    for (size_t g = 0; g < m; ++g) {
      rows.push_back(topic_name(r.extracted_seeds, g));
      cols.push_back(topic_name(r.public_seeds, g));
    }
    put("heatmap.svg", svg::render_heatmap(heat, "Topic similarity (official vs public)", rows, cols));
  }

  nlohmann::json& j = out.manifest;
  j["tool"] = "corextm";
  j["created_utc"] = utc_now();
  j["config"] = config_to_json(cfg);
  j["rng_seed"] = cfg.rng_seed;
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& [role, path] : inputs) {
    hashes[role] = {{"path", path.string()}, {"fnv1a64", file_hash(path)}};
  }
  j["inputs"] = hashes;
  j["counts"] = {{"official_posts", partition.official.size()},
                 {"public_posts", partition.public_posts.size()},
                 {"dropped", partition.dropped},
                 {"official_vocab", r.official.vocab.size()},
                 {"public_vocab", r.public_tier.vocab.size()},
                 {"official_empty_rows",
                  std::count(r.official_labels.empty.begin(), r.official_labels.empty.end(), 1)},
                 {"public_empty_rows",
                  std::count(r.public_labels.empty.begin(), r.public_labels.empty.end(), 1)}};
  j["extracted_seeds"] = r.extracted_seeds.groups;
  j["public_seeds"] = r.public_seeds.groups;
  auto tc = [](const CorexModel& model) {
    const TcSummary s = summarize_tc(model);
    return nlohmann::json{{"iterations", s.iterations}, {"first", s.first}, {"last", s.last},
                          {"max", s.max}};
  };
  j["tc"] = {{"official", tc(r.official_model)}, {"public", tc(r.public_model)}};
  j["warnings"] = r.warnings;
  std::vector<std::string> names;
  for (const auto& f : out.files) names.push_back(f.generic_string());
  names.emplace_back("manifest.json");
  j["outputs"] = names;
  if (emit_manifest) {
    write_text_file(out_dir / "manifest.json", j.dump(2) + "\n");
    out.files.emplace_back("manifest.json");
  }
  return out;
}

}  // namespace corextm
