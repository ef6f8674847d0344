#ifndef COREXTM_PIPELINE_HPP_
#define COREXTM_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corextm/analytics.hpp"
#include "corextm/corex.hpp"
#include "corextm/corpus.hpp"
#include "corextm/preprocess.hpp"

namespace corextm {

enum class SeedMode { kExtractedOnly, kExtractedPlusCurated };

const char* seed_mode_name(SeedMode mode);
SeedMode parse_seed_mode(std::string_view text);

struct PipelineConfig {
  std::filesystem::path seeds_path;  // empty: built-in curated groups
  SeedSet curated_seeds = SeedSet::defaults();
  int n_topics = 20;
  int n_iter = 100;
  int top_k = 10;
  SeedMode seed_mode = SeedMode::kExtractedOnly;
  uint64_t rng_seed = 1;
  double anchor_strength = 2.0;
  TokenizerConfig tokenizer;
  DateRange window = default_study_window();
  AccountList officials = AccountList::defaults();
  int64_t official_min_df = 1;
  int64_t public_min_df = 3;
  int64_t max_vocab = 20000;
  std::vector<EventMarker> events = default_events();

  // Throws ConfigError on top_k < 1, n_topics < seed groups, and so on.
  void validate() const;
};

// One preprocessed corpus: tokens, vocabulary and its binary matrix.
struct TierInput {
  std::vector<TokenList> tokens;
  Vocabulary vocab;
  DocTermMatrix matrix;
};

TierInput prepare_tier(const std::vector<Microblog>& posts, const TokenizerConfig& tokenizer,
                       int64_t min_df, int64_t max_vocab, const std::vector<std::string>& forced);

struct TieredResult {
  TierInput official;
  TierInput public_tier;
  CorexModel official_model;
  CorexModel public_model;
  Labeling official_labels;
  Labeling public_labels;
  SeedSet extracted_seeds;  // top_k words per official topic
  SeedSet public_seeds;     // what actually anchored tier two
  std::vector<std::string> warnings;
};

// Group g = top_words(model, g, top_k).
SeedSet extract_seed_keywords(const CorexModel& model, int top_k, double anchor_strength);

// Official fit anchored on the curated seeds, keyword extraction, public fit
// anchored on the extracted keywords, labels for both corpora. Topic g of the
// public model corresponds to topic g of the official model.
TieredResult run_two_tier(const CorpusPartition& partition, const PipelineConfig& cfg);

nlohmann::json config_to_json(const PipelineConfig& cfg);

struct TcSummary {
  size_t iterations = 0;
  double first = 0;
  double last = 0;
  double max = 0;
};
TcSummary summarize_tc(const CorexModel& model);

// doc_id,topic,empty
std::string labels_csv(const std::vector<std::string>& doc_ids, const Labeling& labels);
// Inverse of labels_csv; returns (doc_ids, labeling).
std::pair<std::vector<std::string>, Labeling> parse_labels_csv(std::string_view text);

struct RunOutputs {
  std::vector<std::filesystem::path> files;
  nlohmann::json manifest;
};

// Writes models, vocabularies, label files, seeds, timelines, heatmap (CSV
// and SVG) and manifest.json under `out_dir`. `inputs` maps a role name to
// the file it was read from; their hashes go into the manifest.
RunOutputs write_run_artifacts(const TieredResult& result, const CorpusPartition& partition,
                               const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                               const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                               bool emit_csv = true, bool emit_svg = true,
                               bool emit_manifest = true);

// FNV-1a 64 of a file's bytes, hex.
std::string file_hash(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace corextm

#endif  // COREXTM_PIPELINE_HPP_
