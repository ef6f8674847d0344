// corextm: two-tier anchored topic modelling of official and public posts.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corextm/analytics.hpp"
#include "corextm/config.hpp"
#include "corextm/corex.hpp"
#include "corextm/corpus.hpp"
#include "corextm/error.hpp"
#include "corextm/pipeline.hpp"
#include "corextm/svg.hpp"

namespace fs = std::filesystem;
using namespace corextm;

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kInvariant = 3 };

// Every config key doubles as a --flag (underscores become dashes). Flags
// win over the file given with --config.
struct Settings {
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "key = value config file; flags override it")
        ->check(CLI::ExistingFile);
    for (const auto& [key, help] : config_keys()) {
      std::string name = "--" + key;
      for (auto& ch : name) {
        if (ch == '_') ch = '-';
      }
      if (key == "n_topics") name += ",--topics";
      if (key == "n_iter") name += ",--iters";
      if (key == "out_dir") name += ",-o,--out";
      options[key] = app->add_option(name, flags[key], help);
    }
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      const fs::path p(config_path);
      apply_key_values(cfg, load_key_values(p), p.parent_path());
    }
    KeyValues given;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) given[key] = flags.at(key);
    }
    apply_key_values(cfg, given);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    return cfg;
  }
};

std::vector<Microblog> read_posts(const fs::path& path, const char* role) {
  if (path.empty()) throw ConfigError(fmt::format("no {} file given", role));
  ParseResult r = parse_records(path, record_format_from_path(path));
  for (const auto& w : r.warnings) fmt::print(stderr, "warning: {}: {}\n", path.string(), w);
  if (r.skipped > 0) {
    fmt::print(stderr, "warning: {}: skipped {} malformed records\n", path.string(), r.skipped);
  }
  return std::move(r.records);
}

nlohmann::json stats_json(const std::vector<Microblog>& posts) {
  const CorpusStats st = corpus_stats(posts, 50);
  nlohmann::json j = nlohmann::json::parse(stats_to_json(st));
  std::vector<size_t> counts;
  for (const auto& [user, n] : st.top_users) counts.push_back(n);
  size_t positive = 0;
  for (size_t n : counts) positive += n > 0 ? 1 : 0;
  if (positive >= 3) {
    j["power_law_slope"] = power_law_slope(counts);
  } else {
    j["power_law_slope"] = nullptr;
  }
  return j;
}

int cmd_ingest(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("ingest needs --input");
  ParseResult parsed = parse_records(cfg.input, record_format_from_path(cfg.input));
  for (const auto& w : parsed.warnings) fmt::print(stderr, "warning: {}\n", w);
  if (parsed.records.empty()) fmt::print(stderr, "warning: '{}' holds no posts\n", cfg.input.string());
  const CorpusPartition part = partition(parsed.records, cfg.pipeline.officials, cfg.pipeline.window);

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", cfg.out_dir.string(), ec.message()));
  write_records_jsonl(cfg.out_dir / "official.jsonl", part.official);
  write_records_jsonl(cfg.out_dir / "public.jsonl", part.public_posts);

  std::vector<Microblog> kept = part.official;
  kept.insert(kept.end(), part.public_posts.begin(), part.public_posts.end());
  nlohmann::json j;
  j["input"] = cfg.input.string();
  j["parsed"] = parsed.records.size();
  j["skipped_malformed"] = parsed.skipped;
  j["partition"] = {{"official", part.official.size()},
                    {"public", part.public_posts.size()},
                    {"dropped", part.dropped},
                    {"dropped_out_of_window", part.dropped_out_of_window},
                    {"dropped_duplicate", part.dropped_duplicate},
                    {"dropped_unrelated", part.dropped_unrelated}};
  j["corpus"] = stats_json(kept);
  j["official"] = stats_json(part.official);
  j["public"] = stats_json(part.public_posts);
  write_text_file(cfg.out_dir / "stats.json", j.dump(2) + "\n");
  fmt::print("official={} public={} dropped={} skipped={}\n", part.official.size(),
             part.public_posts.size(), part.dropped, parsed.skipped);
  return kOk;
}

int cmd_stats(const RunConfig& cfg, const std::string& out_file) {
  fs::path path = cfg.input;
  if (path.empty()) path = cfg.official;
  const auto posts = read_posts(path, "input");
  const std::string text = stats_json(posts).dump(2) + "\n";
  if (out_file.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_file, text);
  }
  return kOk;
}

CorpusPartition load_partition(const RunConfig& cfg) {
  if (!cfg.official.empty() || !cfg.public_posts.empty()) {
    CorpusPartition part;
    part.official = read_posts(cfg.official, "official");
    part.public_posts = read_posts(cfg.public_posts, "public");
    return part;
  }
  const auto posts = read_posts(cfg.input, "input");
  return partition(posts, cfg.pipeline.officials, cfg.pipeline.window);
}

int cmd_run(const RunConfig& cfg) {
  const CorpusPartition part = load_partition(cfg);
  const TieredResult r = run_two_tier(part, cfg.pipeline);
  for (const auto& w : r.warnings) fmt::print(stderr, "warning: {}\n", w);

  std::vector<std::pair<std::string, fs::path>> inputs;
  if (!cfg.input.empty() && cfg.official.empty()) inputs.emplace_back("input", cfg.input);
  if (!cfg.official.empty()) inputs.emplace_back("official", cfg.official);
  if (!cfg.public_posts.empty()) inputs.emplace_back("public", cfg.public_posts);
  if (!cfg.pipeline.seeds_path.empty()) inputs.emplace_back("seeds", cfg.pipeline.seeds_path);
  if (!cfg.accounts_path.empty()) inputs.emplace_back("accounts", cfg.accounts_path);
  if (!cfg.events_path.empty()) inputs.emplace_back("events", cfg.events_path);

  const RunOutputs out = write_run_artifacts(r, part, cfg.pipeline, cfg.out_dir, inputs,
                                             cfg.emit_csv, cfg.emit_svg, cfg.emit_manifest);
  fmt::print("official: {} posts, {} words, TC {:.4f} after {} iterations\n", part.official.size(),
             r.official.vocab.size(), tc_bound(r.official_model), r.official_model.tc_history().size());
  fmt::print("public:   {} posts, {} words, TC {:.4f} after {} iterations\n",
             part.public_posts.size(), r.public_tier.vocab.size(), tc_bound(r.public_model),
             r.public_model.tc_history().size());
  fmt::print("wrote {} files to {}\n", out.files.size(), cfg.out_dir.string());
  return kOk;
}

int cmd_label(const RunConfig& cfg, const std::string& model_path, const std::string& out_file) {
  const CorexModel model = CorexModel::load(model_path);
  fs::path path = cfg.input;
  if (path.empty()) path = cfg.public_posts;
  const auto posts = read_posts(path, "input");

  std::vector<std::string> anchor_words;
  for (const auto& [t, w] : model.anchors()) anchor_words.push_back(model.words()[w]);
  const TokenizerConfig tok = cfg.pipeline.tokenizer.exempting(anchor_words);
  std::vector<std::string> texts, ids;
  for (const auto& p : posts) {
    texts.push_back(p.text);
    ids.push_back(p.id);
  }
  const Vocabulary vocab(model.words(), std::vector<int64_t>(model.n_words(), 0));
  const DocTermMatrix matrix = vectorize(tokenize_all(texts, tok), vocab, ids);
  const Labeling lab = label(model, matrix);
  const std::string csv = labels_csv(ids, lab);
  if (out_file.empty()) {
    std::cout << csv;
  } else {
    write_text_file(out_file, csv);
  }
  return kOk;
}

struct LabeledCorpus {
  std::vector<Microblog> posts;
  std::vector<int> labels;
};

// Labels are matched to posts by id so the two files may be ordered differently.
LabeledCorpus load_labeled(const fs::path& posts_path, const fs::path& labels_path,
                           const char* role, int n_topics) {
  if (labels_path.empty()) throw ConfigError(fmt::format("no {} labels file given", role));
  LabeledCorpus c;
  c.posts = read_posts(posts_path, role);
  auto [ids, lab] = parse_labels_csv(read_text_file(labels_path));
  std::map<std::string, int> by_id;
  for (size_t i = 0; i < ids.size(); ++i) by_id[ids[i]] = lab.topics[i];
  for (const auto& p : c.posts) {
    const auto it = by_id.find(p.id);
    if (it == by_id.end()) {
      throw ConfigError(fmt::format("{} post '{}' has no label in '{}'", role, p.id,
                                    labels_path.string()));
    }
    if (it->second < 0 || it->second >= n_topics) {
      throw ConfigError(fmt::format("{} post '{}' has topic {} outside [0, {})", role, p.id,
                                    it->second, n_topics));
    }
    c.labels.push_back(it->second);
  }
  return c;
}

int cmd_timeline(const RunConfig& cfg, const std::string& off_labels, const std::string& pub_labels) {
  const auto& p = cfg.pipeline;
  const auto off = load_labeled(cfg.official, off_labels, "official", p.n_topics);
  const auto pub = load_labeled(cfg.public_posts, pub_labels, "public", p.n_topics);
  const auto off_tl = topic_timelines(off.posts, off.labels, p.n_topics, Source::kOfficial, p.window);
  const auto pub_tl = topic_timelines(pub.posts, pub.labels, p.n_topics, Source::kPublic, p.window);
  fs::create_directories(cfg.out_dir / "timelines");
  if (cfg.emit_csv) {
    std::vector<TimelineSeries> all = off_tl;
    all.insert(all.end(), pub_tl.begin(), pub_tl.end());
    write_text_file(cfg.out_dir / "timelines.csv", timelines_csv(all));
  }
  if (cfg.emit_svg) {
    for (int g = 0; g < p.n_topics; ++g) {
      for (bool normalized : {false, true}) {
        const auto chart = svg::timeline_chart(off_tl[g], pub_tl[g], p.events, normalized,
                                               std::to_string(g));
        write_text_file(cfg.out_dir / fmt::format("timelines/topic_{:02d}_{}.svg", g,
                                                  normalized ? "share" : "counts"),
                        svg::render_line_chart(chart));
      }
    }
  }
  return kOk;
}

int cmd_similarity(const RunConfig& cfg, const std::string& off_labels,
                   const std::string& pub_labels, bool plain_tf) {
  const auto& p = cfg.pipeline;
  const auto off = load_labeled(cfg.official, off_labels, "official", p.n_topics);
  const auto pub = load_labeled(cfg.public_posts, pub_labels, "public", p.n_topics);
  auto tokens = [&](const std::vector<Microblog>& posts) {
    std::vector<std::string> texts;
    for (const auto& m : posts) texts.push_back(m.text);
    return tokenize_all(texts, p.tokenizer);
  };
  const auto m = static_cast<size_t>(p.n_topics);
  const SimilarityMatrix heat =
      similarity_heatmap(tokens(off.posts), off.labels, tokens(pub.posts), pub.labels, m,
                         plain_tf ? TermWeighting::kTf : TermWeighting::kTfIdf);
  fs::create_directories(cfg.out_dir);
  if (cfg.emit_csv) write_text_file(cfg.out_dir / "heatmap.csv", heatmap_csv(heat));
  if (cfg.emit_svg) {
    std::vector<std::string> names;
    for (size_t g = 0; g < m; ++g) names.push_back(std::to_string(g));
    write_text_file(cfg.out_dir / "heatmap.svg",
                    svg::render_heatmap(heat, "Topic similarity (official vs public)", names, names));
  }
  double diag = 0, off_diag = 0;
  size_t n_diag = 0, n_off = 0;
  for (size_t r = 0; r < m; ++r) {
    for (size_t c = 0; c < m; ++c) {
      if (heat.is_undefined(r, c)) continue;
      (r == c ? diag : off_diag) += heat.at(r, c);
      ++(r == c ? n_diag : n_off);
    }
  }
  fmt::print("mean diagonal {:.4f} ({} cells), mean off-diagonal {:.4f} ({} cells)\n",
             n_diag ? diag / n_diag : 0.0, n_diag, n_off ? off_diag / n_off : 0.0, n_off);
  return kOk;
}

int cmd_report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  const auto& c = manifest.at("config");
  fmt::print("# Run report\n\n");
  fmt::print("- created: {}\n", manifest.at("created_utc").get<std::string>());
  fmt::print("- topics: {}, iterations: {}, top_k: {}, seed mode: {}, rng_seed: {}\n",
             c.at("n_topics").get<int>(), c.at("n_iter").get<int>(), c.at("top_k").get<int>(),
             c.at("seed_mode").get<std::string>(), manifest.at("rng_seed").get<uint64_t>());
  const auto& counts = manifest.at("counts");
  fmt::print("- posts: {} official, {} public\n", counts.at("official_posts").get<size_t>(),
             counts.at("public_posts").get<size_t>());
  for (const char* tier : {"official", "public"}) {
    const auto& tc = manifest.at("tc").at(tier);
    fmt::print("- {} TC: {:.4f} -> {:.4f} over {} iterations\n", tier, tc.at("first").get<double>(),
               tc.at("last").get<double>(), tc.at("iterations").get<size_t>());
  }
  fmt::print("\n## Extracted keywords\n\n");
  const auto& seeds = manifest.at("extracted_seeds");
  for (size_t g = 0; g < seeds.size(); ++g) {
    std::string words;
    for (const auto& w : seeds[g]) words += (words.empty() ? "" : ", ") + w.get<std::string>();
    fmt::print("{:2}. {}\n", g, words.empty() ? "(none)" : words);
  }
  if (fs::exists(dir / "heatmap.csv")) {
    const std::string csv = read_text_file(dir / "heatmap.csv");
    double diag = 0, off = 0;
    size_t nd = 0, no = 0;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      int r = 0, col = 0, undef = 0;
      double v = 0;
      if (std::sscanf(line.c_str(), "%d,%d,%lf,%d", &r, &col, &v, &undef) != 4 || undef) continue;
      (r == col ? diag : off) += v;
      ++(r == col ? nd : no);
    }
    fmt::print("\n## Similarity\n\nmean diagonal {:.4f}, mean off-diagonal {:.4f}\n",
               nd ? diag / nd : 0.0, no ? off / no : 0.0);
  }
  const auto& warnings = manifest.at("warnings");
  if (!warnings.empty()) {
    fmt::print("\n## Warnings\n\n");
    for (const auto& w : warnings) fmt::print("- {}\n", w.get<std::string>());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier anchored CorEx topic modelling of official and public microblog posts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "corextm 0.1.0");

  Settings s_ingest, s_stats, s_run, s_label, s_timeline, s_similarity;
  auto* ingest = app.add_subcommand("ingest", "split a raw dump into official/public partitions and write stats.json");
  s_ingest.attach(ingest);

  auto* stats = app.add_subcommand("stats", "corpus statistics of one post file as JSON");
  s_stats.attach(stats);
  std::string stats_out;
  stats->add_option("--stats-out", stats_out, "write the JSON here instead of stdout");

  auto* run = app.add_subcommand("run", "full two-tier pipeline: fit, extract, label, analyse");
  s_run.attach(run);

  auto* lab = app.add_subcommand("label", "label posts with a saved model");
  s_label.attach(lab);
  std::string model_path, labels_out;
  lab->add_option("--model", model_path, "model file written by run")->required()->check(CLI::ExistingFile);
  lab->add_option("--labels-out", labels_out, "labels CSV path (default stdout)");

  auto* tl = app.add_subcommand("timeline", "weekly topic timelines from posts and label files");
  s_timeline.attach(tl);
  std::string tl_off, tl_pub;
  tl->add_option("--official-labels", tl_off, "labels CSV for the official posts")->required();
  tl->add_option("--public-labels", tl_pub, "labels CSV for the public posts")->required();

  auto* sim = app.add_subcommand("similarity", "official x public topic similarity heatmap");
  s_similarity.attach(sim);
  std::string sim_off, sim_pub;
  bool plain_tf = false;
  sim->add_option("--official-labels", sim_off, "labels CSV for the official posts")->required();
  sim->add_option("--public-labels", sim_pub, "labels CSV for the public posts")->required();
  sim->add_flag("--tf", plain_tf, "plain term frequency instead of TF-IDF");

  auto* report = app.add_subcommand("report", "summarise a run directory");
  std::string run_dir;
  report->add_option("run_dir", run_dir, "directory written by run")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*ingest) return cmd_ingest(s_ingest.resolve());
    if (*stats) return cmd_stats(s_stats.resolve(), stats_out);
    if (*run) return cmd_run(s_run.resolve());
    if (*lab) return cmd_label(s_label.resolve(), model_path, labels_out);
    if (*tl) return cmd_timeline(s_timeline.resolve(), tl_off, tl_pub);
    if (*sim) return cmd_similarity(s_similarity.resolve(), sim_off, sim_pub, plain_tf);
    if (*report) return cmd_report(run_dir);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const InvariantError& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kInvariant;
  } catch (const nlohmann::json::exception& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kInvariant;
  }
  return kOk;
}
