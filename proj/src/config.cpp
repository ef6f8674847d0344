#include "corextm/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "corextm/error.hpp"

namespace corextm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || p != end) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not a valid number", key, value));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(fmt::format("config key '{}': '{}' is not a boolean", key, value));
}

Date parse_day(const std::string& key, const std::string& value) {
  const auto d = parse_date(value);
  if (!d) throw ConfigError(fmt::format("config key '{}': '{}' is not a YYYY-MM-DD date", key, value));
  return *d;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) return base / p;
  return p;
}

void require_file(const std::string& key, const std::filesystem::path& p) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) {
    throw ConfigError(fmt::format("config key '{}': file '{}' does not exist", key, p.string()));
  }
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ConfigError(fmt::format("config line {}: empty key", line_no));
    if (!kv.emplace(key, std::string(value)).second) {
      throw ConfigError(fmt::format("config line {}: key '{}' given twice", line_no, key));
    }
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> keys = {
      {"input", "raw post dump (.jsonl or .csv) to ingest"},
      {"official", "official partition file (.jsonl or .csv)"},
      {"public", "public partition file (.jsonl or .csv)"},
      {"out_dir", "output directory"},
      {"seeds", "curated seed-word file, one comma-separated group per line"},
      {"accounts", "official account list, one handle per line"},
      {"events", "event markers, 'YYYY-MM-DD,label' per line"},
      {"stopwords_file", "replacement stopword list, one word per line"},
      {"n_topics", "topics per model (default 20)"},
      {"n_iter", "fitting iterations (default 100)"},
      {"top_k", "keywords extracted per official topic (default 10)"},
      {"seed_mode", "extracted_only | extracted_plus_curated"},
      {"rng_seed", "random seed for both fits (default 1)"},
      {"anchor_strength", "weight of an anchor word in its topic, >= 1 (default 2)"},
      {"window_start", "first day of the study window (default 2020-03-01)"},
      {"window_end", "last day of the study window (default 2020-05-17)"},
      {"official_min_df", "minimum document frequency, official vocabulary (default 1)"},
      {"public_min_df", "minimum document frequency, public vocabulary (default 3)"},
      {"max_vocab", "vocabulary size cap (default 20000)"},
      {"lowercase", "fold case before tokenizing (default true)"},
      {"strip_urls", "remove URLs (default true)"},
      {"strip_mentions", "remove @handles (default true)"},
      {"keep_hashtag_text", "keep the word of a #hashtag (default true)"},
      {"min_token_len", "shortest kept token in characters (default 2)"},
      {"emit_csv", "write CSV analytics (default true)"},
      {"emit_svg", "write SVG figures (default true)"},
      {"emit_manifest", "write manifest.json (default true)"},
      {"threads", "OpenMP threads, 0 = runtime default"},
  };
  return keys;
}

void apply_key_values(RunConfig& cfg, const KeyValues& kv, const std::filesystem::path& base_dir) {
  for (const auto& [key, value] : kv) {
    if (!config_keys().count(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  PipelineConfig& p = cfg.pipeline;

  if (auto v = get("input")) cfg.input = resolve(base_dir, *v);
  if (auto v = get("official")) cfg.official = resolve(base_dir, *v);
  if (auto v = get("public")) cfg.public_posts = resolve(base_dir, *v);
  if (auto v = get("out_dir")) cfg.out_dir = resolve(base_dir, *v);

  if (auto v = get("n_topics")) p.n_topics = parse_number<int>("n_topics", *v);
  if (auto v = get("n_iter")) p.n_iter = parse_number<int>("n_iter", *v);
  if (auto v = get("top_k")) p.top_k = parse_number<int>("top_k", *v);
  if (auto v = get("seed_mode")) p.seed_mode = parse_seed_mode(*v);
  if (auto v = get("rng_seed")) p.rng_seed = parse_number<uint64_t>("rng_seed", *v);
  if (auto v = get("anchor_strength")) p.anchor_strength = parse_number<double>("anchor_strength", *v);
  if (auto v = get("official_min_df")) p.official_min_df = parse_number<int64_t>("official_min_df", *v);
  if (auto v = get("public_min_df")) p.public_min_df = parse_number<int64_t>("public_min_df", *v);
  if (auto v = get("max_vocab")) p.max_vocab = parse_number<int64_t>("max_vocab", *v);
  if (auto v = get("window_start")) p.window.start = parse_day("window_start", *v);
  if (auto v = get("window_end")) p.window.end = parse_day("window_end", *v);
  if (p.window.end < p.window.start) throw ConfigError("window_end is before window_start");

  TokenizerConfig& t = p.tokenizer;
  if (auto v = get("lowercase")) t.lowercase = parse_bool("lowercase", *v);
  if (auto v = get("strip_urls")) t.strip_urls = parse_bool("strip_urls", *v);
  if (auto v = get("strip_mentions")) t.strip_mentions = parse_bool("strip_mentions", *v);
  if (auto v = get("keep_hashtag_text")) t.keep_hashtag_text = parse_bool("keep_hashtag_text", *v);
  if (auto v = get("min_token_len")) t.min_token_len = parse_number<int>("min_token_len", *v);
  if (auto v = get("stopwords_file")) {
    const auto path = resolve(base_dir, *v);
    require_file("stopwords_file", path);
    std::ifstream in(path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
      const auto w = trim(line);
      if (!w.empty() && w.front() != '#') words.emplace(w);
    }
    t.stopwords = std::move(words);
  }

  if (auto v = get("seeds")) {
    const auto path = resolve(base_dir, *v);
    require_file("seeds", path);
    p.seeds_path = path;
    p.curated_seeds = SeedSet::load(path, p.anchor_strength);
  }
  p.curated_seeds.anchor_strength = p.anchor_strength;
  if (auto v = get("accounts")) {
    const auto path = resolve(base_dir, *v);
    require_file("accounts", path);
    cfg.accounts_path = path;
    p.officials = AccountList::load(path);
  }
  if (auto v = get("events")) {
    const auto path = resolve(base_dir, *v);
    require_file("events", path);
    cfg.events_path = path;
    p.events = load_events(path, p.window);
  }

  if (auto v = get("emit_csv")) cfg.emit_csv = parse_bool("emit_csv", *v);
  if (auto v = get("emit_svg")) cfg.emit_svg = parse_bool("emit_svg", *v);
  if (auto v = get("emit_manifest")) cfg.emit_manifest = parse_bool("emit_manifest", *v);
  if (auto v = get("threads")) {
    cfg.threads = parse_number<int>("threads", *v);
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  }
}

}  // namespace corextm
