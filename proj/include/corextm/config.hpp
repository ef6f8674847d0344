#ifndef COREXTM_CONFIG_HPP_
#define COREXTM_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "corextm/pipeline.hpp"

namespace corextm {

struct RunConfig {
  PipelineConfig pipeline;
  std::filesystem::path input;      // raw scraper dump
  std::filesystem::path official;   // partition files written by ingest
  std::filesystem::path public_posts;
  std::filesystem::path out_dir = "out";
  std::filesystem::path accounts_path;
  std::filesystem::path events_path;
  bool emit_csv = true;
  bool emit_svg = true;
  bool emit_manifest = true;
  int threads = 0;  // 0: OpenMP default
};

using KeyValues = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment, quotes around values are
// stripped, a repeated key is an error. Throws ConfigError naming the line.
KeyValues parse_key_values(std::string_view text);
KeyValues load_key_values(const std::filesystem::path& path);

// Applies recognised keys in a fixed order (paths before the settings they
// load). Unknown keys and unparsable values throw ConfigError. Referenced
// files (seeds, accounts, events, stopwords) are loaded here; relative paths
// resolve against `base_dir`.
void apply_key_values(RunConfig& cfg, const KeyValues& kv,
                      const std::filesystem::path& base_dir = {});

// Every recognised key with a one-line description, for --help and README.
const std::map<std::string, std::string>& config_keys();

}  // namespace corextm

#endif  // COREXTM_CONFIG_HPP_
