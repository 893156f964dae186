#ifndef DHBB_CONFIG_H_
#define DHBB_CONFIG_H_

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/error.h"
#include "dhbb/rate_limiter.h"
#include "dhbb/types.h"

namespace dhbb {

enum class ConfigErrc { kUnknownKey, kInvalidValue, kIoError };
std::string_view to_string(ConfigErrc code);
using ConfigError = CodedError<ConfigErrc>;

// Raw scores per candidate channel. Strictly ordered by source quality.
struct ScoreTable {
  double sitelink = 1.0;
  double sitelink_base = 0.95;
  double redirect = 0.9;
  double search = 0.85;
  double acronym = 0.7;
  double fuzzy = 0.6;
  double variant_decrement = 0.05;  // per person-name variant rank
  double foreign_citizenship_penalty = 0.3;
};

struct LinkerConfig {
  // Both come from the bootstrap-config command; country filters are
  // skipped while brazil_qid is unset.
  std::optional<Qid> brazil_qid;
  std::vector<Qid> disambiguation_class_qids;

  double accept_threshold = 0.75;
  double ambiguity_margin = 0.1;
  int fuzzy_max_edits = 1;
  int fuzzy_min_token_length = 6;
  std::vector<std::string> wikis{"ptwiki", "enwiki"};
  ScoreTable scores;

  std::string search_language = "pt";
  std::string search_fallback_language = "en";
  int search_limit = 20;

  std::chrono::hours cache_staleness{24 * 30};
  RateLimitOptions rate;
};

// Plain `key = value` lines; `#` starts a comment. Throws ConfigError on
// unknown keys or out-of-range values.
LinkerConfig parse_config(std::string_view text);
LinkerConfig load_config(const std::filesystem::path &path);
std::string render_config(const LinkerConfig &config);

// Applies one `key = value` override on top of an existing config.
void set_config_value(LinkerConfig &config, std::string_view key, std::string_view value);
void validate(const LinkerConfig &config);

}  // namespace dhbb

#endif  // DHBB_CONFIG_H_
