#include "dhbb/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dhbb/text.h"

namespace dhbb {

std::string_view to_string(ConfigErrc code) {
  switch (code) {
    case ConfigErrc::kUnknownKey: return "UnknownConfigKey";
    case ConfigErrc::kInvalidValue: return "InvalidConfigValue";
    case ConfigErrc::kIoError: return "IoError";
  }
  return "ConfigError";
}

namespace {

double to_double(std::string_view key, std::string_view value) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(ConfigErrc::kInvalidValue, std::string(key) + " = " + std::string(value));
  }
  return v;
}

int to_int(std::string_view key, std::string_view value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(ConfigErrc::kInvalidValue, std::string(key) + " = " + std::string(value));
  }
  return v;
}

std::vector<std::string> to_list(std::string_view value) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in{std::string(value)};
  while (std::getline(in, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Qid to_qid(std::string_view key, std::string_view value) {
  auto q = Qid::parse(value);
  if (!q) throw ConfigError(ConfigErrc::kInvalidValue, std::string(key) + " = " + std::string(value));
  return *q;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

void set_config_value(LinkerConfig &c, std::string_view key, std::string_view raw) {
  std::string value = text::trim(raw);
  if (key == "brazil_qid") {
    c.brazil_qid = value.empty() ? std::nullopt : std::optional<Qid>(to_qid(key, value));
  } else if (key == "disambiguation_class_qids") {
    c.disambiguation_class_qids.clear();
    for (const auto &item : to_list(value)) c.disambiguation_class_qids.push_back(to_qid(key, item));
  } else if (key == "accept_threshold") {
    c.accept_threshold = to_double(key, value);
  } else if (key == "ambiguity_margin") {
    c.ambiguity_margin = to_double(key, value);
  } else if (key == "fuzzy_max_edits") {
    c.fuzzy_max_edits = to_int(key, value);
  } else if (key == "fuzzy_min_token_length") {
    c.fuzzy_min_token_length = to_int(key, value);
  } else if (key == "wikis") {
    c.wikis = to_list(value);
  } else if (key == "score.sitelink") {
    c.scores.sitelink = to_double(key, value);
  } else if (key == "score.sitelink_base") {
    c.scores.sitelink_base = to_double(key, value);
  } else if (key == "score.redirect") {
    c.scores.redirect = to_double(key, value);
  } else if (key == "score.search") {
    c.scores.search = to_double(key, value);
  } else if (key == "score.acronym") {
    c.scores.acronym = to_double(key, value);
  } else if (key == "score.fuzzy") {
    c.scores.fuzzy = to_double(key, value);
  } else if (key == "score.variant_decrement") {
    c.scores.variant_decrement = to_double(key, value);
  } else if (key == "penalty.foreign_citizenship") {
    c.scores.foreign_citizenship_penalty = to_double(key, value);
  } else if (key == "search.language") {
    c.search_language = value;
  } else if (key == "search.fallback_language") {
    c.search_fallback_language = value;
  } else if (key == "search.limit") {
    c.search_limit = to_int(key, value);
  } else if (key == "cache.staleness_days") {
    c.cache_staleness = std::chrono::hours(24 * to_int(key, value));
  } else if (key == "rate.requests_per_second") {
    c.rate.requests_per_second = to_double(key, value);
  } else if (key == "rate.max_in_flight") {
    c.rate.max_in_flight = to_int(key, value);
  } else if (key == "rate.min_interval_ms") {
    c.rate.min_interval = std::chrono::milliseconds(to_int(key, value));
  } else {
    throw ConfigError(ConfigErrc::kUnknownKey, std::string(key));
  }
}

void validate(const LinkerConfig &c) {
  auto bad = [](std::string what) { throw ConfigError(ConfigErrc::kInvalidValue, std::move(what)); };
  if (!(c.accept_threshold > 0 && c.accept_threshold <= 1)) bad("accept_threshold must be in (0, 1]");
  if (c.ambiguity_margin < 0 || c.ambiguity_margin > 1) bad("ambiguity_margin must be in [0, 1]");
  if (c.fuzzy_max_edits < 0) bad("fuzzy_max_edits must be >= 0");
  if (c.search_limit < 1 || c.search_limit > 50) bad("search.limit must be in [1, 50]");
  if (c.wikis.empty()) bad("wikis must not be empty");
  if (c.rate.max_in_flight < 1) bad("rate.max_in_flight must be >= 1");
  for (double s : {c.scores.sitelink, c.scores.sitelink_base, c.scores.redirect, c.scores.search,
                   c.scores.acronym, c.scores.fuzzy}) {
    if (s < 0 || s > 1) bad("scores must be in [0, 1]");
  }
}

LinkerConfig parse_config(std::string_view text) {
  LinkerConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ConfigErrc::kInvalidValue, "line " + std::to_string(number) + ": expected key = value");
    }
    set_config_value(config, text::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  validate(config);
  return config;
}

LinkerConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrc::kIoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string render_config(const LinkerConfig &c) {
  std::ostringstream out;
  out << "brazil_qid = " << (c.brazil_qid ? c.brazil_qid->str() : "") << "\n";
  out << "disambiguation_class_qids = ";
  for (std::size_t i = 0; i < c.disambiguation_class_qids.size(); ++i) {
    out << (i ? ", " : "") << c.disambiguation_class_qids[i].str();
  }
  out << "\n";
  out << "accept_threshold = " << format_double(c.accept_threshold) << "\n";
  out << "ambiguity_margin = " << format_double(c.ambiguity_margin) << "\n";
  out << "fuzzy_max_edits = " << c.fuzzy_max_edits << "\n";
  out << "fuzzy_min_token_length = " << c.fuzzy_min_token_length << "\n";
  out << "wikis = ";
  for (std::size_t i = 0; i < c.wikis.size(); ++i) out << (i ? ", " : "") << c.wikis[i];
  out << "\n";
  out << "score.sitelink = " << format_double(c.scores.sitelink) << "\n";
  out << "score.sitelink_base = " << format_double(c.scores.sitelink_base) << "\n";
  out << "score.redirect = " << format_double(c.scores.redirect) << "\n";
  out << "score.search = " << format_double(c.scores.search) << "\n";
  out << "score.acronym = " << format_double(c.scores.acronym) << "\n";
  out << "score.fuzzy = " << format_double(c.scores.fuzzy) << "\n";
  out << "score.variant_decrement = " << format_double(c.scores.variant_decrement) << "\n";
  out << "penalty.foreign_citizenship = " << format_double(c.scores.foreign_citizenship_penalty) << "\n";
  out << "search.language = " << c.search_language << "\n";
  out << "search.fallback_language = " << c.search_fallback_language << "\n";
  out << "search.limit = " << c.search_limit << "\n";
  out << "cache.staleness_days = " << c.cache_staleness.count() / 24 << "\n";
  out << "rate.requests_per_second = " << format_double(c.rate.requests_per_second) << "\n";
  out << "rate.max_in_flight = " << c.rate.max_in_flight << "\n";
  out << "rate.min_interval_ms = " << c.rate.min_interval.count() << "\n";
  return out.str();
}

}  // namespace dhbb
