#ifndef DHBB_CORPUS_H_
#define DHBB_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/error.h"
#include "dhbb/types.h"

namespace dhbb {

enum class CorpusErrc {
  kMissingHeader,
  kMissingRequiredKey,
  kUnknownNature,
  kNonNumericFilename,
  kDirectoryNotFound,
  kEmptyCorpus,
};
std::string_view to_string(CorpusErrc code);
using CorpusError = CodedError<CorpusErrc>;

// One dictionary article. `metadata` keeps every header key other than
// `title` and `natureza`, verbatim.
struct Entry {
  std::int64_t id = 0;
  std::string title;
  Nature nature = Nature::kBiographical;
  std::string body;
  std::string source_path;
  std::map<std::string, std::string> metadata;

  bool operator==(const Entry &) const = default;
};

struct CorpusStats {
  std::size_t total = 0;
  std::size_t biographical = 0;
  std::size_t thematic = 0;

  bool operator==(const CorpusStats &) const = default;
};

struct ParseFailure {
  std::string source_path;
  std::string kind;
  std::string message;
};

struct Corpus {
  std::vector<Entry> entries;  // sorted by id
  CorpusStats stats;
  std::vector<ParseFailure> failures;

  // Binary search over the id-sorted entries.
  const Entry *find(std::int64_t id) const;
};

// Parses a `---`-delimited `key: value` header followed by the body.
// Header lines that start with whitespace or "- " continue the previous key.
Entry parse_entry(std::string_view raw, std::string_view source_path);

// Inverse of parse_entry for the fields it understands.
std::string render_entry(const Entry &entry);

// Reads every `<digits>.text` file in `dir`. Per-file failures are collected
// in Corpus::failures; throws only when the directory is missing or nothing
// parses.
Corpus load_corpus(const std::filesystem::path &dir);

CorpusStats compute_stats(const std::vector<Entry> &entries);

// First sentence of an entry body with whitespace collapsed, cut at
// `max_code_points`.
std::string first_sentence(std::string_view body, std::size_t max_code_points = 250);

}  // namespace dhbb

#endif  // DHBB_CORPUS_H_
