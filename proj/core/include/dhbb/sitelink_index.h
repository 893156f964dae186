#ifndef DHBB_SITELINK_INDEX_H_
#define DHBB_SITELINK_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dhbb/error.h"
#include "dhbb/sql_dump.h"
#include "dhbb/types.h"

namespace dhbb {

enum class IndexErrc { kBadMagic, kUnsupportedVersion, kCorrupt, kIoError };
std::string_view to_string(IndexErrc code);
using IndexError = CodedError<IndexErrc>;

enum class ResolveStatus { kFound, kNotFound, kCycle, kTooManyHops };
std::string_view to_string(ResolveStatus status);

struct Resolution {
  std::optional<Qid> qid;
  ResolveStatus status = ResolveStatus::kNotFound;
  int hops = 0;                     // redirects followed
  std::vector<std::string> path;    // normalized titles visited, in order
};

// Local Wikipedia title -> Wikidata item map with redirect chasing. Built
// once from the page / redirect / page_props dumps of one wiki and then
// immutable, so a single instance can be shared by concurrent readers.
//
// On-disk layout (all integers little-endian):
//   magic "DHBBSLX1" | u32 version (=1) | i64 created_at (unix seconds;
//   the only field that differs between builds of identical dumps) |
//   str source_label | u64 pages | u64 redirects | u64 qids |
//   u64 n_direct   then n_direct   x (str title, u64 qid number) |
//   u64 n_redirect then n_redirect x (str title, str target) |
//   u32 crc32 of every preceding byte.
// `str` is a u32 byte length followed by UTF-8 bytes. Entries are sorted by
// title, so identical inputs give identical files.
class SitelinkIndex {
 public:
  static constexpr int kMaxRedirectHops = 4;
  static constexpr std::uint32_t kFormatVersion = 1;

  struct Stats {
    std::uint64_t pages = 0;
    std::uint64_t redirects = 0;
    std::uint64_t qids = 0;

    bool operator==(const Stats &) const = default;
  };

  SitelinkIndex() = default;
  SitelinkIndex(std::unordered_map<std::string, Qid> direct,
                std::unordered_map<std::string, std::string> redirects, Stats stats,
                std::string source_label, std::int64_t created_at = 0);

  // MediaWiki normalization: trim, collapse runs of spaces/underscores into a
  // single underscore, uppercase the first character.
  static std::string normalize_title(std::string_view title);

  std::optional<Qid> lookup_title(std::string_view title) const;
  Resolution resolve(std::string_view title) const;

  const Stats &stats() const { return stats_; }
  const std::string &source_label() const { return source_label_; }
  std::int64_t created_at() const { return created_at_; }
  const std::unordered_map<std::string, Qid> &direct() const { return direct_; }
  const std::unordered_map<std::string, std::string> &redirects() const { return redirects_; }

  void write(std::ostream &out) const;
  static SitelinkIndex read(std::istream &in);
  void save(const std::filesystem::path &path) const;
  static SitelinkIndex load(const std::filesystem::path &path);

 private:
  std::unordered_map<std::string, Qid> direct_;
  std::unordered_map<std::string, std::string> redirects_;
  Stats stats_;
  std::string source_label_;
  std::int64_t created_at_ = 0;
};

struct IndexBuildOptions {
  std::string source_label;
  int namespace_id = 0;
  std::int64_t created_at = 0;
};

struct IndexBuildResult {
  SitelinkIndex index;
  std::vector<std::string> warnings;  // e.g. SnapshotMismatch, invalid QIDs
};

// Parses the three dumps (concurrently) and merges them deterministically.
IndexBuildResult build_index(std::unique_ptr<ByteSource> page_dump,
                             std::unique_ptr<ByteSource> redirect_dump,
                             std::unique_ptr<ByteSource> page_props_dump,
                             const IndexBuildOptions &options);

IndexBuildResult build_index_from_files(const std::filesystem::path &page_dump,
                                        const std::filesystem::path &redirect_dump,
                                        const std::filesystem::path &page_props_dump,
                                        const IndexBuildOptions &options);

}  // namespace dhbb

#endif  // DHBB_SITELINK_INDEX_H_
