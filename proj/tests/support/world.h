#ifndef DHBB_TESTS_SUPPORT_WORLD_H_
#define DHBB_TESTS_SUPPORT_WORLD_H_

// A small Wikipedia + Wikidata described in one JSON file, turned into the
// artifacts the pipeline consumes: SQL dumps, sitelink indexes and client
// fixtures.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dhbb/config.h"
#include "dhbb/linker.h"

namespace dhbb::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path data_dir();  // tests/data in the source tree
std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, const std::string &contents);

struct WorldDumps {
  std::string page;
  std::string redirect;
  std::string page_props;
};

class World {
 public:
  static World load(const std::filesystem::path &json_path);
  static World parse(const std::string &json_text);

  std::vector<std::string> wikis() const;
  WorldDumps dumps(const std::string &wiki) const;
  SitelinkIndex index(const std::string &wiki) const;
  IndexSet indexes(const LinkerConfig &config) const;

  // Writes one fixture per search and per entity. Searches are keyed with
  // `search_limit`, which must match the linker configuration.
  void write_fixtures(const std::filesystem::path &dir, int search_limit) const;
  // Index files named <wiki>.idx.
  void write_indexes(const std::filesystem::path &dir) const;

 private:
  std::string json_;
};

}  // namespace dhbb::testing

#endif  // DHBB_TESTS_SUPPORT_WORLD_H_
