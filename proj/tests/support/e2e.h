#ifndef DHBB_TESTS_SUPPORT_E2E_H_
#define DHBB_TESTS_SUPPORT_E2E_H_

// The frozen 40-entry corpus under tests/data/e2e and its hand-adjudicated
// expected outcomes.

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "dhbb/corpus.h"
#include "dhbb/linker.h"
#include "dhbb/wd_client.h"
#include "world.h"

namespace dhbb::testing {

struct ExpectedLink {
  LinkStatus status;
  std::optional<Qid> qid;
};

const std::map<std::int64_t, ExpectedLink> &e2e_expected();
CoverageReport e2e_expected_report();

// Corpus, config, indexes and a fixture directory in a private temp dir.
class E2eWorld {
 public:
  E2eWorld();

  const Corpus &corpus() const { return corpus_; }
  const LinkerConfig &config() const { return config_; }
  const IndexSet &indexes() const { return indexes_; }
  const World &world() const { return world_; }
  std::filesystem::path fixtures() const { return dir_ / "fixtures"; }
  std::filesystem::path corpus_dir() const;
  std::filesystem::path config_path() const;
  const TempDir &dir() const { return dir_; }

  // Client answering from the fixtures; nothing reaches the network.
  std::shared_ptr<WikidataClient> client() const;

 private:
  TempDir dir_;
  World world_;
  Corpus corpus_;
  LinkerConfig config_;
  IndexSet indexes_;
};

// Every decision as one JSON line, entry-id order.
std::string decisions_jsonl(const LinkRunResult &result);

}  // namespace dhbb::testing

#endif  // DHBB_TESTS_SUPPORT_E2E_H_
