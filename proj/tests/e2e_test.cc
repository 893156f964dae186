#include <gtest/gtest.h>

#include "dhbb/linker.h"
#include "dhbb/mapping_store.h"
#include "e2e.h"

namespace dhbb {
namespace {

using testing::E2eWorld;

class E2eTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { world_ = new E2eWorld(); }
  static void TearDownTestSuite() {
    delete world_;
    world_ = nullptr;
  }

  LinkRunResult run(MappingStore *store, LinkRunOptions options = {}) {
    auto client = world_->client();
    return link_corpus(world_->corpus().entries, world_->indexes(), client.get(), world_->config(),
                       store, options);
  }

  static E2eWorld *world_;
};

E2eWorld *E2eTest::world_ = nullptr;

TEST_F(E2eTest, CorpusHasFortyEntries) {
  EXPECT_EQ(world_->corpus().stats, (CorpusStats{40, 20, 20}));
  EXPECT_TRUE(world_->corpus().failures.empty());
}

TEST_F(E2eTest, EveryEntryMatchesItsAdjudication) {
  LinkRunResult result = run(nullptr);
  ASSERT_TRUE(result.failures.empty());
  ASSERT_EQ(result.decisions.size(), testing::e2e_expected().size());
  for (const auto &d : result.decisions) {
    SCOPED_TRACE(decision_to_json(d));
    const auto &want = testing::e2e_expected().at(d.entry_id);
    EXPECT_EQ(d.status, want.status);
    EXPECT_EQ(d.chosen, want.qid);
  }
}

TEST_F(E2eTest, CoverageCountsArePinned) {
  LinkRunResult result = run(nullptr);
  EXPECT_EQ(result.report, testing::e2e_expected_report());
  EXPECT_DOUBLE_EQ(result.report.thematic.ratio(), 0.5);
  EXPECT_DOUBLE_EQ(result.report.biographical.ratio(), 0.6);
}

TEST_F(E2eTest, TwoRunsAreByteIdentical) {
  std::string first = testing::decisions_jsonl(run(nullptr));
  std::string second = testing::decisions_jsonl(run(nullptr, {.force = false, .jobs = 4}));
  EXPECT_EQ(first, second);
}

TEST_F(E2eTest, ResumedRunIsByteIdentical) {
  testing::TempDir dir;
  std::string fresh;
  {
    MappingStore store((dir / "store.db").string());
    LinkRunResult r = run(&store);
    EXPECT_EQ(r.resumed, 0u);
    fresh = testing::decisions_jsonl(r);
  }
  MappingStore reopened((dir / "store.db").string());
  LinkRunResult resumed = run(&reopened);
  EXPECT_EQ(resumed.resumed, 40u);
  EXPECT_EQ(testing::decisions_jsonl(resumed), fresh);
  EXPECT_EQ(resumed.report, testing::e2e_expected_report());
}

TEST_F(E2eTest, SubConceptHitsAreTagged) {
  LinkRunResult result = run(nullptr);
  auto reasons = [&](std::int64_t id) {
    for (const auto &d : result.decisions) {
      if (d.entry_id == id) return d.reasons;
    }
    return std::vector<std::string>{};
  };
  auto has = [](const std::vector<std::string> &v, const std::string &s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  EXPECT_TRUE(has(reasons(5705), "possible_sub_concept"));
  EXPECT_FALSE(has(reasons(5724), "possible_sub_concept"));
  EXPECT_TRUE(has(reasons(5707), "below_threshold"));
  EXPECT_TRUE(has(reasons(11613), "narrow_margin"));
}

TEST_F(E2eTest, IndexOnlyRunStillFindsSitelinks) {
  auto result = link_corpus(world_->corpus().entries, world_->indexes(), nullptr, world_->config(),
                            nullptr);
  for (const auto &d : result.decisions) {
    if (d.entry_id == 5716) {
      EXPECT_EQ(d.status, LinkStatus::kAutoMapped);
      EXPECT_EQ(d.chosen, Qid(5205864));
    }
  }
}

}  // namespace
}  // namespace dhbb
