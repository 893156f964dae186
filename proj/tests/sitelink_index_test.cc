#include "dhbb/sitelink_index.h"

#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "generators.h"
#include "oracles.h"
#include "world.h"

namespace dhbb {
namespace {

SitelinkIndex build(const std::string &page, const std::string &redirect, const std::string &props,
                    std::vector<std::string> *warnings = nullptr) {
  auto r = build_index(make_memory_source(page), make_memory_source(redirect),
                       make_memory_source(props), {"ptwiki", 0, 1700000000});
  if (warnings) *warnings = r.warnings;
  return std::move(r.index);
}

std::string page_rows(std::vector<std::tuple<int, int, std::string, int>> rows) {
  std::vector<SqlTuple> t;
  for (auto &[id, ns, title, redirect] : rows) {
    t.push_back(SqlTuple{{std::int64_t{id}, std::int64_t{ns}, title, std::int64_t{redirect},
                          std::int64_t{0}, 0.5, std::string("x"), std::string("x"), std::int64_t{1},
                          std::int64_t{1}, std::string("wikitext"), SqlValue{}}});
  }
  return write_insert_statements("page", t);
}

TEST(SitelinkIndexTest, DoiCodiFixture) {
  SitelinkIndex index = build(page_rows({{1, 0, "DOI-CODI", 0}}), "",
                              "INSERT INTO `page_props` VALUES (1,'wikibase_item','Q5205864',NULL);");
  EXPECT_EQ(index.lookup_title("DOI-CODI"), Qid(5205864));
  // Only the first character is case-folded, as on Wikipedia.
  EXPECT_EQ(index.lookup_title("dOI-CODI"), Qid(5205864));
  EXPECT_EQ(index.lookup_title("doi-CODI"), std::nullopt);
  EXPECT_EQ(index.lookup_title("DOI CODI"), std::nullopt);
  EXPECT_EQ(index.lookup_title("Ausente"), std::nullopt);
}

TEST(SitelinkIndexTest, NormalizeTitle) {
  EXPECT_EQ(SitelinkIndex::normalize_title("  lei de  Responsabilidade_ Fiscal "),
            "Lei_de_Responsabilidade_Fiscal");
  EXPECT_EQ(SitelinkIndex::normalize_title("ação"), "Ação");
}

TEST(SitelinkIndexTest, RedirectChainsCyclesAndHopLimit) {
  std::string pages = page_rows({{1, 0, "Alvo", 0},
                                 {2, 0, "R1", 1},
                                 {3, 0, "R2", 1},
                                 {4, 0, "R3", 1},
                                 {5, 0, "R4", 1},
                                 {6, 0, "R5", 1},
                                 {7, 0, "Ciclo_A", 1},
                                 {8, 0, "Ciclo_B", 1}});
  std::string redirects =
      "INSERT INTO `redirect` VALUES (2,0,'Alvo','',''),(3,0,'R1','',''),(4,0,'R2','',''),"
      "(5,0,'R3','',''),(6,0,'R4','',''),(7,0,'Ciclo_B','',''),(8,0,'Ciclo_A','','');";
  std::string props = "INSERT INTO `page_props` VALUES (1,'wikibase_item','Q1',NULL);";
  SitelinkIndex index = build(pages, redirects, props);

  Resolution r4 = index.resolve("R4");
  EXPECT_EQ(r4.status, ResolveStatus::kFound);
  EXPECT_EQ(r4.hops, 4);
  EXPECT_EQ(r4.qid, Qid(1));
  EXPECT_EQ(index.resolve("R5").status, ResolveStatus::kTooManyHops);
  EXPECT_EQ(index.resolve("R5").qid, std::nullopt);
  Resolution cycle = index.resolve("Ciclo A");
  EXPECT_EQ(cycle.status, ResolveStatus::kCycle);
  EXPECT_EQ(cycle.qid, std::nullopt);
  EXPECT_EQ(cycle.path, (std::vector<std::string>{"Ciclo_A", "Ciclo_B", "Ciclo_A"}));
}

TEST(SitelinkIndexTest, WarnsAboutSnapshotMismatchAndBadQids) {
  std::vector<std::string> warnings;
  build(page_rows({{1, 0, "A", 0}}), "",
        "INSERT INTO `page_props` VALUES (1,'wikibase_item','X9',NULL),(99,'wikibase_item','Q2',NULL);",
        &warnings);
  ASSERT_EQ(warnings.size(), 2u);
  EXPECT_TRUE(warnings[0].starts_with("InvalidQid"));
  EXPECT_TRUE(warnings[1].starts_with("SnapshotMismatch"));
}

TEST(SitelinkIndexTest, EquivalentToLinearScanOracle) {
  auto start = std::chrono::steady_clock::now();
  auto f = testing::make_index_fixture(11, 5000);
  ASSERT_LE(f.rows(), 10000u);
  SitelinkIndex index = build(f.page_sql, f.redirect_sql, f.props_sql);
  std::size_t found = 0;
  for (const auto &title : f.universe) {
    auto want = oracle::lookup(f.pages, f.redirects, f.props, title, SitelinkIndex::kMaxRedirectHops);
    auto got = index.lookup_title(title);
    ASSERT_EQ(got.has_value(), want.has_value()) << title;
    if (want) {
      EXPECT_EQ(got->number(), *want) << title;
      ++found;
    }
  }
  for (const auto &title : f.cycle) {
    EXPECT_EQ(index.lookup_title(title), std::nullopt);
    EXPECT_EQ(index.resolve(title).status, ResolveStatus::kCycle);
  }
  EXPECT_GT(found, f.universe.size() / 2);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(SitelinkIndexTest, SaveLoadAndDeterminism) {
  auto f = testing::make_index_fixture(12, 800);
  SitelinkIndex a = build(f.page_sql, f.redirect_sql, f.props_sql);
  SitelinkIndex b = build(f.page_sql, f.redirect_sql, f.props_sql);
  std::ostringstream sa, sb;
  a.write(sa);
  b.write(sb);
  EXPECT_EQ(sa.str(), sb.str());

  testing::TempDir dir;
  a.save(dir / "pt.idx");
  SitelinkIndex loaded = SitelinkIndex::load(dir / "pt.idx");
  EXPECT_EQ(loaded.direct(), a.direct());
  EXPECT_EQ(loaded.redirects(), a.redirects());
  EXPECT_EQ(loaded.stats(), a.stats());
  EXPECT_EQ(loaded.source_label(), "ptwiki");
  EXPECT_EQ(loaded.created_at(), 1700000000);
}

TEST(SitelinkIndexTest, CorruptFilesAreRejected) {
  SitelinkIndex index = build(page_rows({{1, 0, "A", 0}}), "",
                              "INSERT INTO `page_props` VALUES (1,'wikibase_item','Q7',NULL);");
  std::ostringstream out;
  index.write(out);
  std::string bytes = out.str();

  auto code = [](const std::string &data) {
    std::istringstream in(data);
    try {
      SitelinkIndex::read(in);
    } catch (const IndexError &e) {
      return e.code();
    }
    return IndexErrc::kIoError;
  };
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x40;
  EXPECT_EQ(code(flipped), IndexErrc::kCorrupt);
  EXPECT_EQ(code("NOTANIDX" + bytes.substr(8)), IndexErrc::kBadMagic);
  EXPECT_THROW(SitelinkIndex::load("/nonexistent.idx"), IndexError);
}

}  // namespace
}  // namespace dhbb
