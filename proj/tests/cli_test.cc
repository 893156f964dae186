#include "cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include "dhbb/evaluator.h"
#include "dhbb/transport.h"
#include "dhbb/tsv.h"
#include "e2e.h"
#include "world.h"

namespace dhbb {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string &s) { return std::count(s.begin(), s.end(), '\n'); }

TEST(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"export", "--store", "x.db", "--bogus"}).code, cli::kExitUsage);
  Outcome missing = run({"sample", "--store", "x.db"});
  EXPECT_EQ(missing.code, cli::kExitUsage);
  EXPECT_NE(missing.err.find("--seed"), std::string::npos);
  EXPECT_EQ(run({"link", "--corpus", "c", "--store", "s", "--jobs", "many"}).code, cli::kExitUsage);
}

TEST(CliTest, HelpExitsWithZero) {
  Outcome help = run({"--help"});
  EXPECT_EQ(help.code, cli::kExitOk);
  EXPECT_NE(help.out.find("build-index"), std::string::npos);
  EXPECT_EQ(run({"link", "--help"}).code, cli::kExitOk);
}

TEST(CliTest, RuntimeFailuresExitWithOne) {
  testing::TempDir dir;
  Outcome r = run({"evaluate", "--adjudications", (dir / "missing.tsv").string()});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  testing::write_file(dir / "bad.tsv", "not\ta\theader\n");
  EXPECT_EQ(run({"evaluate", "--adjudications", (dir / "bad.tsv").string()}).code, cli::kExitFailure);
}

TEST(CliTest, FlagsFallBackToEnvironment) {
  testing::TempDir dir;
  std::string store = (dir / "env.db").string();
  ::setenv("DHBB_STORE", store.c_str(), 1);
  Outcome r = run({"export"});
  ::unsetenv("DHBB_STORE");
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "entry_id\ttitle\tnature\tqid\tstatus\tconfidence\tprovenance\treviewer\tupdated_at\tnote");
}

TEST(CliTest, BootstrapConfigFromFixtures) {
  testing::TempDir dir;
  auto fixtures = dir / "fx";
  auto hit = [](const std::string &id, const std::string &label) {
    return R"({"search":[{"id":")" + id + R"(","title":")" + id + R"(","label":")" + label +
           R"(","match":{"type":"label","language":"en","text":")" + label + R"("}}]})";
  };
  write_fixture(fixtures, ApiRequest::search("Brazil", "en", 10), {200, hit("Q155", "Brazil"), std::nullopt});
  write_fixture(fixtures, ApiRequest::search("Wikimedia disambiguation page", "en", 10),
                {200, hit("Q4167410", "Wikimedia disambiguation page"), std::nullopt});
  Outcome r = run({"bootstrap-config", "--fixtures", fixtures.string(), "--out", (dir / "c.conf").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  LinkerConfig c = load_config(dir / "c.conf");
  EXPECT_EQ(c.brazil_qid, Qid(155));
  EXPECT_EQ(c.disambiguation_class_qids, std::vector<Qid>{Qid(4167410)});
}

class CliPipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { world_ = new testing::E2eWorld(); }
  static void TearDownTestSuite() {
    delete world_;
    world_ = nullptr;
  }

  std::string path(const std::string &name) const { return (dir_ / name).string(); }

  // build-index for every wiki of the world, returning --index arguments.
  std::vector<std::string> build_indexes() {
    std::vector<std::string> args;
    for (const auto &wiki : world_->world().wikis()) {
      testing::WorldDumps d = world_->world().dumps(wiki);
      testing::write_file(dir_ / (wiki + "-page.sql"), d.page);
      testing::write_file(dir_ / (wiki + "-redirect.sql"), d.redirect);
      testing::write_file(dir_ / (wiki + "-props.sql"), d.page_props);
      Outcome r = run({"build-index", "--page", path(wiki + "-page.sql"), "--redirect",
                   path(wiki + "-redirect.sql"), "--page-props", path(wiki + "-props.sql"), "--out",
                   path(wiki + ".idx"), "--wiki", wiki, "--created-at", "1700000000"});
      EXPECT_EQ(r.code, cli::kExitOk) << r.err;
      args.push_back("--index");
      args.push_back(wiki + "=" + path(wiki + ".idx"));
    }
    return args;
  }

  Outcome link(const std::vector<std::string> &indexes, const std::string &decisions) {
    std::vector<std::string> args{"link",        "--corpus",   world_->corpus_dir().string(),
                                  "--store",     path("m.db"), "--config",
                                  world_->config_path().string(), "--fixtures",
                                  world_->fixtures().string(), "--decisions", decisions};
    args.insert(args.end(), indexes.begin(), indexes.end());
    return run(args);
  }

  static testing::E2eWorld *world_;
  testing::TempDir dir_;
};

testing::E2eWorld *CliPipelineTest::world_ = nullptr;

TEST_F(CliPipelineTest, FullWorkflow) {
  auto indexes = build_indexes();

  Outcome linked = link(indexes, path("decisions.jsonl"));
  ASSERT_EQ(linked.code, cli::kExitOk) << linked.err;
  EXPECT_NE(linked.out.find("0.5000"), std::string::npos) << linked.out;
  EXPECT_NE(linked.out.find("0.6000"), std::string::npos) << linked.out;

  // The CLI run matches the in-process pipeline byte for byte.
  auto client = world_->client();
  auto in_process = link_corpus(world_->corpus().entries, world_->indexes(), client.get(),
                                world_->config(), nullptr);
  EXPECT_EQ(testing::read_file(path("decisions.jsonl")), testing::decisions_jsonl(in_process));

  // A second run resumes from the store and writes the same decisions.
  Outcome resumed = link(indexes, path("decisions2.jsonl"));
  ASSERT_EQ(resumed.code, cli::kExitOk);
  EXPECT_NE(resumed.err.find("40 resumed"), std::string::npos) << resumed.err;
  EXPECT_EQ(testing::read_file(path("decisions2.jsonl")), testing::read_file(path("decisions.jsonl")));

  Outcome exported = run({"export", "--store", path("m.db"), "--out", path("m.tsv")});
  ASSERT_EQ(exported.code, cli::kExitOk);
  EXPECT_EQ(count_lines(testing::read_file(path("m.tsv"))), 41u);
  Outcome reimported = run({"import-tsv", "--store", path("m.db"), "--in", path("m.tsv")});
  ASSERT_EQ(reimported.code, cli::kExitOk);
  EXPECT_EQ(reimported.out, "0 records created or changed\n");

  Outcome gaps = run({"gaps", "--store", path("m.db"), "--corpus", world_->corpus_dir().string()});
  ASSERT_EQ(gaps.code, cli::kExitOk);
  const auto report = testing::e2e_expected_report();
  EXPECT_EQ(count_lines(gaps.out), 1 + report.thematic.unmapped + report.biographical.unmapped);

  Outcome sampled = run({"sample", "--store", path("m.db"), "--per-stratum", "3", "--seed", "7", "--out",
                     path("plan.tsv")});
  ASSERT_EQ(sampled.code, cli::kExitOk) << sampled.err;
  EXPECT_EQ(testing::read_file(path("plan.tsv")),
            (run({"sample", "--store", path("m.db"), "--per-stratum", "3", "--seed", "7"}).out));

  // Fill in the plan: first mapped row of each nature wrong, the rest right;
  // unmapped rows not found on Wikidata.
  const std::string plan = testing::read_file(path("plan.tsv"));
  tsv::Reader reader(plan);
  std::string filled = tsv::write_row(*reader.next());
  std::set<std::string> wrong_given;
  std::size_t rows = 0;
  while (auto row = reader.next()) {
    ++rows;
    auto stratum = parse_stratum(*(*row)[1]);
    ASSERT_TRUE(stratum);
    if (is_mapped(*stratum)) {
      bool wrong = wrong_given.insert(*(*row)[1]).second;
      (*row)[2] = wrong ? "auto_wrong" : "auto_correct";
    } else {
      (*row)[2] = "human_not_found";
    }
    (*row)[4] = "rev";
    filled += tsv::write_row(*row);
  }
  EXPECT_EQ(rows, 12u);
  testing::write_file(dir_ / "adj.tsv", filled);

  Outcome evaluated = run({"evaluate", "--adjudications", path("adj.tsv")});
  ASSERT_EQ(evaluated.code, cli::kExitOk) << evaluated.err;
  EXPECT_NE(evaluated.out.find(Fraction{1, 3}.decimal()), std::string::npos) << evaluated.out;

  Outcome applied = run({"adjudicate-import", "--store", path("m.db"), "--adjudications", path("adj.tsv")});
  ASSERT_EQ(applied.code, cli::kExitOk) << applied.err;
  EXPECT_EQ(applied.out, "12 changed, 0 unchanged, 0 conflicts\n");

  // Human records survive a forced relink.
  std::vector<std::string> args{"link", "--corpus", world_->corpus_dir().string(), "--store",
                                path("m.db"), "--config", world_->config_path().string(),
                                "--fixtures", world_->fixtures().string(), "--force"};
  args.insert(args.end(), indexes.begin(), indexes.end());
  Outcome relinked = run(args);
  ASSERT_EQ(relinked.code, cli::kExitOk);
  EXPECT_NE(relinked.err.find("12 kept by human review"), std::string::npos) << relinked.err;
}

TEST_F(CliPipelineTest, OfflineIndexOnlyRun) {
  auto indexes = build_indexes();
  std::vector<std::string> args{"link", "--corpus", world_->corpus_dir().string(), "--store",
                                path("offline.db"), "--config", world_->config_path().string(),
                                "--offline"};
  args.insert(args.end(), indexes.begin(), indexes.end());
  Outcome r = run(args);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.err.find("network calls"), std::string::npos);

  Outcome none = run({"link", "--corpus", world_->corpus_dir().string(), "--store", path("x.db"),
                  "--offline"});
  EXPECT_EQ(none.code, cli::kExitUsage);
}

}  // namespace
}  // namespace dhbb
