#include "dhbb/evaluator.h"

#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "generators.h"

namespace dhbb {
namespace {

std::map<Stratum, std::vector<std::int64_t>> population(std::size_t per) {
  std::map<Stratum, std::vector<std::int64_t>> out;
  std::int64_t next = 1;
  for (Stratum s : kAllStrata) {
    for (std::size_t i = 0; i < per; ++i) out[s].push_back(next++);
  }
  return out;
}

TEST(FractionTest, DecimalRendering) {
  EXPECT_EQ((Fraction{4, 25}.decimal()), "0.16");
  EXPECT_EQ((Fraction{7, 25}.decimal()), "0.28");
  EXPECT_EQ((Fraction{0, 25}.decimal()), "0");
  EXPECT_EQ((Fraction{25, 25}.decimal()), "1");
  EXPECT_EQ((Fraction{1, 3}.decimal()), "0.3333");
  EXPECT_EQ((Fraction{2, 3}.decimal()), "0.6667");
  EXPECT_EQ((Fraction{1, 8}.decimal()), "0.125");
  EXPECT_EQ((Fraction{1, 0}.decimal()), "n/a");
}

TEST(EvaluatorTest, MetricsFromFixedAdjudications) {
  std::vector<AdjudicationRecord> adjs;
  auto append = [&](std::vector<AdjudicationRecord> v) { adjs.insert(adjs.end(), v.begin(), v.end()); };
  append(testing::adjudication_fixture(Stratum::kThematicMapped, 25, 4, 1000));
  append(testing::adjudication_fixture(Stratum::kBiographicalMapped, 25, 7, 2000));
  append(testing::adjudication_fixture(Stratum::kThematicUnmapped, 25, 8, 3000));
  EvalReport r = compute_metrics(adjs);
  ASSERT_EQ(r.strata.size(), 4u);
  EXPECT_EQ(r.strata[Stratum::kThematicMapped].rate, (Fraction{4, 25}));
  EXPECT_EQ(r.strata[Stratum::kThematicMapped].rate->decimal(), "0.16");
  EXPECT_EQ(r.strata[Stratum::kBiographicalMapped].rate->decimal(), "0.28");
  EXPECT_EQ(r.strata[Stratum::kThematicUnmapped].hits, 8u);
  EXPECT_FALSE(r.strata[Stratum::kBiographicalUnmapped].rate);

  std::string text = render_report(r);
  EXPECT_NE(text.find("0.16"), std::string::npos);
  EXPECT_NE(text.find("0.28"), std::string::npos);
  EXPECT_NE(text.find("n/a"), std::string::npos);
}

TEST(EvaluatorTest, InconsistentVerdictNamesTheEntry) {
  AdjudicationRecord a;
  a.entry_id = 77;
  a.stratum = Stratum::kThematicUnmapped;
  a.verdict = Verdict::kAutoCorrect;
  try {
    compute_metrics({a});
    FAIL();
  } catch (const EvalError &e) {
    EXPECT_EQ(e.code(), EvalErrc::kInconsistentVerdict);
    EXPECT_NE(std::string(e.what()).find("77"), std::string::npos);
  }
  a.verdict = Verdict::kHumanFound;
  EXPECT_THROW(check_adjudication(a), EvalError);
  a.found_qid = Qid(1);
  EXPECT_NO_THROW(check_adjudication(a));
}

TEST(EvaluatorTest, SampleIsDeterministicPerSeed) {
  auto pop = population(200);
  SamplePlan a = stratified_sample(pop, 25, 42);
  SamplePlan b = stratified_sample(pop, 25, 42);
  EXPECT_EQ(a.entries, b.entries);
  SamplePlan c = stratified_sample(pop, 25, 43);
  EXPECT_NE(a.entries, c.entries);
  for (Stratum s : kAllStrata) {
    const auto &ids = a.entries[s];
    ASSERT_EQ(ids.size(), 25u);
    EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
    EXPECT_EQ(std::set<std::int64_t>(ids.begin(), ids.end()).size(), 25u);
    for (auto id : ids) {
      EXPECT_NE(std::find(pop[s].begin(), pop[s].end(), id), pop[s].end());
    }
  }
}

TEST(EvaluatorTest, StrataAreIndependent) {
  auto pop = population(100);
  SamplePlan before = stratified_sample(pop, 10, 5);
  pop[Stratum::kBiographicalUnmapped].resize(50);
  SamplePlan after = stratified_sample(pop, 10, 5);
  EXPECT_EQ(before.entries[Stratum::kThematicMapped], after.entries[Stratum::kThematicMapped]);
}

TEST(EvaluatorTest, SmallAndEmptyStrataAreClamped) {
  std::map<Stratum, std::vector<std::int64_t>> pop{{Stratum::kThematicMapped, {3, 1, 2, 2}}};
  SamplePlan plan = stratified_sample(pop, 25, 1);
  EXPECT_EQ(plan.entries[Stratum::kThematicMapped], (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(plan.population[Stratum::kThematicMapped], 3u);
  EXPECT_EQ(plan.warnings.size(), 3u);
  EXPECT_EQ(plan.warnings[0], "EmptyStratum:thematic_unmapped");
}

TEST(EvaluatorTest, SampleIsRoughlyUniform) {
  std::map<Stratum, std::vector<std::int64_t>> pop;
  for (std::int64_t i = 0; i < 10; ++i) pop[Stratum::kThematicMapped].push_back(i);
  std::vector<int> counts(10);
  const int rounds = 4000;
  for (int seed = 0; seed < rounds; ++seed) {
    SamplePlan plan = stratified_sample(pop, 1, seed);
    for (auto id : plan.entries[Stratum::kThematicMapped]) ++counts[id];
  }
  // Each id is expected 400 times; 5 standard deviations is about 95.
  for (int c : counts) EXPECT_NEAR(c, rounds / 10, 95);
}

TEST(EvaluatorTest, UniformBelowRejectsTheBiasedTail) {
  struct Script {
    std::vector<std::uint64_t> values;
    std::size_t pos = 0;
  } script{{UINT64_MAX, UINT64_MAX - 1, 10}};
  auto next = [](void *s) -> std::uint64_t {
    auto *sc = static_cast<Script *>(s);
    return sc->values[sc->pos++];
  };
  // 2^64 - 1 = 3 * 5 * 17 * 257 * 641 * 65537 * 6700417, so bound 6 leaves a
  // remainder of 3 and the two top draws fall in the rejected tail.
  EXPECT_EQ(uniform_below(6, next, &script), 4u);
  EXPECT_EQ(script.pos, 3u);
  EXPECT_EQ(uniform_below(1, next, &script), 0u);
}

TEST(EvaluatorTest, StoreSamplingSkipsAmbiguousAndReviewed) {
  MappingStore store(":memory:");
  auto add = [&](std::int64_t id, Nature nature, LinkStatus status) {
    Entry e;
    e.id = id;
    e.title = "E" + std::to_string(id);
    e.nature = nature;
    LinkDecision d;
    d.entry_id = id;
    d.status = status;
    if (status != LinkStatus::kNotFound) {
      Candidate c;
      c.qid = Qid(id);
      c.raw_score = 0.9;
      d.candidates.push_back(c);
    }
    if (status == LinkStatus::kAutoMapped) d.chosen = Qid(id);
    store.upsert_decision(e, d);
  };
  add(1, Nature::kThematic, LinkStatus::kAutoMapped);
  add(2, Nature::kThematic, LinkStatus::kAmbiguous);
  add(3, Nature::kThematic, LinkStatus::kNotFound);
  add(4, Nature::kBiographical, LinkStatus::kAutoMapped);
  SamplePlan plan = stratified_sample(store, 25, 1);
  EXPECT_EQ(plan.entries[Stratum::kThematicMapped], std::vector<std::int64_t>{1});
  EXPECT_EQ(plan.entries[Stratum::kThematicUnmapped], std::vector<std::int64_t>{3});
  EXPECT_EQ(plan.entries[Stratum::kBiographicalMapped], std::vector<std::int64_t>{4});
  EXPECT_TRUE(plan.entries[Stratum::kBiographicalUnmapped].empty());

  std::string tsv = render_plan_tsv(plan, store);
  EXPECT_NE(tsv.find("1\tthematic_mapped\t\t\t\t\tE1\tQ1\n"), std::string::npos);

  std::vector<AdjudicationRecord> adjs{
      {1, Stratum::kThematicMapped, Verdict::kAutoWrong, std::nullopt, "rev", "wrong item"},
      {3, Stratum::kThematicUnmapped, Verdict::kHumanFound, Qid(99), "rev", std::nullopt},
      {4, Stratum::kBiographicalMapped, Verdict::kAutoCorrect, std::nullopt, "rev", std::nullopt}};
  ApplyResult applied = apply_adjudications(store, adjs);
  EXPECT_EQ(applied.changed, 3u);
  EXPECT_EQ(store.record(1)->status, RecordStatus::kRejected);
  EXPECT_EQ(store.record(3)->status, RecordStatus::kManual);
  EXPECT_EQ(store.record(3)->qid, Qid(99));
  EXPECT_EQ(store.record(4)->status, RecordStatus::kConfirmed);

  EXPECT_EQ(apply_adjudications(store, adjs).unchanged, 3u);
  adjs[0].verdict = Verdict::kAutoCorrect;
  ApplyResult conflicted = apply_adjudications(store, adjs);
  EXPECT_EQ(conflicted.conflicts, std::vector<std::int64_t>{1});
  EXPECT_EQ(apply_adjudications(store, adjs, true).changed, 1u);
}

TEST(EvaluatorTest, AdjudicationTsvRoundTrips) {
  auto adjs = testing::adjudication_fixture(Stratum::kThematicUnmapped, 5, 2, 10);
  adjs[0].note = "tab\tand \"quotes\"";
  EXPECT_EQ(parse_adjudications_tsv(render_adjudications_tsv(adjs)), adjs);
  try {
    parse_adjudications_tsv("entry_id\tstratum\n");
    FAIL();
  } catch (const EvalError &e) {
    EXPECT_EQ(e.code(), EvalErrc::kHeaderMismatch);
  }
  std::string plan =
      "entry_id\tstratum\tverdict\tfound_qid\tadjudicator\tnote\ttitle\tqid\n"
      "1\tthematic_mapped\tauto_correct\t\trev\t\tT\tQ1\n";
  ASSERT_EQ(parse_adjudications_tsv(plan).size(), 1u);
  std::string bad = render_adjudications_tsv({}) + "1\tnowhere\tauto_correct\t\trev\t\n";
  EXPECT_THROW(parse_adjudications_tsv(bad), EvalError);
}

}  // namespace
}  // namespace dhbb
