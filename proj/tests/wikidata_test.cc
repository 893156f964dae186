#include "dhbb/wikidata.h"

#include <gtest/gtest.h>

#include "dhbb/transport.h"

namespace dhbb {
namespace {

TEST(QidTest, ParseAndOrder) {
  EXPECT_EQ(Qid::parse("Q5205864"), Qid(5205864));
  EXPECT_EQ(Qid::parse("Q0"), std::nullopt);
  EXPECT_EQ(Qid::parse("q5"), std::nullopt);
  EXPECT_EQ(Qid::parse("Q5 "), std::nullopt);
  EXPECT_EQ(Qid::parse("Q"), std::nullopt);
  EXPECT_EQ(Qid::parse("Q-1"), std::nullopt);
  EXPECT_EQ(Qid::parse("Q99999999999999999999999"), std::nullopt);
  EXPECT_THROW(Qid::from_string("P31"), std::invalid_argument);
  EXPECT_LT(Qid(9), Qid(10));  // numeric, not lexicographic
  EXPECT_EQ(Qid(155).str(), "Q155");
}

TEST(ParseSearchTest, HitsInServiceOrder) {
  auto hits = parse_search_response(R"({"search":[
    {"id":"Q2","label":"Partido Progressista","description":"partido","match":{"type":"label","text":"Partido Progressista"}},
    {"id":"Q1","label":"Patrianovismo","match":{"type":"alias","text":"Ação Imperial Patrianovista"}},
    {"id":"L5","label":"lexeme"}]})");
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].qid, Qid(2));
  EXPECT_EQ(hits[0].description, "partido");
  EXPECT_EQ(hits[1].match_type, "alias");
  EXPECT_EQ(hits[1].match_text, "Ação Imperial Patrianovista");
  EXPECT_FALSE(hits[1].description);
}

TEST(ParseSearchTest, EmptyAndMalformed) {
  EXPECT_TRUE(parse_search_response(R"({"search":[]})").empty());
  EXPECT_THROW(parse_search_response("not json"), WikidataError);
}

TEST(ParseEntityTest, ClaimsDistinguishAbsentFromUnknown) {
  EntityRecord r = parse_entity(R"({"id":"Q5205864","type":"item",
    "labels":{"pt":{"language":"pt","value":"DOI-CODI"}},
    "descriptions":{"pt":{"language":"pt","value":"órgão de repressão"}},
    "aliases":{"pt":[{"language":"pt","value":"Destacamento de Operações de Informações"}]},
    "claims":{
      "P31":[{"mainsnak":{"snaktype":"value","datavalue":{"value":{"id":"Q43229"},"type":"wikibase-entityid"}},"rank":"normal"},
             {"mainsnak":{"snaktype":"value","datavalue":{"value":{"id":"Q1"},"type":"wikibase-entityid"}},"rank":"deprecated"}],
      "P17":[{"mainsnak":{"snaktype":"somevalue"},"rank":"normal"}]},
    "sitelinks":{"ptwiki":{"site":"ptwiki","title":"DOI-CODI"}}})");
  EXPECT_EQ(r.qid, Qid(5205864));
  EXPECT_EQ(r.labels.at("pt"), "DOI-CODI");
  EXPECT_EQ(r.label_in({"en", "pt"}), "DOI-CODI");
  EXPECT_EQ(r.aliases.at("pt").size(), 1u);
  ASSERT_TRUE(r.instance_of);
  EXPECT_EQ(*r.instance_of, std::vector<Qid>{Qid(43229)});
  ASSERT_TRUE(r.country);
  EXPECT_TRUE(r.country->empty());
  EXPECT_FALSE(r.citizenship);
  EXPECT_EQ(r.sitelinks.at("ptwiki"), "DOI-CODI");
}

TEST(ParseEntityTest, EntitiesResponseReportsMissing) {
  std::vector<Qid> missing;
  auto found = parse_entities_response(
      R"({"entities":{"Q1":{"id":"Q1","labels":{}},"Q999999999":{"id":"Q999999999","missing":""}}})",
      &missing);
  EXPECT_EQ(found.size(), 1u);
  EXPECT_EQ(missing, std::vector<Qid>{Qid(999999999)});
}

TEST(ApiRequestTest, CanonicalFormIsSortedAndStable) {
  ApiRequest a = ApiRequest::search("DOI-CODI", "pt", 20);
  EXPECT_EQ(a.canonical(),
            "action=wbsearchentities&format=json&language=pt&limit=20&search=DOI-CODI&type=item&uselang=pt");
  EXPECT_EQ(a.fixture_key().size(), 64u);
  EXPECT_NE(a.fixture_key(), ApiRequest::search("DOI-CODI", "en", 20).fixture_key());
  EXPECT_NE(a.query_string().find("search=DOI-CODI"), std::string::npos);
  EXPECT_NE(ApiRequest::search("Ação", "pt", 20).query_string().find("%C3%A7"), std::string::npos);
}

}  // namespace
}  // namespace dhbb
