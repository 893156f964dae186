#include "dhbb/wikidata.h"

#include "json.hpp"

namespace dhbb {

using nlohmann::json;

std::string_view to_string(WikidataErrc code) {
  switch (code) {
    case WikidataErrc::kNetworkError: return "NetworkError";
    case WikidataErrc::kServiceError: return "ServiceError";
    case WikidataErrc::kRateLimited: return "RateLimited";
    case WikidataErrc::kInvalidRequest: return "InvalidRequest";
    case WikidataErrc::kFixtureMissing: return "FixtureMissing";
    case WikidataErrc::kBadResponse: return "BadResponse";
  }
  return "WikidataError";
}

std::string EntityRecord::label_in(const std::vector<std::string> &languages) const {
  for (const auto &lang : languages) {
    if (auto it = labels.find(lang); it != labels.end()) return it->second;
  }
  return labels.empty() ? std::string() : labels.begin()->second;
}

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw WikidataError(WikidataErrc::kBadResponse, e.what());
  }
}

std::optional<std::vector<Qid>> item_claims(const json &claims, const char *property) {
  if (!claims.is_object() || !claims.contains(property)) return std::nullopt;
  std::vector<Qid> out;
  for (const auto &statement : claims.at(property)) {
    if (statement.value("rank", "normal") == "deprecated") continue;
    const auto &snak = statement.value("mainsnak", json::object());
    if (snak.value("snaktype", "") != "value") continue;
    const auto &value = snak.value("datavalue", json::object()).value("value", json::object());
    std::optional<Qid> q;
    if (value.contains("id") && value.at("id").is_string()) {
      q = Qid::parse(value.at("id").get<std::string>());
    } else if (value.contains("numeric-id")) {
      q = Qid(value.at("numeric-id").get<std::uint64_t>());
    }
    if (q && std::find(out.begin(), out.end(), *q) == out.end()) out.push_back(*q);
  }
  return out;
}

EntityRecord entity_from_json(const json &e) {
  EntityRecord r;
  auto id = Qid::parse(e.value("id", ""));
  if (!id) throw WikidataError(WikidataErrc::kBadResponse, "entity without a valid id");
  r.qid = *id;
  // value() returns by value; keep the members alive while iterating.
  const json labels = e.value("labels", json::object());
  const json descriptions = e.value("descriptions", json::object());
  const json aliases = e.value("aliases", json::object());
  const json claims = e.value("claims", json::object());
  const json sitelinks = e.value("sitelinks", json::object());
  for (const auto &[lang, v] : labels.items()) r.labels[lang] = v.value("value", "");
  for (const auto &[lang, v] : descriptions.items()) r.descriptions[lang] = v.value("value", "");
  for (const auto &[lang, list] : aliases.items()) {
    auto &out = r.aliases[lang];
    for (const auto &a : list) out.push_back(a.value("value", ""));
  }
  r.instance_of = item_claims(claims, "P31");
  r.country = item_claims(claims, "P17");
  r.citizenship = item_claims(claims, "P27");
  for (const auto &[wiki, v] : sitelinks.items()) r.sitelinks[wiki] = v.value("title", "");
  return r;
}

}  // namespace

std::vector<SearchHit> parse_search_response(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("search")) {
    throw WikidataError(WikidataErrc::kBadResponse, "search response without 'search'");
  }
  std::vector<SearchHit> hits;
  for (const auto &h : doc.at("search")) {
    auto q = Qid::parse(h.value("id", ""));
    if (!q) continue;
    SearchHit hit;
    hit.qid = *q;
    hit.label = h.value("label", "");
    if (h.contains("description") && h.at("description").is_string()) {
      hit.description = h.at("description").get<std::string>();
    }
    const json match = h.value("match", json::object());
    hit.match_text = match.value("text", hit.label);
    hit.match_type = match.value("type", "label");
    hits.push_back(std::move(hit));
  }
  return hits;
}

EntityRecord parse_entity(std::string_view text) { return entity_from_json(parse_json(text)); }

std::map<Qid, EntityRecord> parse_entities_response(std::string_view text, std::vector<Qid> *missing) {
  json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("entities")) {
    throw WikidataError(WikidataErrc::kBadResponse, "entities response without 'entities'");
  }
  std::map<Qid, EntityRecord> out;
  for (const auto &[key, e] : doc.at("entities").items()) {
    if (e.contains("missing")) {
      if (auto q = Qid::parse(e.value("id", key)); q && missing) missing->push_back(*q);
      continue;
    }
    EntityRecord r = entity_from_json(e);
    out.emplace(r.qid, std::move(r));
  }
  return out;
}

}  // namespace dhbb
