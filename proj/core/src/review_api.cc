#include "dhbb/review_api.h"

#include <charconv>

#include "dhbb/normalize.h"
#include "json.hpp"

namespace dhbb {

namespace {

using json = nlohmann::ordered_json;

ReviewResponse reply(int status, const json &body) { return {status, body.dump()}; }

ReviewResponse error(int status, std::string_view message) {
  return reply(status, json{{"error", message}});
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

json optional_string(const std::optional<std::string> &s) { return s ? json(*s) : json(); }

json record_json(const MappingRecord &r) {
  return json{{"entry_id", r.entry_id},
              {"title", r.title},
              {"nature", to_string(r.nature)},
              {"qid", r.qid ? json(r.qid->str()) : json()},
              {"status", to_string(r.status)},
              {"confidence", r.confidence},
              {"provenance", to_string(r.provenance)},
              {"reviewer", optional_string(r.reviewer)},
              {"updated_at", format_timestamp(r.updated_at)},
              {"note", optional_string(r.note)}};
}

std::string wikidata_url(Qid q) { return "https://www.wikidata.org/wiki/" + q.str(); }

json candidates_json(const std::optional<LinkDecision> &d) {
  json out = json::array();
  if (!d) return out;
  for (const auto &c : d->candidates) {
    json penalties = json::array();
    for (const auto &p : c.penalties) penalties.push_back({{"reason", p.reason}, {"amount", p.amount}});
    out.push_back({{"qid", c.qid.str()},
                   {"label", c.label},
                   {"description", c.description},
                   {"score", c.final_score()},
                   {"raw_score", c.raw_score},
                   {"source", to_string(c.source)},
                   {"penalties", penalties},
                   {"evidence", c.evidence},
                   {"url", wikidata_url(c.qid)}});
  }
  return out;
}

json entry_summary(const Entry *e, const MappingRecord &r) {
  return json{{"id", r.entry_id},
              {"title", r.title},
              {"nature", to_string(r.nature)},
              {"first_sentence", e ? first_sentence(e->body) : std::string()},
              {"source_path", e ? e->source_path : std::string()}};
}

bool is_mapped(RecordStatus s) {
  return s == RecordStatus::kUnreviewedAuto || s == RecordStatus::kConfirmed ||
         s == RecordStatus::kManual;
}

bool is_reviewed(RecordStatus s) {
  return s != RecordStatus::kUnreviewedAuto && s != RecordStatus::kUnreviewedAmbiguous &&
         s != RecordStatus::kUnreviewedNotFound;
}

}  // namespace

ReviewApi::ReviewApi(MappingStore &store, const std::vector<Entry> &entries,
                     std::optional<std::string> token)
    : store_(store), entries_(entries), token_(std::move(token)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) by_id_[entries_[i].id] = i;
}

const Entry *ReviewApi::find(std::int64_t id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

ReviewResponse ReviewApi::handle(const ReviewRequest &request) const {
  try {
    const std::string &path = request.path;
    if (path == "/api/stats") {
      if (request.method != "GET") return error(405, "method not allowed");
      return stats();
    }
    if (path == "/api/queue") {
      if (request.method != "GET") return error(405, "method not allowed");
      return queue(request);
    }
    constexpr std::string_view kEntries = "/api/entries/";
    if (path.rfind(kEntries, 0) == 0) {
      std::string_view rest = std::string_view(path).substr(kEntries.size());
      constexpr std::string_view kDecision = "/decision";
      bool decision = rest.size() > kDecision.size() &&
                      rest.substr(rest.size() - kDecision.size()) == kDecision;
      if (decision) rest.remove_suffix(kDecision.size());
      auto id = to_int(rest);
      if (!id) return error(404, "not found");
      if (decision) {
        if (request.method != "POST") return error(405, "method not allowed");
        if (token_) {
          auto it = request.headers.find(kTokenHeader);
          if (it == request.headers.end() || it->second != *token_) return error(401, "bad token");
        }
        return decide(*id, request);
      }
      if (request.method != "GET") return error(405, "method not allowed");
      return entry(*id);
    }
    return error(404, "not found");
  } catch (const StoreError &e) {
    return error(503, e.what());
  }
}

ReviewResponse ReviewApi::stats() const {
  json coverage = json::object();
  json statuses = json::object();
  std::size_t reviewed = 0, total = 0;
  auto counts = store_.status_counts();
  for (Nature n : {Nature::kBiographical, Nature::kThematic}) {
    std::size_t mapped = 0, ambiguous = 0, unmapped = 0;
    json by_status = json::object();
    for (RecordStatus s : kAllRecordStatuses) {
      auto it = counts.find({n, s});
      std::size_t c = it == counts.end() ? 0 : it->second;
      by_status[std::string(to_string(s))] = c;
      if (is_mapped(s)) {
        mapped += c;
      } else if (s == RecordStatus::kUnreviewedAmbiguous) {
        ambiguous += c;
      } else {
        unmapped += c;
      }
      if (is_reviewed(s)) reviewed += c;
      total += c;
    }
    std::size_t sum = mapped + ambiguous + unmapped;
    coverage[std::string(to_string(n))] = {{"mapped", mapped},
                                           {"ambiguous", ambiguous},
                                           {"unmapped", unmapped},
                                           {"total", sum},
                                           {"ratio", sum ? static_cast<double>(mapped) / sum : 0.0}};
    statuses[std::string(to_string(n))] = by_status;
  }
  return reply(200, json{{"coverage", coverage},
                         {"statuses", statuses},
                         {"review", {{"reviewed", reviewed}, {"total", total}}}});
}

ReviewResponse ReviewApi::queue(const ReviewRequest &request) const {
  std::optional<RecordStatus> status;
  if (auto it = request.query.find("status"); it != request.query.end() && !it->second.empty()) {
    status = parse_record_status(it->second);
    if (!status) return error(400, "unknown status");
  }
  std::int64_t page = 1, page_size = kDefaultPageSize;
  if (auto it = request.query.find("page"); it != request.query.end()) {
    auto v = to_int(it->second);
    if (!v || *v < 1) return error(400, "bad page");
    page = *v;
  }
  if (auto it = request.query.find("page_size"); it != request.query.end()) {
    auto v = to_int(it->second);
    if (!v || *v < 1 || *v > static_cast<std::int64_t>(kMaxPageSize)) return error(400, "bad page_size");
    page_size = *v;
  }
  QueuePage q = store_.queue(status, static_cast<std::size_t>((page - 1) * page_size),
                             static_cast<std::size_t>(page_size));
  json items = json::array();
  for (const auto &r : q.records) {
    items.push_back({{"entry", entry_summary(find(r.entry_id), r)},
                     {"record", record_json(r)},
                     {"candidates", candidates_json(store_.decision(r.entry_id))}});
  }
  return reply(200, json{{"status", status ? json(to_string(*status)) : json()},
                         {"page", page},
                         {"page_size", page_size},
                         {"total", q.total},
                         {"items", items}});
}

ReviewResponse ReviewApi::entry(std::int64_t id) const {
  auto record = store_.record(id);
  const Entry *e = find(id);
  if (!record && !e) return error(404, "unknown entry");

  MappingRecord shown;
  if (record) {
    shown = *record;
  } else {
    shown.entry_id = e->id;
    shown.title = e->title;
    shown.nature = e->nature;
  }
  TitleForms forms = derive_forms(shown.title, shown.nature);
  auto decision = store_.decision(id);
  json decision_json;
  if (decision) {
    decision_json = {{"status", to_string(decision->status)},
                     {"chosen", decision->chosen ? json(decision->chosen->str()) : json()},
                     {"reasons", decision->reasons}};
  }
  return reply(200, json{{"entry", entry_summary(e, shown)},
                         {"forms",
                          {{"canonical", forms.canonical},
                           {"base", forms.base},
                           {"acronym", optional_string(forms.acronym)},
                           {"folded", forms.folded},
                           {"variants", forms.variants}}},
                         {"record", record ? record_json(*record) : json()},
                         {"decision", decision_json},
                         {"candidates", candidates_json(decision)}});
}

ReviewResponse ReviewApi::decide(std::int64_t id, const ReviewRequest &request) const {
  json body = json::parse(request.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) return error(400, "body must be a JSON object");
  if (!body.contains("verdict") || !body["verdict"].is_string()) return error(400, "verdict required");
  auto verdict = parse_human_verdict(body["verdict"].get<std::string>());
  if (!verdict) return error(400, "verdict must be confirm, reject, manual or absent");

  HumanDecision d;
  d.verdict = *verdict;
  auto text = [&](const char *key) -> std::optional<std::string> {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    if (!body[key].is_string()) throw std::invalid_argument(key);
    return body[key].get<std::string>();
  };
  try {
    if (auto q = text("qid")) {
      d.qid = Qid::parse(*q);
      if (!d.qid) return error(400, "bad qid");
    }
    d.reviewer = text("reviewer");
    d.note = text("note");
  } catch (const std::invalid_argument &e) {
    return error(400, std::string(e.what()) + " must be a string");
  }
  if (!store_.record(id)) return error(404, "unknown entry");

  try {
    UpsertResult r = store_.apply_human(id, d);
    if (r.conflict) {
      return reply(409, json{{"error", "conflict"}, {"record", record_json(r.record)}});
    }
    return reply(200, json{{"changed", r.changed}, {"record", record_json(r.record)}});
  } catch (const StoreError &e) {
    if (e.code() == StoreErrc::kInvalidDecision) return error(400, e.detail());
    if (e.code() == StoreErrc::kUnknownEntry) return error(404, "unknown entry");
    throw;
  }
}

}  // namespace dhbb
