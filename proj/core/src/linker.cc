#include "dhbb/linker.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "dhbb/mapping_store.h"
#include "dhbb/text.h"
#include "json.hpp"

namespace dhbb {

namespace {

// Score comparisons tolerate float noise such as 1.0 - 0.9 < 0.1.
constexpr double kEpsilon = 1e-9;

}  // namespace

std::string_view to_string(LinkerErrc code) {
  switch (code) {
    case LinkerErrc::kMissingEntityRecord: return "MissingEntityRecord";
    case LinkerErrc::kBadDecision: return "BadDecision";
  }
  return "LinkerError";
}

std::string_view to_string(CandidateSource source) {
  switch (source) {
    case CandidateSource::kSitelink: return "sitelink";
    case CandidateSource::kRedirect: return "redirect";
    case CandidateSource::kSearch: return "search";
    case CandidateSource::kAcronym: return "acronym";
    case CandidateSource::kFuzzy: return "fuzzy";
  }
  return "unknown";
}

std::optional<CandidateSource> parse_candidate_source(std::string_view text) {
  for (auto s : {CandidateSource::kSitelink, CandidateSource::kRedirect, CandidateSource::kSearch,
                 CandidateSource::kAcronym, CandidateSource::kFuzzy}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(LinkStatus status) {
  switch (status) {
    case LinkStatus::kAutoMapped: return "auto_mapped";
    case LinkStatus::kAmbiguous: return "ambiguous";
    case LinkStatus::kNotFound: return "not_found";
  }
  return "unknown";
}

std::optional<LinkStatus> parse_link_status(std::string_view text) {
  for (auto s : {LinkStatus::kAutoMapped, LinkStatus::kAmbiguous, LinkStatus::kNotFound}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

double Candidate::final_score() const {
  double score = raw_score;
  for (const auto &p : penalties) score -= p.amount;
  return std::clamp(score, 0.0, 1.0);
}

void sort_candidates(std::vector<Candidate> &cands) {
  std::sort(cands.begin(), cands.end(), [](const Candidate &a, const Candidate &b) {
    double fa = a.final_score(), fb = b.final_score();
    if (std::abs(fa - fb) > kEpsilon) return fa > fb;
    return a.qid < b.qid;
  });
}

// --- serialization ---------------------------------------------------------

std::string decision_to_json(const LinkDecision &d) {
  nlohmann::ordered_json j;
  j["entry_id"] = d.entry_id;
  j["status"] = to_string(d.status);
  j["chosen"] = d.chosen ? nlohmann::ordered_json(d.chosen->str()) : nlohmann::ordered_json();
  auto &cands = j["candidates"] = nlohmann::ordered_json::array();
  for (const auto &c : d.candidates) {
    nlohmann::ordered_json cj;
    cj["qid"] = c.qid.str();
    cj["source"] = to_string(c.source);
    cj["raw_score"] = c.raw_score;
    cj["final_score"] = c.final_score();
    auto &pens = cj["penalties"] = nlohmann::ordered_json::array();
    for (const auto &p : c.penalties) pens.push_back({{"reason", p.reason}, {"amount", p.amount}});
    cj["evidence"] = c.evidence;
    cj["label"] = c.label;
    cj["description"] = c.description;
    cands.push_back(std::move(cj));
  }
  j["reasons"] = d.reasons;
  return j.dump();
}

LinkDecision decision_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    LinkDecision d;
    d.entry_id = j.at("entry_id").get<std::int64_t>();
    auto status = parse_link_status(j.at("status").get<std::string>());
    if (!status) throw LinkerError(LinkerErrc::kBadDecision, "unknown status");
    d.status = *status;
    if (!j.at("chosen").is_null()) d.chosen = Qid::from_string(j.at("chosen").get<std::string>());
    for (const auto &cj : j.at("candidates")) {
      Candidate c;
      c.qid = Qid::from_string(cj.at("qid").get<std::string>());
      auto source = parse_candidate_source(cj.at("source").get<std::string>());
      if (!source) throw LinkerError(LinkerErrc::kBadDecision, "unknown candidate source");
      c.source = *source;
      c.raw_score = cj.at("raw_score").get<double>();
      for (const auto &pj : cj.at("penalties")) {
        c.penalties.push_back({pj.at("reason").get<std::string>(), pj.at("amount").get<double>()});
      }
      c.evidence = cj.at("evidence").get<std::vector<std::string>>();
      c.label = cj.value("label", "");
      c.description = cj.value("description", "");
      d.candidates.push_back(std::move(c));
    }
    d.reasons = j.at("reasons").get<std::vector<std::string>>();
    return d;
  } catch (const nlohmann::json::exception &e) {
    throw LinkerError(LinkerErrc::kBadDecision, e.what());
  } catch (const std::invalid_argument &e) {
    throw LinkerError(LinkerErrc::kBadDecision, e.what());
  }
}

// --- candidate generation ---------------------------------------------------

std::optional<int> fuzzy_title_distance(std::string_view a, std::string_view b, int max_edits,
                                        int min_token_length) {
  auto ta = text::split_whitespace(fold_diacritics(a));
  auto tb = text::split_whitespace(fold_diacritics(b));
  if (ta.size() != tb.size() || ta.empty()) return std::nullopt;
  int total = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    auto min_len = static_cast<std::size_t>(std::max(min_token_length, 0));
    if (text::code_point_count(ta[i]) < min_len || text::code_point_count(tb[i]) < min_len) {
      return std::nullopt;
    }
    auto d = bounded_edit_distance(ta[i], tb[i], max_edits - total);
    if (!d) return std::nullopt;
    total += *d;
  }
  if (total == 0) return std::nullopt;
  return total;
}

namespace {

class CandidatePool {
 public:
  void add(Qid qid, CandidateSource source, double raw, std::string evidence) {
    raw = std::clamp(raw, 0.0, 1.0);
    auto [it, inserted] = by_qid_.try_emplace(qid);
    Candidate &c = it->second;
    if (inserted) {
      c.qid = qid;
      c.source = source;
      c.raw_score = raw;
    } else if (raw > c.raw_score + kEpsilon) {
      c.source = source;
      c.raw_score = raw;
    }
    if (std::find(c.evidence.begin(), c.evidence.end(), evidence) == c.evidence.end()) {
      c.evidence.push_back(std::move(evidence));
    }
  }

  std::vector<Candidate> take() {
    std::vector<Candidate> out;
    out.reserve(by_qid_.size());
    for (auto &[qid, c] : by_qid_) out.push_back(std::move(c));
    sort_candidates(out);
    return out;
  }

 private:
  std::map<Qid, Candidate> by_qid_;
};

struct Form {
  std::string text;
  double decrement = 0;
  bool base = false;
  std::string label;  // "" for the canonical title, "variant N" otherwise
};

std::string tagged(const Form &form, std::string evidence) {
  if (form.label.empty()) return evidence;
  return form.label + ": " + evidence;
}

bool folded_equal(std::string_view a, std::string_view b) {
  return text::collapse_whitespace(fold_diacritics(a)) ==
         text::collapse_whitespace(fold_diacritics(b));
}

// Searches in the primary language and, when that returns nothing, in the
// fallback language.
std::vector<SearchHit> search_with_fallback(EntityService &client, std::string_view query,
                                            const LinkerConfig &config, std::string *language) {
  *language = config.search_language;
  auto hits = client.search_entities(query, config.search_language, config.search_limit);
  if (hits.empty() && !config.search_fallback_language.empty() &&
      config.search_fallback_language != config.search_language) {
    *language = config.search_fallback_language;
    hits = client.search_entities(query, config.search_fallback_language, config.search_limit);
  }
  return hits;
}

}  // namespace

std::vector<Candidate> generate_candidates(const TitleForms &forms, Nature nature,
                                           const IndexSet &indexes, EntityService *client,
                                           const LinkerConfig &config, GenerationTrace *trace) {
  GenerationTrace local;
  if (!trace) trace = &local;
  const ScoreTable &s = config.scores;

  std::vector<Form> all;
  all.push_back({forms.canonical, 0, false, ""});
  if (forms.base != forms.canonical && !forms.base.empty()) {
    all.push_back({forms.base, 0, true, "base"});
  }
  if (nature == Nature::kBiographical) {
    int rank = 0;
    for (const auto &v : forms.variants) {
      if (v == forms.canonical) continue;
      ++rank;
      all.push_back({v, s.variant_decrement * rank, false, "variant " + std::to_string(rank)});
    }
  }

  for (const auto &wi : indexes) {
    if (!wi.index) trace->warnings.push_back("index_missing:" + wi.wiki);
  }

  CandidatePool pool;
  struct Pending {
    const Form *form;
    std::string language;
    SearchHit hit;
  };
  std::vector<Pending> unmatched;

  for (const auto &form : all) {
    for (const auto &wi : indexes) {
      if (!wi.index) continue;
      Resolution r = wi.index->resolve(form.text);
      if (r.status == ResolveStatus::kFound && r.qid) {
        if (r.hops == 0) {
          double raw = form.base ? s.sitelink_base : s.sitelink;
          pool.add(*r.qid, CandidateSource::kSitelink, raw - form.decrement,
                   tagged(form, "sitelink " + wi.wiki + ": " + r.path.back()));
        } else {
          pool.add(*r.qid, CandidateSource::kRedirect, s.redirect - form.decrement,
                   tagged(form, "redirect " + wi.wiki + ": " + r.path.front() + " -> " +
                                    r.path.back()));
        }
      } else if (r.status == ResolveStatus::kCycle || r.status == ResolveStatus::kTooManyHops) {
        trace->warnings.push_back(std::string(to_string(r.status)) + ":" + wi.wiki + ":" +
                                  SitelinkIndex::normalize_title(form.text));
      }
    }

    if (!client) continue;
    std::string language;
    auto hits = search_with_fallback(*client, form.text, config, &language);
    trace->search_hits += hits.size();
    for (auto &hit : hits) {
      bool on_match = folded_equal(hit.match_text, form.text);
      if (on_match || folded_equal(hit.label, form.text)) {
        std::string kind = on_match && !hit.match_type.empty() ? hit.match_type : "label";
        pool.add(hit.qid, CandidateSource::kSearch, s.search - form.decrement,
                 tagged(form, "search " + language + " " + kind + ": " +
                                  (on_match ? hit.match_text : hit.label)));
      } else {
        unmatched.push_back({&form, language, std::move(hit)});
      }
    }
  }

  if (client && forms.acronym) {
    std::string language;
    auto hits = search_with_fallback(*client, *forms.acronym, config, &language);
    trace->search_hits += hits.size();
    for (const auto &hit : hits) {
      if (folded_equal(hit.match_text, *forms.acronym) || folded_equal(hit.label, *forms.acronym)) {
        pool.add(hit.qid, CandidateSource::kAcronym, s.acronym,
                 "acronym search " + language + ": " + *forms.acronym);
      }
    }
  }

  for (const auto &p : unmatched) {
    std::optional<int> best;
    std::string matched;
    for (const std::string *candidate_text : {&p.hit.match_text, &p.hit.label}) {
      if (candidate_text->empty()) continue;
      auto d = fuzzy_title_distance(p.form->text, *candidate_text, config.fuzzy_max_edits,
                                    config.fuzzy_min_token_length);
      if (d && (!best || *d < *best)) {
        best = d;
        matched = *candidate_text;
      }
    }
    if (best) {
      pool.add(p.hit.qid, CandidateSource::kFuzzy, s.fuzzy - p.form->decrement,
               tagged(*p.form, fmt::format("fuzzy {}: {} ~ {} ({} edit{})", p.language,
                                           p.form->text, matched, *best, *best == 1 ? "" : "s")));
    } else {
      ++trace->unmatched_hits;
    }
  }

  return pool.take();
}

// --- filtering and decision -------------------------------------------------

namespace {

bool contains(const std::vector<Qid> &qids, Qid q) {
  return std::find(qids.begin(), qids.end(), q) != qids.end();
}

}  // namespace

std::vector<Candidate> filter_candidates(std::vector<Candidate> cands,
                                         const std::map<Qid, EntityRecord> &entities,
                                         Nature nature, const LinkerConfig &config,
                                         std::vector<std::string> *removed) {
  std::vector<Candidate> kept;
  kept.reserve(cands.size());
  for (auto &c : cands) {
    auto it = entities.find(c.qid);
    if (it == entities.end()) throw LinkerError(LinkerErrc::kMissingEntityRecord, c.qid.str());
    const EntityRecord &e = it->second;

    bool disambiguation = false;
    if (e.instance_of) {
      for (Qid cls : *e.instance_of) disambiguation |= contains(config.disambiguation_class_qids, cls);
    }
    if (disambiguation) {
      if (removed) removed->push_back("filtered_disambiguation:" + c.qid.str());
      continue;
    }
    if (config.brazil_qid && nature == Nature::kThematic && e.country && !e.country->empty() &&
        !contains(*e.country, *config.brazil_qid)) {
      if (removed) removed->push_back("filtered_foreign_country:" + c.qid.str());
      continue;
    }
    if (config.brazil_qid && nature == Nature::kBiographical && e.citizenship &&
        !e.citizenship->empty() && !contains(*e.citizenship, *config.brazil_qid)) {
      c.penalties.push_back({"foreign_citizenship", config.scores.foreign_citizenship_penalty});
    }
    kept.push_back(std::move(c));
  }
  sort_candidates(kept);
  return kept;
}

LinkDecision score_and_decide(std::int64_t entry_id, std::vector<Candidate> cands,
                              const LinkerConfig &config) {
  LinkDecision d;
  d.entry_id = entry_id;
  sort_candidates(cands);
  if (cands.empty()) {
    d.status = LinkStatus::kNotFound;
    d.reasons.push_back("no_candidates");
    return d;
  }
  double top = cands[0].final_score();
  bool confident = top >= config.accept_threshold - kEpsilon;
  bool separated = cands.size() == 1 || top - cands[1].final_score() >= config.ambiguity_margin - kEpsilon;
  if (confident && separated) {
    d.status = LinkStatus::kAutoMapped;
    d.chosen = cands[0].qid;
  } else {
    d.status = LinkStatus::kAmbiguous;
    if (!confident) d.reasons.push_back("below_threshold");
    if (!separated) d.reasons.push_back("narrow_margin");
  }
  d.candidates = std::move(cands);
  return d;
}

LinkDecision link_entry(const Entry &entry, const IndexSet &indexes, EntityService *client,
                        const LinkerConfig &config) {
  TitleForms forms = derive_forms(entry.title, entry.nature);
  GenerationTrace trace;
  auto cands = generate_candidates(forms, entry.nature, indexes, client, config, &trace);

  std::vector<std::string> extra;
  if (!client) {
    extra.push_back("no_remote_search");
  } else if (!cands.empty()) {
    std::vector<Qid> qids;
    for (const auto &c : cands) qids.push_back(c.qid);
    EntityFetch fetched = client->fetch_entities(qids);
    std::vector<Candidate> present;
    for (auto &c : cands) {
      auto it = fetched.found.find(c.qid);
      if (it == fetched.found.end()) {
        extra.push_back("entity_missing:" + c.qid.str());
        continue;
      }
      std::vector<std::string> languages{config.search_language, config.search_fallback_language};
      c.label = it->second.label_in(languages);
      for (const auto &lang : languages) {
        auto d = it->second.descriptions.find(lang);
        if (d != it->second.descriptions.end()) {
          c.description = d->second;
          break;
        }
      }
      present.push_back(std::move(c));
    }
    cands = filter_candidates(std::move(present), fetched.found, entry.nature, config, &extra);
  }

  LinkDecision d = score_and_decide(entry.id, std::move(cands), config);
  if (d.status == LinkStatus::kNotFound && trace.unmatched_hits > 0) {
    d.reasons.push_back("possible_sub_concept");
  }
  d.reasons.insert(d.reasons.end(), extra.begin(), extra.end());
  d.reasons.insert(d.reasons.end(), trace.warnings.begin(), trace.warnings.end());
  return d;
}

// --- corpus runs -------------------------------------------------------------

const NatureCoverage &CoverageReport::of(Nature nature) const {
  return nature == Nature::kBiographical ? biographical : thematic;
}

NatureCoverage &CoverageReport::of(Nature nature) {
  return nature == Nature::kBiographical ? biographical : thematic;
}

std::string render_coverage(const CoverageReport &r) {
  std::string out = fmt::format("{:<14}{:>8}{:>11}{:>11}{:>8}{:>8}{:>10}\n", "nature", "mapped",
                                "ambiguous", "not_found", "failed", "total", "coverage");
  auto row = [&](std::string_view name, const NatureCoverage &c) {
    out += fmt::format("{:<14}{:>8}{:>11}{:>11}{:>8}{:>8}{:>10.4f}\n", name, c.mapped, c.ambiguous,
                       c.unmapped, c.failed, c.total(), c.ratio());
  };
  row("biographical", r.biographical);
  row("thematic", r.thematic);
  NatureCoverage all{r.biographical.mapped + r.thematic.mapped,
                     r.biographical.unmapped + r.thematic.unmapped,
                     r.biographical.ambiguous + r.thematic.ambiguous,
                     r.biographical.failed + r.thematic.failed};
  row("total", all);
  return out;
}

CoverageReport coverage_of(std::span<const Entry> entries, std::span<const LinkDecision> decisions,
                           std::span<const EntryFailure> failures) {
  std::map<std::int64_t, Nature> nature_of;
  for (const auto &e : entries) nature_of[e.id] = e.nature;
  CoverageReport report;
  for (const auto &d : decisions) {
    auto it = nature_of.find(d.entry_id);
    if (it == nature_of.end()) continue;
    NatureCoverage &c = report.of(it->second);
    switch (d.status) {
      case LinkStatus::kAutoMapped: ++c.mapped; break;
      case LinkStatus::kAmbiguous: ++c.ambiguous; break;
      case LinkStatus::kNotFound: ++c.unmapped; break;
    }
  }
  for (const auto &f : failures) {
    auto it = nature_of.find(f.entry_id);
    if (it != nature_of.end()) ++report.of(it->second).failed;
  }
  return report;
}

LinkRunResult link_corpus(std::span<const Entry> entries, const IndexSet &indexes,
                          EntityService *client, const LinkerConfig &config, MappingStore *store,
                          const LinkRunOptions &options) {
  std::vector<std::optional<LinkDecision>> decisions(entries.size());
  std::vector<std::optional<std::string>> errors(entries.size());
  std::atomic<std::size_t> next{0}, resumed{0}, conflicts{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      const Entry &entry = entries[i];
      try {
        if (store && !options.force) {
          if (auto stored = store->decision(entry.id)) {
            decisions[i] = std::move(stored);
            ++resumed;
            continue;
          }
        }
        LinkDecision d = link_entry(entry, indexes, client, config);
        if (store && store->upsert_decision(entry, d).conflict) ++conflicts;
        decisions[i] = std::move(d);
      } catch (const std::exception &e) {
        errors[i] = e.what();
      }
    }
  };

  int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  LinkRunResult result;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (decisions[i]) result.decisions.push_back(std::move(*decisions[i]));
    if (errors[i]) result.failures.push_back({entries[i].id, *errors[i]});
  }
  std::sort(result.decisions.begin(), result.decisions.end(),
            [](const LinkDecision &a, const LinkDecision &b) { return a.entry_id < b.entry_id; });
  result.report = coverage_of(entries, result.decisions, result.failures);
  result.resumed = resumed;
  result.conflicts = conflicts;
  return result;
}

}  // namespace dhbb
