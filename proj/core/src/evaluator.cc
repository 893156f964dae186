#include "dhbb/evaluator.h"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "dhbb/tsv.h"

namespace dhbb {

std::string_view to_string(EvalErrc code) {
  switch (code) {
    case EvalErrc::kInconsistentVerdict: return "InconsistentVerdict";
    case EvalErrc::kMalformedRow: return "MalformedRow";
    case EvalErrc::kHeaderMismatch: return "HeaderMismatch";
  }
  return "EvalError";
}

std::string_view to_string(Stratum stratum) {
  switch (stratum) {
    case Stratum::kThematicMapped: return "thematic_mapped";
    case Stratum::kThematicUnmapped: return "thematic_unmapped";
    case Stratum::kBiographicalMapped: return "biographical_mapped";
    case Stratum::kBiographicalUnmapped: return "biographical_unmapped";
  }
  return "unknown";
}

std::optional<Stratum> parse_stratum(std::string_view text) {
  for (auto s : kAllStrata) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool is_mapped(Stratum s) {
  return s == Stratum::kThematicMapped || s == Stratum::kBiographicalMapped;
}

Nature nature_of(Stratum s) {
  return s == Stratum::kThematicMapped || s == Stratum::kThematicUnmapped ? Nature::kThematic
                                                                          : Nature::kBiographical;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kAutoCorrect: return "auto_correct";
    case Verdict::kAutoWrong: return "auto_wrong";
    case Verdict::kHumanFound: return "human_found";
    case Verdict::kHumanNotFound: return "human_not_found";
  }
  return "unknown";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (auto v : {Verdict::kAutoCorrect, Verdict::kAutoWrong, Verdict::kHumanFound,
                 Verdict::kHumanNotFound}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

void check_adjudication(const AdjudicationRecord &r) {
  bool auto_verdict = r.verdict == Verdict::kAutoCorrect || r.verdict == Verdict::kAutoWrong;
  if (auto_verdict != is_mapped(r.stratum)) {
    throw EvalError(EvalErrc::kInconsistentVerdict,
                    fmt::format("{}: {} in {}", r.entry_id, to_string(r.verdict), to_string(r.stratum)));
  }
  if (r.verdict == Verdict::kHumanFound && !r.found_qid) {
    throw EvalError(EvalErrc::kInconsistentVerdict,
                    fmt::format("{}: human_found without found_qid", r.entry_id));
  }
}

std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t (*next)(void *), void *state) {
  if (bound <= 1) return 0;
  // Largest multiple of bound that fits; draws at or above it are rejected.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  while (true) {
    std::uint64_t x = next(state);
    if (x < limit) return x % bound;
  }
}

std::optional<Stratum> stratum_of(const MappingStore &store, const MappingRecord &record) {
  bool mapped;
  if (auto d = store.decision(record.entry_id)) {
    if (d->status == LinkStatus::kAmbiguous) return std::nullopt;
    mapped = d->status == LinkStatus::kAutoMapped;
  } else if (record.status == RecordStatus::kUnreviewedAuto) {
    mapped = true;
  } else if (record.status == RecordStatus::kUnreviewedNotFound) {
    mapped = false;
  } else {
    return std::nullopt;
  }
  if (record.nature == Nature::kThematic) {
    return mapped ? Stratum::kThematicMapped : Stratum::kThematicUnmapped;
  }
  return mapped ? Stratum::kBiographicalMapped : Stratum::kBiographicalUnmapped;
}

SamplePlan stratified_sample(const std::map<Stratum, std::vector<std::int64_t>> &population,
                             std::size_t per_stratum, std::uint64_t seed) {
  SamplePlan plan;
  plan.seed = seed;
  plan.per_stratum = per_stratum;
  for (Stratum s : kAllStrata) {
    std::vector<std::int64_t> pool;
    if (auto it = population.find(s); it != population.end()) pool = it->second;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    plan.population[s] = pool.size();
    if (pool.empty()) plan.warnings.push_back("EmptyStratum:" + std::string(to_string(s)));

    // One generator per stratum so a stratum's draw does not depend on the
    // sizes of the others.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    auto next = [](void *state) -> std::uint64_t { return (*static_cast<std::mt19937_64 *>(state))(); };

    std::size_t k = std::min(per_stratum, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + uniform_below(pool.size() - i, next, &rng);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    plan.entries[s] = std::move(pool);
  }
  return plan;
}

SamplePlan stratified_sample(const MappingStore &store, std::size_t per_stratum, std::uint64_t seed) {
  std::map<Stratum, std::vector<std::int64_t>> population;
  for (const auto &r : store.records()) {
    if (auto s = stratum_of(store, r)) population[*s].push_back(r.entry_id);
  }
  return stratified_sample(population, per_stratum, seed);
}

std::string Fraction::decimal(int digits) const {
  if (den == 0) return "n/a";
  std::uint64_t pow10 = 1;
  for (int i = 0; i < digits; ++i) pow10 *= 10;
  // Scale, divide, round half up. Exact when the expansion terminates.
  unsigned __int128 scaled = static_cast<unsigned __int128>(num) * pow10;
  auto q = static_cast<std::uint64_t>(scaled / den);
  auto rem = static_cast<std::uint64_t>(scaled % den);
  if (rem >= den - rem) ++q;
  std::string frac = fmt::format("{:0{}}", q % pow10, digits);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string whole = std::to_string(q / pow10);
  return frac.empty() ? whole : whole + "." + frac;
}

EvalReport compute_metrics(const std::vector<AdjudicationRecord> &adjudications) {
  EvalReport report;
  for (Stratum s : kAllStrata) report.strata[s] = {};
  for (const auto &a : adjudications) {
    check_adjudication(a);
    StratumMetrics &m = report.strata[a.stratum];
    ++m.sample_size;
    if (a.verdict == Verdict::kAutoWrong || a.verdict == Verdict::kHumanFound) ++m.hits;
  }
  for (auto &[s, m] : report.strata) {
    if (m.sample_size) m.rate = Fraction{m.hits, m.sample_size};
  }
  return report;
}

std::string render_report(const EvalReport &report) {
  auto rate = [](const StratumMetrics &m) { return m.rate ? m.rate->decimal() : std::string("n/a"); };
  std::string out = fmt::format("{:<14}{:>8}{:>12}{:>12}{:>10}{:>13}{:>13}\n", "nature", "mapped",
                                "auto_wrong", "error_rate", "unmapped", "human_found",
                                "recoverable");
  for (Nature n : {Nature::kThematic, Nature::kBiographical}) {
    const auto &mapped = report.strata.at(n == Nature::kThematic ? Stratum::kThematicMapped
                                                                 : Stratum::kBiographicalMapped);
    const auto &unmapped = report.strata.at(n == Nature::kThematic ? Stratum::kThematicUnmapped
                                                                   : Stratum::kBiographicalUnmapped);
    out += fmt::format("{:<14}{:>8}{:>12}{:>12}{:>10}{:>13}{:>13}\n", to_string(n),
                       mapped.sample_size, mapped.hits, rate(mapped), unmapped.sample_size,
                       unmapped.hits, rate(unmapped));
  }
  return out;
}

ApplyResult apply_adjudications(MappingStore &store,
                                const std::vector<AdjudicationRecord> &adjudications, bool force) {
  for (const auto &a : adjudications) check_adjudication(a);
  ApplyResult result;
  for (const auto &a : adjudications) {
    HumanDecision d;
    switch (a.verdict) {
      case Verdict::kAutoCorrect: d.verdict = HumanVerdict::kConfirm; break;
      case Verdict::kAutoWrong: d.verdict = HumanVerdict::kReject; break;
      case Verdict::kHumanFound: d.verdict = HumanVerdict::kManual; break;
      case Verdict::kHumanNotFound: d.verdict = HumanVerdict::kAbsent; break;
    }
    d.qid = a.found_qid;
    d.reviewer = a.adjudicator;
    d.note = a.note;
    d.force = force;
    UpsertResult r = store.apply_human(a.entry_id, d);
    if (r.conflict) {
      result.conflicts.push_back(a.entry_id);
    } else if (r.changed) {
      ++result.changed;
    } else {
      ++result.unchanged;
    }
  }
  return result;
}

const std::vector<std::string> &adjudication_columns() {
  static const std::vector<std::string> columns{"entry_id",  "stratum",     "verdict",
                                                "found_qid", "adjudicator", "note"};
  return columns;
}

std::string render_adjudications_tsv(const std::vector<AdjudicationRecord> &records) {
  std::string out = tsv::write_row(adjudication_columns());
  for (const auto &a : records) {
    out += tsv::write_row(tsv::Row{std::to_string(a.entry_id), std::string(to_string(a.stratum)),
                                   std::string(to_string(a.verdict)),
                                   a.found_qid ? tsv::Field(a.found_qid->str()) : std::nullopt,
                                   a.adjudicator, a.note});
  }
  return out;
}

std::vector<AdjudicationRecord> parse_adjudications_tsv(std::string_view data) {
  tsv::Reader reader(data);
  std::vector<AdjudicationRecord> out;
  // Extra trailing columns (the title and qid of a sample plan) are ignored,
  // so a filled-in plan can be imported as is.
  std::size_t width = 0;
  try {
    auto header = reader.next();
    const auto &want = adjudication_columns();
    bool ok = header && header->size() >= want.size();
    for (std::size_t i = 0; ok && i < want.size(); ++i) ok = (*header)[i] == want[i];
    if (!ok) throw EvalError(EvalErrc::kHeaderMismatch, "header must start with the adjudication columns");
    width = header->size();
  } catch (const tsv::TsvError &e) {
    throw EvalError(EvalErrc::kHeaderMismatch, e.detail());
  }
  while (true) {
    std::optional<tsv::Row> row;
    try {
      row = reader.next();
    } catch (const tsv::TsvError &e) {
      throw EvalError(EvalErrc::kMalformedRow, fmt::format("line {}: {}", e.line(), e.detail()));
    }
    if (!row) break;
    auto bad = [&](std::string_view what) {
      return EvalError(EvalErrc::kMalformedRow, fmt::format("line {}: {}", reader.line(), what));
    };
    if (row->size() != width) throw bad("wrong field count");
    const auto &f = *row;
    AdjudicationRecord a;
    if (!f[0]) throw bad("missing entry_id");
    auto [p, ec] = std::from_chars(f[0]->data(), f[0]->data() + f[0]->size(), a.entry_id);
    if (ec != std::errc() || p != f[0]->data() + f[0]->size()) throw bad("bad entry_id");
    auto stratum = f[1] ? parse_stratum(*f[1]) : std::nullopt;
    if (!stratum) throw bad("bad stratum");
    a.stratum = *stratum;
    auto verdict = f[2] ? parse_verdict(*f[2]) : std::nullopt;
    if (!verdict) throw bad("bad verdict");
    a.verdict = *verdict;
    if (f[3]) {
      a.found_qid = Qid::parse(*f[3]);
      if (!a.found_qid) throw bad("bad found_qid");
    }
    a.adjudicator = f[4].value_or("");
    a.note = f[5];
    out.push_back(std::move(a));
  }
  return out;
}

std::string render_plan_tsv(const SamplePlan &plan, const MappingStore &store) {
  std::vector<std::string> header = adjudication_columns();
  header.push_back("title");
  header.push_back("qid");
  std::string out = tsv::write_row(header);
  for (const auto &[stratum, ids] : plan.entries) {
    for (auto id : ids) {
      auto r = store.record(id);
      tsv::Row row{std::to_string(id), std::string(to_string(stratum)), std::nullopt, std::nullopt,
                   std::nullopt, std::nullopt};
      row.push_back(r ? tsv::Field(r->title) : std::nullopt);
      row.push_back(r && r->qid ? tsv::Field(r->qid->str()) : std::nullopt);
      out += tsv::write_row(row);
    }
  }
  return out;
}

}  // namespace dhbb
