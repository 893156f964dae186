#ifndef DHBB_LINKER_H_
#define DHBB_LINKER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/config.h"
#include "dhbb/corpus.h"
#include "dhbb/error.h"
#include "dhbb/normalize.h"
#include "dhbb/sitelink_index.h"
#include "dhbb/types.h"
#include "dhbb/wd_client.h"
#include "dhbb/wikidata.h"

namespace dhbb {

class MappingStore;

enum class LinkerErrc { kMissingEntityRecord, kBadDecision };
std::string_view to_string(LinkerErrc code);
using LinkerError = CodedError<LinkerErrc>;

enum class CandidateSource { kSitelink, kRedirect, kSearch, kAcronym, kFuzzy };
std::string_view to_string(CandidateSource source);
std::optional<CandidateSource> parse_candidate_source(std::string_view text);

struct Penalty {
  std::string reason;
  double amount = 0;

  bool operator==(const Penalty &) const = default;
};

struct Candidate {
  Qid qid;
  CandidateSource source = CandidateSource::kSearch;
  double raw_score = 0;
  std::vector<Penalty> penalties;
  std::vector<std::string> evidence;
  // Filled from the entity record when one was fetched; display only.
  std::string label;
  std::string description;

  double final_score() const;
  bool operator==(const Candidate &) const = default;
};

// Final score descending, then numeric QID ascending. Total order.
void sort_candidates(std::vector<Candidate> &cands);

enum class LinkStatus { kAutoMapped, kAmbiguous, kNotFound };
std::string_view to_string(LinkStatus status);
std::optional<LinkStatus> parse_link_status(std::string_view text);

struct LinkDecision {
  std::int64_t entry_id = 0;
  LinkStatus status = LinkStatus::kNotFound;
  std::optional<Qid> chosen;
  std::vector<Candidate> candidates;
  std::vector<std::string> reasons;

  bool operator==(const LinkDecision &) const = default;
};

std::string decision_to_json(const LinkDecision &decision);
LinkDecision decision_from_json(std::string_view json);

struct WikiIndex {
  std::string wiki;
  std::shared_ptr<const SitelinkIndex> index;  // null when not loaded
};
using IndexSet = std::vector<WikiIndex>;

// Diagnostics collected while generating candidates. Reason tags end up on
// the decision and from there in the gap report.
struct GenerationTrace {
  std::size_t search_hits = 0;
  std::size_t unmatched_hits = 0;
  std::vector<std::string> warnings;
};

// Token-aligned fuzzy match on folded forms: tokens must pair up one to one,
// and only tokens of at least `min_token_length` code points may differ.
// Returns the summed edit distance when it is in 1..max_edits.
std::optional<int> fuzzy_title_distance(std::string_view a, std::string_view b, int max_edits,
                                        int min_token_length);

// `client` may be null (index-only run).
std::vector<Candidate> generate_candidates(const TitleForms &forms, Nature nature,
                                           const IndexSet &indexes, EntityService *client,
                                           const LinkerConfig &config,
                                           GenerationTrace *trace = nullptr);

// Removes disambiguation items and (thematic) foreign organizations; demotes
// (biographical) candidates with a foreign citizenship. Never touches
// raw_score. `removed`, when given, receives one reason tag per removal.
std::vector<Candidate> filter_candidates(std::vector<Candidate> cands,
                                         const std::map<Qid, EntityRecord> &entities,
                                         Nature nature, const LinkerConfig &config,
                                         std::vector<std::string> *removed = nullptr);

LinkDecision score_and_decide(std::int64_t entry_id, std::vector<Candidate> cands,
                              const LinkerConfig &config);

// The whole chain for one entry.
LinkDecision link_entry(const Entry &entry, const IndexSet &indexes, EntityService *client,
                        const LinkerConfig &config);

struct NatureCoverage {
  std::size_t mapped = 0;
  std::size_t unmapped = 0;  // not_found
  std::size_t ambiguous = 0;
  std::size_t failed = 0;    // entries whose linking raised an error

  std::size_t total() const { return mapped + unmapped + ambiguous + failed; }
  double ratio() const { return total() ? static_cast<double>(mapped) / total() : 0.0; }
  bool operator==(const NatureCoverage &) const = default;
};

struct CoverageReport {
  NatureCoverage biographical;
  NatureCoverage thematic;

  const NatureCoverage &of(Nature nature) const;
  NatureCoverage &of(Nature nature);
  bool operator==(const CoverageReport &) const = default;
};

std::string render_coverage(const CoverageReport &report);

struct LinkRunOptions {
  bool force = false;  // relink entries that already have a stored decision
  int jobs = 1;
};

struct EntryFailure {
  std::int64_t entry_id = 0;
  std::string message;
};

struct LinkRunResult {
  std::vector<LinkDecision> decisions;  // entry-id order, failures omitted
  CoverageReport report;
  std::vector<EntryFailure> failures;
  std::size_t resumed = 0;  // decisions taken from the store
  std::size_t conflicts = 0;  // pipeline results refused by human records
};

// `store` may be null (nothing persisted, nothing resumed).
LinkRunResult link_corpus(std::span<const Entry> entries, const IndexSet &indexes,
                          EntityService *client, const LinkerConfig &config, MappingStore *store,
                          const LinkRunOptions &options = {});

CoverageReport coverage_of(std::span<const Entry> entries, std::span<const LinkDecision> decisions,
                           std::span<const EntryFailure> failures);

}  // namespace dhbb

#endif  // DHBB_LINKER_H_
