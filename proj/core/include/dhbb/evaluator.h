#ifndef DHBB_EVALUATOR_H_
#define DHBB_EVALUATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/error.h"
#include "dhbb/mapping_store.h"
#include "dhbb/types.h"

namespace dhbb {

enum class EvalErrc { kInconsistentVerdict, kMalformedRow, kHeaderMismatch };
std::string_view to_string(EvalErrc code);
using EvalError = CodedError<EvalErrc>;

enum class Stratum { kThematicMapped, kThematicUnmapped, kBiographicalMapped, kBiographicalUnmapped };
std::string_view to_string(Stratum stratum);
std::optional<Stratum> parse_stratum(std::string_view text);
inline constexpr Stratum kAllStrata[] = {Stratum::kThematicMapped, Stratum::kThematicUnmapped,
                                         Stratum::kBiographicalMapped,
                                         Stratum::kBiographicalUnmapped};
bool is_mapped(Stratum stratum);
Nature nature_of(Stratum stratum);

enum class Verdict { kAutoCorrect, kAutoWrong, kHumanFound, kHumanNotFound };
std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view text);

struct AdjudicationRecord {
  std::int64_t entry_id = 0;
  Stratum stratum = Stratum::kThematicMapped;
  Verdict verdict = Verdict::kAutoCorrect;
  std::optional<Qid> found_qid;
  std::string adjudicator;
  std::optional<std::string> note;

  bool operator==(const AdjudicationRecord &) const = default;
};

// Throws EvalError(kInconsistentVerdict) naming the entry id.
void check_adjudication(const AdjudicationRecord &record);

// Uniform integer in [0, bound) by rejection sampling on 64-bit draws, so the
// result depends only on the generator stream (std distributions do not
// promise that across standard libraries).
std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t (*next)(void *), void *state);

struct SamplePlan {
  std::uint64_t seed = 0;
  std::size_t per_stratum = 25;
  std::map<Stratum, std::vector<std::int64_t>> entries;  // ascending ids
  std::map<Stratum, std::size_t> population;
  std::vector<std::string> warnings;  // EmptyStratum:<name>
};

// Ambiguous entries belong to no stratum.
std::optional<Stratum> stratum_of(const MappingStore &store, const MappingRecord &record);

SamplePlan stratified_sample(const std::map<Stratum, std::vector<std::int64_t>> &population,
                             std::size_t per_stratum, std::uint64_t seed);
SamplePlan stratified_sample(const MappingStore &store, std::size_t per_stratum, std::uint64_t seed);

// Exact rational with a decimal rendering that is exact whenever the
// expansion terminates within `digits` places (4/25 -> "0.16").
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  std::string decimal(int digits = 4) const;
  double value() const { return den ? static_cast<double>(num) / den : 0.0; }
  bool operator==(const Fraction &) const = default;
};

struct StratumMetrics {
  std::size_t sample_size = 0;
  std::size_t hits = 0;  // auto_wrong for mapped strata, human_found otherwise
  std::optional<Fraction> rate;  // absent for an empty stratum

  bool operator==(const StratumMetrics &) const = default;
};

struct EvalReport {
  std::map<Stratum, StratumMetrics> strata;  // always holds all four

  bool operator==(const EvalReport &) const = default;
};

EvalReport compute_metrics(const std::vector<AdjudicationRecord> &adjudications);
std::string render_report(const EvalReport &report);

struct ApplyResult {
  std::size_t changed = 0;
  std::size_t unchanged = 0;
  std::vector<std::int64_t> conflicts;
};

// auto_correct -> confirmed, auto_wrong -> rejected, human_found -> manual,
// human_not_found -> confirmed_absent; all with human provenance.
ApplyResult apply_adjudications(MappingStore &store,
                                const std::vector<AdjudicationRecord> &adjudications,
                                bool force = false);

const std::vector<std::string> &adjudication_columns();
std::string render_adjudications_tsv(const std::vector<AdjudicationRecord> &records);
// Columns after the adjudication ones (as in a plan file) are ignored.
std::vector<AdjudicationRecord> parse_adjudications_tsv(std::string_view data);

// Plan rows carry the adjudication columns with verdict left blank, plus
// title and current qid for the adjudicator.
std::string render_plan_tsv(const SamplePlan &plan, const MappingStore &store);

}  // namespace dhbb

#endif  // DHBB_EVALUATOR_H_
