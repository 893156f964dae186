#ifndef DHBB_MAPPING_STORE_H_
#define DHBB_MAPPING_STORE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/corpus.h"
#include "dhbb/error.h"
#include "dhbb/linker.h"
#include "dhbb/rate_limiter.h"
#include "dhbb/types.h"

namespace dhbb {

namespace sql {
class Database;
}

enum class StoreErrc {
  kStoreUnavailable,
  kHeaderMismatch,
  kMalformedRow,
  kUnknownEntry,
  kInvalidDecision,
};
std::string_view to_string(StoreErrc code);

class StoreError : public CodedError<StoreErrc> {
 public:
  StoreError(StoreErrc code, std::string detail, std::size_t line = 0)
      : CodedError(code, std::move(detail)), line_(line) {}
  // TSV line for kMalformedRow / kHeaderMismatch, 0 otherwise.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class RecordStatus {
  kUnreviewedAuto,
  kUnreviewedAmbiguous,
  kUnreviewedNotFound,
  kConfirmed,
  kRejected,
  kManual,
  kConfirmedAbsent,
};
std::string_view to_string(RecordStatus status);
std::optional<RecordStatus> parse_record_status(std::string_view text);
inline constexpr RecordStatus kAllRecordStatuses[] = {
    RecordStatus::kUnreviewedAuto, RecordStatus::kUnreviewedAmbiguous,
    RecordStatus::kUnreviewedNotFound, RecordStatus::kConfirmed,
    RecordStatus::kRejected, RecordStatus::kManual, RecordStatus::kConfirmedAbsent};

enum class Provenance { kPipeline, kHuman };
std::string_view to_string(Provenance provenance);
std::optional<Provenance> parse_provenance(std::string_view text);

struct MappingRecord {
  std::int64_t entry_id = 0;
  std::string title;
  Nature nature = Nature::kThematic;
  std::optional<Qid> qid;
  RecordStatus status = RecordStatus::kUnreviewedNotFound;
  double confidence = 0;
  Provenance provenance = Provenance::kPipeline;
  std::optional<std::string> reviewer;
  std::int64_t updated_at = 0;  // unix seconds, UTC
  std::optional<std::string> note;

  bool operator==(const MappingRecord &) const = default;
};

// Throws StoreError(kInvalidDecision) when the status/qid pairing is illegal.
void check_record(const MappingRecord &record);

// ISO-8601 UTC, second precision: 2024-05-01T12:00:00Z.
std::string format_timestamp(std::int64_t unix_seconds);
std::optional<std::int64_t> parse_timestamp(std::string_view text);

struct UpsertResult {
  MappingRecord record;   // the record as stored after the call
  bool changed = false;
  bool conflict = false;  // a human record refused the write
};

enum class HumanVerdict { kConfirm, kReject, kManual, kAbsent };
std::string_view to_string(HumanVerdict verdict);
std::optional<HumanVerdict> parse_human_verdict(std::string_view text);

struct HumanDecision {
  HumanVerdict verdict = HumanVerdict::kConfirm;
  std::optional<Qid> qid;  // required for manual; defaults to the record's for confirm/reject
  std::optional<std::string> reviewer;
  std::optional<std::string> note;
  bool force = false;  // overwrite a differing human record
};

struct QueuePage {
  std::vector<MappingRecord> records;
  std::size_t total = 0;
};

inline const std::vector<std::string> &tsv_columns() {
  static const std::vector<std::string> columns{
      "entry_id",   "title",      "nature",   "qid",        "status",
      "confidence", "provenance", "reviewer", "updated_at", "note"};
  return columns;
}

// Single-file SQLite store. All access goes through one connection guarded by
// a mutex, which doubles as the serialized writer.
class MappingStore {
 public:
  // `path` may be ":memory:". `clock` defaults to the system clock.
  explicit MappingStore(const std::string &path, std::shared_ptr<Clock> clock = nullptr);
  ~MappingStore();
  MappingStore(const MappingStore &) = delete;
  MappingStore &operator=(const MappingStore &) = delete;

  UpsertResult upsert_decision(const Entry &entry, const LinkDecision &decision);
  UpsertResult apply_human(std::int64_t entry_id, const HumanDecision &decision);

  std::optional<MappingRecord> record(std::int64_t entry_id) const;
  std::optional<LinkDecision> decision(std::int64_t entry_id) const;
  std::vector<MappingRecord> records() const;  // entry-id order
  std::size_t size() const;

  // Ordered by nature, then entry id. `status` nullopt means every record.
  QueuePage queue(std::optional<RecordStatus> status, std::size_t offset, std::size_t limit) const;
  std::map<std::pair<Nature, RecordStatus>, std::size_t> status_counts() const;

  // Replaces a record verbatim (TSV import path).
  void put_record(const MappingRecord &record);

  void export_tsv(std::ostream &out) const;
  void export_tsv(const std::filesystem::path &path) const;
  // Returns the number of records created or changed.
  std::size_t import_tsv(std::string_view data);
  std::size_t import_tsv_file(const std::filesystem::path &path);

 private:
  std::optional<MappingRecord> record_locked(std::int64_t entry_id) const;
  void write_locked(const MappingRecord &record);

  std::unique_ptr<sql::Database> db_;
  std::shared_ptr<Clock> clock_;
  mutable std::mutex mu_;
};

std::string render_record_tsv(const MappingRecord &record);
MappingRecord parse_record_row(const std::vector<std::optional<std::string>> &row, std::size_t line);

struct GapItem {
  std::int64_t entry_id = 0;
  std::string title;
  Nature nature = Nature::kThematic;
  std::string suggested_label;
  std::string suggested_description;
  std::vector<std::string> reason_tags;

  bool operator==(const GapItem &) const = default;
};

// One item per unreviewed_not_found / confirmed_absent record, sorted by
// nature then title.
std::vector<GapItem> gap_report(const MappingStore &store, std::span<const Entry> entries);
std::string render_gap_tsv(const std::vector<GapItem> &items);

}  // namespace dhbb

#endif  // DHBB_MAPPING_STORE_H_
