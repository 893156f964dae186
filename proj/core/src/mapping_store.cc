#include "dhbb/mapping_store.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dhbb/normalize.h"
#include "dhbb/tsv.h"
#include "sqlite_db.h"

namespace dhbb {

std::string_view to_string(StoreErrc code) {
  switch (code) {
    case StoreErrc::kStoreUnavailable: return "StoreUnavailable";
    case StoreErrc::kHeaderMismatch: return "HeaderMismatch";
    case StoreErrc::kMalformedRow: return "MalformedRow";
    case StoreErrc::kUnknownEntry: return "UnknownEntry";
    case StoreErrc::kInvalidDecision: return "InvalidDecision";
  }
  return "StoreError";
}

std::string_view to_string(RecordStatus status) {
  switch (status) {
    case RecordStatus::kUnreviewedAuto: return "unreviewed_auto";
    case RecordStatus::kUnreviewedAmbiguous: return "unreviewed_ambiguous";
    case RecordStatus::kUnreviewedNotFound: return "unreviewed_not_found";
    case RecordStatus::kConfirmed: return "confirmed";
    case RecordStatus::kRejected: return "rejected";
    case RecordStatus::kManual: return "manual";
    case RecordStatus::kConfirmedAbsent: return "confirmed_absent";
  }
  return "unknown";
}

std::optional<RecordStatus> parse_record_status(std::string_view text) {
  for (auto s : kAllRecordStatuses) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::kHuman ? "human" : "pipeline";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  if (text == "human") return Provenance::kHuman;
  if (text == "pipeline") return Provenance::kPipeline;
  return std::nullopt;
}

std::string_view to_string(HumanVerdict verdict) {
  switch (verdict) {
    case HumanVerdict::kConfirm: return "confirm";
    case HumanVerdict::kReject: return "reject";
    case HumanVerdict::kManual: return "manual";
    case HumanVerdict::kAbsent: return "absent";
  }
  return "unknown";
}

std::optional<HumanVerdict> parse_human_verdict(std::string_view text) {
  for (auto v : {HumanVerdict::kConfirm, HumanVerdict::kReject, HumanVerdict::kManual,
                 HumanVerdict::kAbsent}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

void check_record(const MappingRecord &r) {
  bool needs_qid = r.status == RecordStatus::kConfirmed || r.status == RecordStatus::kManual;
  if (needs_qid && !r.qid) {
    throw StoreError(StoreErrc::kInvalidDecision,
                     std::string(to_string(r.status)) + " record without a qid");
  }
  if (r.status == RecordStatus::kConfirmedAbsent && r.qid) {
    throw StoreError(StoreErrc::kInvalidDecision, "confirmed_absent record with a qid");
  }
}

std::string format_timestamp(std::int64_t unix_seconds) {
  using namespace std::chrono;
  sys_seconds t{seconds(unix_seconds)};
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM:SSZ
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z') {
    return std::nullopt;
  }
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc() || p != s.data() + pos + len) return std::nullopt;
    return v;
  };
  auto y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), se = num(17, 2);
  if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
  year_month_day ymd{year(*y), month(static_cast<unsigned>(*mo)), day(static_cast<unsigned>(*d))};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 59) return std::nullopt;
  auto t = sys_days(ymd) + hours(*h) + minutes(*mi) + seconds(*se);
  return t.time_since_epoch().count();
}

namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS records (
  entry_id INTEGER PRIMARY KEY,
  title TEXT NOT NULL,
  nature TEXT NOT NULL,
  qid TEXT,
  status TEXT NOT NULL,
  confidence REAL NOT NULL,
  provenance TEXT NOT NULL,
  reviewer TEXT,
  updated_at INTEGER NOT NULL,
  note TEXT
);
CREATE TABLE IF NOT EXISTS decisions (
  entry_id INTEGER PRIMARY KEY,
  body TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS records_queue ON records (status, nature, entry_id);
)sql";

constexpr std::string_view kColumns =
    "entry_id, title, nature, qid, status, confidence, provenance, reviewer, updated_at, note";

MappingRecord read_record(const sql::Statement &st) {
  MappingRecord r;
  r.entry_id = st.column_int(0);
  r.title = st.column_text(1);
  r.nature = parse_nature(st.column_text(2)).value_or(Nature::kThematic);
  if (auto q = st.column_optional_text(3)) r.qid = Qid::parse(*q);
  r.status = parse_record_status(st.column_text(4)).value_or(RecordStatus::kUnreviewedNotFound);
  r.confidence = st.column_double(5);
  r.provenance = parse_provenance(st.column_text(6)).value_or(Provenance::kPipeline);
  r.reviewer = st.column_optional_text(7);
  r.updated_at = st.column_int(8);
  r.note = st.column_optional_text(9);
  return r;
}

// Everything except updated_at, which is what idempotent writes compare.
bool same_content(const MappingRecord &a, const MappingRecord &b) {
  MappingRecord x = a;
  x.updated_at = b.updated_at;
  return x == b;
}

template <typename F>
auto guarded(F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::runtime_error &e) {
    if (dynamic_cast<const Error *>(&e)) throw;
    throw StoreError(StoreErrc::kStoreUnavailable, e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

MappingStore::MappingStore(const std::string &path, std::shared_ptr<Clock> clock)
    : clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()) {
  guarded([&] {
    db_ = std::make_unique<sql::Database>(path);
    if (path != ":memory:") db_->exec("PRAGMA journal_mode=WAL");
    db_->exec(kSchema);
  });
}

MappingStore::~MappingStore() = default;

std::optional<MappingRecord> MappingStore::record_locked(std::int64_t entry_id) const {
  auto st = db_->prepare("SELECT " + std::string(kColumns) + " FROM records WHERE entry_id = ?");
  st.bind(1, entry_id);
  if (!st.step()) return std::nullopt;
  return read_record(st);
}

void MappingStore::write_locked(const MappingRecord &r) {
  auto st = db_->prepare("INSERT OR REPLACE INTO records (" + std::string(kColumns) +
                         ") VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
  st.bind(1, r.entry_id)
      .bind(2, std::string_view(r.title))
      .bind(3, to_string(r.nature))
      .bind(4, r.qid ? std::optional<std::string>(r.qid->str()) : std::nullopt)
      .bind(5, to_string(r.status))
      .bind(6, r.confidence)
      .bind(7, to_string(r.provenance))
      .bind(8, r.reviewer)
      .bind(9, r.updated_at)
      .bind(10, r.note);
  st.run();
}

UpsertResult MappingStore::upsert_decision(const Entry &entry, const LinkDecision &decision) {
  MappingRecord next;
  next.entry_id = entry.id;
  next.title = entry.title;
  next.nature = entry.nature;
  next.provenance = Provenance::kPipeline;
  switch (decision.status) {
    case LinkStatus::kAutoMapped:
      next.status = RecordStatus::kUnreviewedAuto;
      next.qid = decision.chosen;
      break;
    case LinkStatus::kAmbiguous:
      next.status = RecordStatus::kUnreviewedAmbiguous;
      break;
    case LinkStatus::kNotFound:
      next.status = RecordStatus::kUnreviewedNotFound;
      break;
  }
  next.confidence = decision.candidates.empty() ? 0.0 : decision.candidates.front().final_score();
  if (!decision.reasons.empty()) {
    std::string note;
    for (const auto &r : decision.reasons) note += (note.empty() ? "" : "; ") + r;
    next.note = note;
  }
  std::string body = decision_to_json(decision);

  return guarded([&] {
    std::lock_guard lock(mu_);
    sql::Transaction tx(*db_);
    auto st = db_->prepare("INSERT OR REPLACE INTO decisions (entry_id, body) VALUES (?, ?)");
    st.bind(1, entry.id).bind(2, std::string_view(body));
    st.run();

    UpsertResult result;
    auto existing = record_locked(entry.id);
    if (existing && existing->provenance == Provenance::kHuman) {
      result.record = *existing;
      result.conflict = true;
    } else if (existing && same_content(next, *existing)) {
      result.record = *existing;
    } else {
      next.updated_at = clock_->unix_seconds();
      write_locked(next);
      result.record = next;
      result.changed = true;
    }
    tx.commit();
    return result;
  });
}

UpsertResult MappingStore::apply_human(std::int64_t entry_id, const HumanDecision &d) {
  return guarded([&] {
    std::lock_guard lock(mu_);
    sql::Transaction tx(*db_);
    auto existing = record_locked(entry_id);
    if (!existing) throw StoreError(StoreErrc::kUnknownEntry, std::to_string(entry_id));

    MappingRecord next = *existing;
    next.provenance = Provenance::kHuman;
    next.reviewer = d.reviewer;
    if (d.note) next.note = d.note;
    switch (d.verdict) {
      case HumanVerdict::kConfirm:
        next.status = RecordStatus::kConfirmed;
        if (d.qid) next.qid = d.qid;
        if (!next.qid) throw StoreError(StoreErrc::kInvalidDecision, "confirm needs a qid");
        next.confidence = 1.0;
        break;
      case HumanVerdict::kReject:
        next.status = RecordStatus::kRejected;
        if (d.qid) next.qid = d.qid;
        next.confidence = 0.0;
        break;
      case HumanVerdict::kManual:
        if (!d.qid) throw StoreError(StoreErrc::kInvalidDecision, "manual needs a qid");
        next.status = RecordStatus::kManual;
        next.qid = d.qid;
        next.confidence = 1.0;
        break;
      case HumanVerdict::kAbsent:
        next.status = RecordStatus::kConfirmedAbsent;
        next.qid.reset();
        next.confidence = 1.0;
        break;
    }

    UpsertResult result;
    if (existing->provenance == Provenance::kHuman) {
      bool same_outcome = existing->status == next.status && existing->qid == next.qid;
      if (same_outcome && same_content(next, *existing)) {
        result.record = *existing;
        return result;
      }
      if (!same_outcome && !d.force) {
        result.record = *existing;
        result.conflict = true;
        return result;
      }
    }
    next.updated_at = clock_->unix_seconds();
    write_locked(next);
    tx.commit();
    result.record = next;
    result.changed = true;
    return result;
  });
}

std::optional<MappingRecord> MappingStore::record(std::int64_t entry_id) const {
  return guarded([&] {
    std::lock_guard lock(mu_);
    return record_locked(entry_id);
  });
}

std::optional<LinkDecision> MappingStore::decision(std::int64_t entry_id) const {
  auto body = guarded([&]() -> std::optional<std::string> {
    std::lock_guard lock(mu_);
    auto st = db_->prepare("SELECT body FROM decisions WHERE entry_id = ?");
    st.bind(1, entry_id);
    if (!st.step()) return std::nullopt;
    return st.column_text(0);
  });
  if (!body) return std::nullopt;
  return decision_from_json(*body);
}

std::vector<MappingRecord> MappingStore::records() const {
  return guarded([&] {
    std::lock_guard lock(mu_);
    std::vector<MappingRecord> out;
    auto st = db_->prepare("SELECT " + std::string(kColumns) + " FROM records ORDER BY entry_id");
    while (st.step()) out.push_back(read_record(st));
    return out;
  });
}

std::size_t MappingStore::size() const {
  return guarded([&] {
    std::lock_guard lock(mu_);
    auto st = db_->prepare("SELECT COUNT(*) FROM records");
    st.step();
    return static_cast<std::size_t>(st.column_int(0));
  });
}

QueuePage MappingStore::queue(std::optional<RecordStatus> status, std::size_t offset,
                              std::size_t limit) const {
  return guarded([&] {
    std::lock_guard lock(mu_);
    std::string where = status ? " WHERE status = ?" : "";
    QueuePage page;
    auto count = db_->prepare("SELECT COUNT(*) FROM records" + where);
    if (status) count.bind(1, to_string(*status));
    count.step();
    page.total = static_cast<std::size_t>(count.column_int(0));

    auto st = db_->prepare("SELECT " + std::string(kColumns) + " FROM records" + where +
                           " ORDER BY nature, entry_id LIMIT ? OFFSET ?");
    int i = 1;
    if (status) st.bind(i++, to_string(*status));
    st.bind(i++, static_cast<std::int64_t>(limit));
    st.bind(i++, static_cast<std::int64_t>(offset));
    while (st.step()) page.records.push_back(read_record(st));
    return page;
  });
}

std::map<std::pair<Nature, RecordStatus>, std::size_t> MappingStore::status_counts() const {
  return guarded([&] {
    std::lock_guard lock(mu_);
    std::map<std::pair<Nature, RecordStatus>, std::size_t> out;
    auto st = db_->prepare("SELECT nature, status, COUNT(*) FROM records GROUP BY nature, status");
    while (st.step()) {
      auto nature = parse_nature(st.column_text(0));
      auto status = parse_record_status(st.column_text(1));
      if (nature && status) out[{*nature, *status}] = static_cast<std::size_t>(st.column_int(2));
    }
    return out;
  });
}

void MappingStore::put_record(const MappingRecord &record) {
  check_record(record);
  guarded([&] {
    std::lock_guard lock(mu_);
    write_locked(record);
  });
}

// --- TSV ---------------------------------------------------------------------

std::string render_record_tsv(const MappingRecord &r) {
  tsv::Row row{std::to_string(r.entry_id),
               r.title,
               std::string(to_string(r.nature)),
               r.qid ? tsv::Field(r.qid->str()) : std::nullopt,
               std::string(to_string(r.status)),
               format_double(r.confidence),
               std::string(to_string(r.provenance)),
               r.reviewer,
               format_timestamp(r.updated_at),
               r.note};
  return tsv::write_row(row);
}

MappingRecord parse_record_row(const std::vector<std::optional<std::string>> &row,
                               std::size_t line) {
  auto bad = [&](const std::string &what) -> StoreError {
    return StoreError(StoreErrc::kMalformedRow, "line " + std::to_string(line) + ": " + what, line);
  };
  if (row.size() != tsv_columns().size()) {
    throw bad("expected " + std::to_string(tsv_columns().size()) + " fields, got " +
              std::to_string(row.size()));
  }
  auto required = [&](std::size_t i) -> const std::string & {
    if (!row[i]) throw bad(tsv_columns()[i] + " is empty");
    return *row[i];
  };

  MappingRecord r;
  const std::string &id = required(0);
  auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), r.entry_id);
  if (ec != std::errc() || p != id.data() + id.size() || r.entry_id <= 0) throw bad("bad entry_id");
  r.title = required(1);
  auto nature = parse_nature(required(2));
  if (!nature) throw bad("bad nature");
  r.nature = *nature;
  if (row[3]) {
    r.qid = Qid::parse(*row[3]);
    if (!r.qid) throw bad("bad qid");
  }
  auto status = parse_record_status(required(4));
  if (!status) throw bad("bad status");
  r.status = *status;
  const std::string &conf = required(5);
  auto [cp, cec] = std::from_chars(conf.data(), conf.data() + conf.size(), r.confidence);
  if (cec != std::errc() || cp != conf.data() + conf.size()) throw bad("bad confidence");
  auto provenance = parse_provenance(required(6));
  if (!provenance) throw bad("bad provenance");
  r.provenance = *provenance;
  r.reviewer = row[7];
  auto ts = parse_timestamp(required(8));
  if (!ts) throw bad("bad updated_at");
  r.updated_at = *ts;
  r.note = row[9];
  try {
    check_record(r);
  } catch (const StoreError &e) {
    throw bad(e.detail());
  }
  return r;
}

void MappingStore::export_tsv(std::ostream &out) const {
  out << tsv::write_row(tsv_columns());
  for (const auto &r : records()) out << render_record_tsv(r);
}

void MappingStore::export_tsv(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StoreError(StoreErrc::kStoreUnavailable, "cannot write " + path.string());
  export_tsv(out);
}

std::size_t MappingStore::import_tsv(std::string_view data) {
  tsv::Reader reader(data);
  std::vector<MappingRecord> parsed;
  try {
    tsv::expect_header(reader, tsv_columns());
    while (auto row = reader.next()) parsed.push_back(parse_record_row(*row, reader.line()));
  } catch (const tsv::TsvError &e) {
    auto code = e.code() == tsv::TsvErrc::kHeaderMismatch ? StoreErrc::kHeaderMismatch
                                                           : StoreErrc::kMalformedRow;
    throw StoreError(code, "line " + std::to_string(e.line()) + ": " + e.detail(), e.line());
  }
  return guarded([&] {
    std::lock_guard lock(mu_);
    sql::Transaction tx(*db_);
    std::size_t changed = 0;
    for (const auto &r : parsed) {
      auto existing = record_locked(r.entry_id);
      if (existing && *existing == r) continue;
      write_locked(r);
      ++changed;
    }
    tx.commit();
    return changed;
  });
}

std::size_t MappingStore::import_tsv_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError(StoreErrc::kStoreUnavailable, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return import_tsv(buffer.str());
}

// --- gap report ----------------------------------------------------------------

std::vector<GapItem> gap_report(const MappingStore &store, std::span<const Entry> entries) {
  std::map<std::int64_t, const Entry *> by_id;
  for (const auto &e : entries) by_id[e.id] = &e;

  std::vector<GapItem> items;
  for (const auto &r : store.records()) {
    if (r.status != RecordStatus::kUnreviewedNotFound && r.status != RecordStatus::kConfirmedAbsent) {
      continue;
    }
    GapItem item;
    item.entry_id = r.entry_id;
    item.title = r.title;
    item.nature = r.nature;
    item.suggested_label = derive_forms(r.title, r.nature).canonical;
    if (auto it = by_id.find(r.entry_id); it != by_id.end()) {
      item.suggested_description = first_sentence(it->second->body, 250);
    }
    if (r.status == RecordStatus::kConfirmedAbsent) item.reason_tags.push_back("confirmed_absent");
    if (auto d = store.decision(r.entry_id)) {
      for (const auto &reason : d->reasons) {
        if (std::find(item.reason_tags.begin(), item.reason_tags.end(), reason) ==
            item.reason_tags.end()) {
          item.reason_tags.push_back(reason);
        }
      }
    }
    items.push_back(std::move(item));
  }
  std::stable_sort(items.begin(), items.end(), [](const GapItem &a, const GapItem &b) {
    if (a.nature != b.nature) return a.nature < b.nature;
    auto fa = fold_diacritics(a.title), fb = fold_diacritics(b.title);
    if (fa != fb) return fa < fb;
    if (a.title != b.title) return a.title < b.title;
    return a.entry_id < b.entry_id;
  });
  return items;
}

std::string render_gap_tsv(const std::vector<GapItem> &items) {
  std::string out = tsv::write_row(std::vector<std::string>{
      "entry_id", "title", "nature", "suggested_label", "suggested_description", "reason_tags"});
  for (const auto &g : items) {
    std::string tags;
    for (const auto &t : g.reason_tags) tags += (tags.empty() ? "" : ",") + t;
    out += tsv::write_row(tsv::Row{std::to_string(g.entry_id), g.title,
                                   std::string(to_string(g.nature)), g.suggested_label,
                                   g.suggested_description, tags});
  }
  return out;
}

}  // namespace dhbb
