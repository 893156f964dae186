#include "dhbb/sitelink_index.h"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "dhbb/text.h"

namespace dhbb {

std::string_view to_string(IndexErrc code) {
  switch (code) {
    case IndexErrc::kBadMagic: return "BadMagic";
    case IndexErrc::kUnsupportedVersion: return "UnsupportedVersion";
    case IndexErrc::kCorrupt: return "CorruptIndex";
    case IndexErrc::kIoError: return "IoError";
  }
  return "IndexError";
}

std::string_view to_string(ResolveStatus status) {
  switch (status) {
    case ResolveStatus::kFound: return "found";
    case ResolveStatus::kNotFound: return "not_found";
    case ResolveStatus::kCycle: return "redirect_cycle";
    case ResolveStatus::kTooManyHops: return "too_many_hops";
  }
  return "unknown";
}

namespace {

constexpr char kMagic[8] = {'D', 'H', 'B', 'B', 'S', 'L', 'X', '1'};

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_str(std::string &out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Cursor {
 public:
  explicit Cursor(std::string_view data) : data_(data) {}

  std::uint64_t u(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::string str() {
    auto n = static_cast<std::size_t>(u(4));
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw IndexError(IndexErrc::kCorrupt, "truncated index file");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

struct PageInfo {
  std::string title;
  bool is_redirect = false;
};

struct PageScan {
  std::unordered_map<std::int64_t, PageInfo> pages;  // selected namespace only
  std::unordered_set<std::int64_t> all_ids;
};

struct RedirectRow {
  std::int64_t from = 0;
  std::int64_t ns = 0;
  std::string title;
  bool interwiki = false;
};

struct PropRow {
  std::int64_t page = 0;
  std::string value;
};

int require_column(const SqlDumpReader &reader, std::string_view name, std::string_view dump) {
  int i = reader.schema().index_of(name);
  if (i < 0) {
    throw SqlDumpError(SqlDumpErrc::kSchemaMismatch, reader.offset(),
                       std::string(dump) + " dump has no column " + std::string(name));
  }
  return i;
}

std::int64_t as_int(const SqlValue &v) {
  if (const auto *i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto *s = std::get_if<std::string>(&v)) {
    try {
      return std::stoll(*s);
    } catch (const std::exception &) {
      return 0;
    }
  }
  return 0;
}

std::string as_string(const SqlValue &v) {
  if (const auto *s = std::get_if<std::string>(&v)) return *s;
  if (const auto *i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return {};
}

template <typename Fn>
auto with_context(std::string_view dump, Fn &&fn) {
  try {
    return fn();
  } catch (const SqlDumpError &e) {
    throw SqlDumpError(e.code(), e.offset(), std::string(dump) + " dump: " + e.detail());
  }
}

PageScan scan_pages(std::unique_ptr<ByteSource> source, int namespace_id) {
  return with_context("page", [&] {
    SqlDumpReader reader(std::move(source), page_table_schema());
    PageScan scan;
    int id_col = -1, ns_col = -1, title_col = -1, redirect_col = -1;
    while (auto tuple = reader.next()) {
      if (id_col < 0) {
        id_col = require_column(reader, "page_id", "page");
        ns_col = require_column(reader, "page_namespace", "page");
        title_col = require_column(reader, "page_title", "page");
        redirect_col = require_column(reader, "page_is_redirect", "page");
      }
      const auto &v = tuple->values;
      std::int64_t id = as_int(v[id_col]);
      if (id <= 0) continue;
      scan.all_ids.insert(id);
      if (as_int(v[ns_col]) != namespace_id) continue;
      scan.pages[id] = PageInfo{as_string(v[title_col]), as_int(v[redirect_col]) != 0};
    }
    return scan;
  });
}

std::vector<RedirectRow> scan_redirects(std::unique_ptr<ByteSource> source) {
  return with_context("redirect", [&] {
    SqlDumpReader reader(std::move(source), redirect_table_schema());
    std::vector<RedirectRow> rows;
    int from_col = -1, ns_col = -1, title_col = -1, iw_col = -1;
    while (auto tuple = reader.next()) {
      if (from_col < 0) {
        from_col = require_column(reader, "rd_from", "redirect");
        ns_col = require_column(reader, "rd_namespace", "redirect");
        title_col = require_column(reader, "rd_title", "redirect");
        iw_col = reader.schema().index_of("rd_interwiki");
      }
      const auto &v = tuple->values;
      RedirectRow row{as_int(v[from_col]), as_int(v[ns_col]), as_string(v[title_col]), false};
      if (iw_col >= 0) row.interwiki = !as_string(v[iw_col]).empty();
      rows.push_back(std::move(row));
    }
    return rows;
  });
}

std::vector<PropRow> scan_props(std::unique_ptr<ByteSource> source) {
  return with_context("page_props", [&] {
    SqlDumpReader reader(std::move(source), page_props_table_schema());
    std::vector<PropRow> rows;
    int page_col = -1, name_col = -1, value_col = -1;
    while (auto tuple = reader.next()) {
      if (page_col < 0) {
        page_col = require_column(reader, "pp_page", "page_props");
        name_col = require_column(reader, "pp_propname", "page_props");
        value_col = require_column(reader, "pp_value", "page_props");
      }
      const auto &v = tuple->values;
      if (as_string(v[name_col]) != "wikibase_item") continue;
      rows.push_back(PropRow{as_int(v[page_col]), as_string(v[value_col])});
    }
    return rows;
  });
}

}  // namespace

SitelinkIndex::SitelinkIndex(std::unordered_map<std::string, Qid> direct,
                             std::unordered_map<std::string, std::string> redirects, Stats stats,
                             std::string source_label, std::int64_t created_at)
    : direct_(std::move(direct)),
      redirects_(std::move(redirects)),
      stats_(stats),
      source_label_(std::move(source_label)),
      created_at_(created_at) {}

std::string SitelinkIndex::normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  for (char32_t c : text::decode(title)) {
    bool separator = c == U'_' || text::is_whitespace(c);
    if (separator) {
      if (!out.empty() && out.back() != '_') out.push_back('_');
      continue;
    }
    out += text::encode(std::u32string_view(&c, 1));
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return text::upper_first(out);
}

Resolution SitelinkIndex::resolve(std::string_view title) const {
  Resolution r;
  std::string current = normalize_title(title);
  r.path.push_back(current);
  for (;;) {
    if (auto it = direct_.find(current); it != direct_.end()) {
      r.qid = it->second;
      r.status = ResolveStatus::kFound;
      return r;
    }
    auto it = redirects_.find(current);
    if (it == redirects_.end()) {
      r.status = ResolveStatus::kNotFound;
      return r;
    }
    std::string target = normalize_title(it->second);
    if (std::find(r.path.begin(), r.path.end(), target) != r.path.end()) {
      r.status = ResolveStatus::kCycle;
      r.path.push_back(target);
      return r;
    }
    if (r.hops == kMaxRedirectHops) {
      r.status = ResolveStatus::kTooManyHops;
      return r;
    }
    ++r.hops;
    r.path.push_back(target);
    current = std::move(target);
  }
}

std::optional<Qid> SitelinkIndex::lookup_title(std::string_view title) const {
  return resolve(title).qid;
}

void SitelinkIndex::write(std::ostream &out) const {
  std::string buf(kMagic, sizeof(kMagic));
  put_u32(buf, kFormatVersion);
  put_u64(buf, static_cast<std::uint64_t>(created_at_));
  put_str(buf, source_label_);
  put_u64(buf, stats_.pages);
  put_u64(buf, stats_.redirects);
  put_u64(buf, stats_.qids);

  std::vector<std::pair<std::string_view, Qid>> direct(direct_.begin(), direct_.end());
  std::sort(direct.begin(), direct.end());
  put_u64(buf, direct.size());
  for (const auto &[title, qid] : direct) {
    put_str(buf, title);
    put_u64(buf, qid.number());
  }

  std::vector<std::pair<std::string_view, std::string_view>> redirects(redirects_.begin(),
                                                                        redirects_.end());
  std::sort(redirects.begin(), redirects.end());
  put_u64(buf, redirects.size());
  for (const auto &[title, target] : redirects) {
    put_str(buf, title);
    put_str(buf, target);
  }

  uLong crc = crc32(0L, reinterpret_cast<const Bytef *>(buf.data()), static_cast<uInt>(buf.size()));
  put_u32(buf, static_cast<std::uint32_t>(crc));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IndexError(IndexErrc::kIoError, "write failed");
}

SitelinkIndex SitelinkIndex::read(std::istream &in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kMagic) + 4 || data.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw IndexError(IndexErrc::kBadMagic, "not a sitelink index");
  }
  Cursor trailer(std::string_view(data).substr(data.size() - 4));
  auto stored_crc = static_cast<std::uint32_t>(trailer.u(4));
  uLong crc = crc32(0L, reinterpret_cast<const Bytef *>(data.data()),
                    static_cast<uInt>(data.size() - 4));
  if (static_cast<std::uint32_t>(crc) != stored_crc) {
    throw IndexError(IndexErrc::kCorrupt, "checksum mismatch");
  }

  Cursor c(std::string_view(data).substr(sizeof(kMagic), data.size() - sizeof(kMagic) - 4));
  auto version = static_cast<std::uint32_t>(c.u(4));
  if (version != kFormatVersion) {
    throw IndexError(IndexErrc::kUnsupportedVersion, std::to_string(version));
  }
  auto created_at = static_cast<std::int64_t>(c.u(8));
  std::string label = c.str();
  Stats stats;
  stats.pages = c.u(8);
  stats.redirects = c.u(8);
  stats.qids = c.u(8);

  std::unordered_map<std::string, Qid> direct;
  std::uint64_t n = c.u(8);
  direct.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string title = c.str();
    direct.emplace(std::move(title), Qid(c.u(8)));
  }
  std::unordered_map<std::string, std::string> redirects;
  n = c.u(8);
  redirects.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string title = c.str();
    redirects.emplace(std::move(title), c.str());
  }
  return SitelinkIndex(std::move(direct), std::move(redirects), stats, std::move(label), created_at);
}

void SitelinkIndex::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IndexError(IndexErrc::kIoError, "cannot write " + path.string());
  write(out);
}

SitelinkIndex SitelinkIndex::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexError(IndexErrc::kIoError, "cannot open " + path.string());
  return read(in);
}

IndexBuildResult build_index(std::unique_ptr<ByteSource> page_dump,
                             std::unique_ptr<ByteSource> redirect_dump,
                             std::unique_ptr<ByteSource> page_props_dump,
                             const IndexBuildOptions &options) {
  auto pages_f = std::async(std::launch::async, scan_pages, std::move(page_dump), options.namespace_id);
  auto redirects_f = std::async(std::launch::async, scan_redirects, std::move(redirect_dump));
  auto props_f = std::async(std::launch::async, scan_props, std::move(page_props_dump));
  PageScan pages = pages_f.get();
  std::vector<RedirectRow> redirect_rows = redirects_f.get();
  std::vector<PropRow> props = props_f.get();

  IndexBuildResult result;
  std::unordered_map<std::int64_t, Qid> qid_by_page;
  std::size_t orphan_props = 0;
  std::int64_t first_orphan = 0;
  for (const auto &prop : props) {
    auto qid = Qid::parse(prop.value);
    if (!qid) {
      result.warnings.push_back("InvalidQid: page " + std::to_string(prop.page) + " has wikibase_item '" +
                                prop.value + "'");
      continue;
    }
    if (!pages.all_ids.contains(prop.page)) {
      if (orphan_props++ == 0) first_orphan = prop.page;
      continue;
    }
    qid_by_page[prop.page] = *qid;
  }
  if (orphan_props > 0) {
    result.warnings.push_back("SnapshotMismatch: " + std::to_string(orphan_props) +
                              " page_props rows reference page ids absent from the page dump (first: " +
                              std::to_string(first_orphan) + ")");
  }

  std::unordered_map<std::string, Qid> direct;
  for (const auto &[id, info] : pages.pages) {
    if (info.is_redirect) continue;
    auto it = qid_by_page.find(id);
    if (it == qid_by_page.end()) continue;
    direct[SitelinkIndex::normalize_title(info.title)] = it->second;
  }

  std::unordered_map<std::string, std::string> redirects;
  for (const auto &row : redirect_rows) {
    if (row.ns != options.namespace_id || row.interwiki) continue;
    auto it = pages.pages.find(row.from);
    if (it == pages.pages.end()) continue;
    std::string from = SitelinkIndex::normalize_title(it->second.title);
    if (direct.contains(from)) continue;
    redirects[from] = SitelinkIndex::normalize_title(row.title);
  }

  SitelinkIndex::Stats stats;
  stats.pages = pages.pages.size();
  stats.redirects = redirects.size();
  stats.qids = direct.size();
  result.index = SitelinkIndex(std::move(direct), std::move(redirects), stats,
                               options.source_label, options.created_at);
  return result;
}

IndexBuildResult build_index_from_files(const std::filesystem::path &page_dump,
                                        const std::filesystem::path &redirect_dump,
                                        const std::filesystem::path &page_props_dump,
                                        const IndexBuildOptions &options) {
  return build_index(open_dump_file(page_dump), open_dump_file(redirect_dump),
                     open_dump_file(page_props_dump), options);
}

}  // namespace dhbb
