#include "dhbb/sql_dump.h"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>

namespace dhbb {

std::string_view to_string(SqlDumpErrc code) {
  switch (code) {
    case SqlDumpErrc::kMalformedTuple: return "MalformedTuple";
    case SqlDumpErrc::kArityMismatch: return "ArityMismatch";
    case SqlDumpErrc::kUnexpectedEndOfStream: return "UnexpectedEndOfStream";
    case SqlDumpErrc::kSchemaMismatch: return "SchemaMismatch";
    case SqlDumpErrc::kIoError: return "IoError";
  }
  return "SqlDumpError";
}

SqlDumpError::SqlDumpError(SqlDumpErrc code, std::uint64_t offset, std::string detail)
    : CodedError<SqlDumpErrc>(code, "at byte " + std::to_string(offset) +
                                        (detail.empty() ? "" : ": " + detail)),
      offset_(offset) {}

int TableSchema::index_of(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return static_cast<int>(i);
  }
  return -1;
}

TableSchema page_table_schema() {
  return {"page",
          {"page_id", "page_namespace", "page_title", "page_is_redirect", "page_is_new",
           "page_random", "page_touched", "page_links_updated", "page_latest", "page_len",
           "page_content_model", "page_lang"}};
}

TableSchema redirect_table_schema() {
  return {"redirect", {"rd_from", "rd_namespace", "rd_title", "rd_interwiki", "rd_fragment"}};
}

TableSchema page_props_table_schema() {
  return {"page_props", {"pp_page", "pp_propname", "pp_value", "pp_sortkey"}};
}

// ---------------------------------------------------------------------------
// Byte sources.

namespace {

constexpr std::size_t kChunk = 1 << 16;

class StreamSource : public ByteSource {
 public:
  explicit StreamSource(std::istream &in) : in_(in) {}
  std::size_t read(std::span<char> buffer) override {
    in_.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (in_.bad()) throw SqlDumpError(SqlDumpErrc::kIoError, 0, "stream read failed");
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::istream &in_;
};

class FileSource : public ByteSource {
 public:
  explicit FileSource(const std::filesystem::path &path) : in_(path, std::ios::binary) {
    if (!in_) throw SqlDumpError(SqlDumpErrc::kIoError, 0, "cannot open " + path.string());
  }
  std::size_t read(std::span<char> buffer) override {
    in_.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (in_.bad()) throw SqlDumpError(SqlDumpErrc::kIoError, 0, "file read failed");
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::ifstream in_;
};

class MemorySource : public ByteSource {
 public:
  explicit MemorySource(std::string data) : data_(std::move(data)) {}
  std::size_t read(std::span<char> buffer) override {
    std::size_t n = std::min(buffer.size(), data_.size() - pos_);
    std::memcpy(buffer.data(), data_.data() + pos_, n);
    pos_ += n;
    return n;
  }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

// Replays bytes consumed during format detection before reading on.
class PrefixedSource : public ByteSource {
 public:
  PrefixedSource(std::string prefix, std::unique_ptr<ByteSource> rest)
      : prefix_(std::move(prefix)), rest_(std::move(rest)) {}
  std::size_t read(std::span<char> buffer) override {
    if (pos_ < prefix_.size()) {
      std::size_t n = std::min(buffer.size(), prefix_.size() - pos_);
      std::memcpy(buffer.data(), prefix_.data() + pos_, n);
      pos_ += n;
      return n;
    }
    return rest_->read(buffer);
  }

 private:
  std::string prefix_;
  std::size_t pos_ = 0;
  std::unique_ptr<ByteSource> rest_;
};

class GzipSource : public ByteSource {
 public:
  explicit GzipSource(std::unique_ptr<ByteSource> raw) : raw_(std::move(raw)), in_(kChunk) {
    std::memset(&zs_, 0, sizeof(zs_));
    if (inflateInit2(&zs_, 15 + 16) != Z_OK) {
      throw SqlDumpError(SqlDumpErrc::kIoError, 0, "inflateInit failed");
    }
  }
  ~GzipSource() override { inflateEnd(&zs_); }

  std::size_t read(std::span<char> buffer) override {
    zs_.next_out = reinterpret_cast<Bytef *>(buffer.data());
    zs_.avail_out = static_cast<uInt>(buffer.size());
    while (zs_.avail_out == buffer.size() && !done_) {
      if (zs_.avail_in == 0) {
        std::size_t n = raw_->read(in_);
        if (n == 0) {
          if (!member_finished_) {
            throw SqlDumpError(SqlDumpErrc::kUnexpectedEndOfStream, compressed_,
                               "truncated gzip stream");
          }
          done_ = true;
          break;
        }
        compressed_ += n;
        zs_.next_in = reinterpret_cast<Bytef *>(in_.data());
        zs_.avail_in = static_cast<uInt>(n);
      }
      member_finished_ = false;
      int rc = inflate(&zs_, Z_NO_FLUSH);
      if (rc == Z_STREAM_END) {
        // Concatenated gzip members are legal; keep going.
        member_finished_ = true;
        inflateReset(&zs_);
      } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
        throw SqlDumpError(SqlDumpErrc::kIoError, compressed_, "corrupt gzip data");
      }
    }
    return buffer.size() - zs_.avail_out;
  }

 private:
  std::unique_ptr<ByteSource> raw_;
  std::vector<char> in_;
  z_stream zs_;
  std::uint64_t compressed_ = 0;
  bool member_finished_ = false;
  bool done_ = false;
};

std::unique_ptr<ByteSource> detect_compression(std::unique_ptr<ByteSource> raw) {
  std::string prefix(2, '\0');
  std::size_t got = 0;
  while (got < 2) {
    std::size_t n = raw->read(std::span<char>(prefix.data() + got, 2 - got));
    if (n == 0) break;
    got += n;
  }
  prefix.resize(got);
  bool gzip = got == 2 && static_cast<unsigned char>(prefix[0]) == 0x1f &&
              static_cast<unsigned char>(prefix[1]) == 0x8b;
  auto replay = std::make_unique<PrefixedSource>(std::move(prefix), std::move(raw));
  if (gzip) return std::make_unique<GzipSource>(std::move(replay));
  return replay;
}

}  // namespace

std::unique_ptr<ByteSource> make_stream_source(std::istream &in) {
  return detect_compression(std::make_unique<StreamSource>(in));
}

std::unique_ptr<ByteSource> open_dump_file(const std::filesystem::path &path) {
  return detect_compression(std::make_unique<FileSource>(path));
}

std::unique_ptr<ByteSource> make_memory_source(std::string data) {
  return detect_compression(std::make_unique<MemorySource>(std::move(data)));
}

// ---------------------------------------------------------------------------
// Reader.

struct SqlDumpReader::Impl {
  static constexpr int kEof = -1;

  std::unique_ptr<ByteSource> source;
  TableSchema schema;
  std::vector<char> buffer = std::vector<char>(kChunk);
  std::size_t pos = 0;
  std::size_t len = 0;
  std::uint64_t consumed = 0;  // bytes discarded before buffer[0]
  bool source_done = false;

  bool in_values = false;
  bool expect_tuple = false;

  std::uint64_t offset() const { return consumed + pos; }

  // Makes at least `n` bytes available unless the source is exhausted.
  bool ensure(std::size_t n) {
    if (len - pos >= n) return true;
    if (source_done) return false;
    if (pos > 0) {
      std::memmove(buffer.data(), buffer.data() + pos, len - pos);
      consumed += pos;
      len -= pos;
      pos = 0;
    }
    while (len < n && !source_done) {
      std::size_t got = source->read(std::span<char>(buffer.data() + len, buffer.size() - len));
      if (got == 0) source_done = true;
      len += got;
    }
    return len - pos >= n;
  }

  int peek(std::size_t ahead = 0) {
    if (!ensure(ahead + 1)) return kEof;
    return static_cast<unsigned char>(buffer[pos + ahead]);
  }

  int get() {
    if (!ensure(1)) return kEof;
    return static_cast<unsigned char>(buffer[pos++]);
  }

  [[noreturn]] void fail(SqlDumpErrc code, std::string detail) {
    throw SqlDumpError(code, offset(), std::move(detail));
  }

  static bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
  static bool is_word(int c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$';
  }

  void skip_space() {
    while (is_space(peek())) get();
  }

  void skip_space_and_comments() {
    for (;;) {
      skip_space();
      int c = peek();
      if (c == '-' && peek(1) == '-' && (is_space(peek(2)) || peek(2) == kEof)) {
        skip_line();
      } else if (c == '#') {
        skip_line();
      } else if (c == '/' && peek(1) == '*') {
        get();
        get();
        for (;;) {
          int d = get();
          if (d == kEof) return;
          if (d == '*' && peek() == '/') {
            get();
            break;
          }
        }
      } else {
        return;
      }
    }
  }

  void skip_line() {
    for (int c = get(); c != kEof && c != '\n'; c = get()) {
    }
  }

  std::string read_word() {
    std::string word;
    while (is_word(peek())) word.push_back(static_cast<char>(get()));
    return word;
  }

  static std::string upper(std::string s) {
    for (char &c : s) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return s;
  }

  std::string read_identifier() {
    skip_space();
    if (peek() != '`') return read_word();
    get();
    std::string name;
    for (;;) {
      int c = get();
      if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside identifier");
      if (c == '`') {
        if (peek() == '`') {
          get();
          name.push_back('`');
          continue;
        }
        break;
      }
      name.push_back(static_cast<char>(c));
    }
    return name;
  }

  void skip_quoted(int quote) {
    for (;;) {
      int c = get();
      if (c == kEof) return;
      if (c == '\\' && quote != '`') {
        get();
        continue;
      }
      if (c == quote) {
        if (peek() == quote) {
          get();
          continue;
        }
        return;
      }
    }
  }

  // Skips to just past the next ';' outside quotes.
  void skip_statement() {
    for (;;) {
      int c = get();
      if (c == kEof || c == ';') return;
      if (c == '\'' || c == '"' || c == '`') skip_quoted(c);
    }
  }

  void handle_insert() {
    skip_space();
    std::string word = upper(read_word());
    if (word == "IGNORE") {
      skip_space();
      word = upper(read_word());
    }
    if (word != "INTO") {
      skip_statement();
      return;
    }
    std::string table = read_identifier();
    for (;;) {
      skip_space();
      int c = peek();
      if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside INSERT header");
      if (c == '(') {
        int depth = 0;
        do {
          int d = get();
          if (d == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside column list");
          if (d == '(') ++depth;
          if (d == ')') --depth;
          if (d == '`') skip_quoted('`');
        } while (depth > 0);
        continue;
      }
      std::string w = upper(read_word());
      if (w == "VALUES") break;
      if (w.empty()) fail(SqlDumpErrc::kMalformedTuple, "unexpected character in INSERT header");
    }
    if (table == schema.table) {
      in_values = true;
      expect_tuple = true;
    } else {
      skip_statement();
    }
  }

  void handle_create() {
    skip_space();
    if (upper(read_word()) != "TABLE") {
      skip_statement();
      return;
    }
    skip_space();
    std::string table = read_identifier();
    if (upper(table) == "IF") {
      skip_space();
      read_word();  // NOT
      skip_space();
      read_word();  // EXISTS
      table = read_identifier();
    }
    if (table != schema.table) {
      skip_statement();
      return;
    }
    skip_space();
    if (get() != '(') {
      skip_statement();
      return;
    }
    std::vector<std::string> columns;
    for (;;) {
      skip_space();
      if (peek() == '`') columns.push_back(read_identifier());
      // Scan to the end of this definition.
      int depth = 0;
      int c;
      for (;;) {
        c = get();
        if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside CREATE TABLE");
        if (c == '\'' || c == '"' || c == '`') {
          skip_quoted(c);
        } else if (c == '(') {
          ++depth;
        } else if (c == ')') {
          if (depth == 0) break;
          --depth;
        } else if (c == ',' && depth == 0) {
          break;
        }
      }
      if (c == ')') break;
    }
    skip_statement();

    schema.columns = std::move(columns);
  }

  std::string parse_string(int quote) {
    std::string out;
    for (;;) {
      int c = get();
      if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside string literal");
      if (c == '\\') {
        int e = get();
        switch (e) {
          case kEof: fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside escape sequence");
          case '0': out.push_back('\0'); break;
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 't': out.push_back('\t'); break;
          case 'b': out.push_back('\b'); break;
          case 'Z': out.push_back('\x1a'); break;
          default: out.push_back(static_cast<char>(e)); break;
        }
        continue;
      }
      if (c == quote) {
        if (peek() == quote) {
          get();
          out.push_back(static_cast<char>(quote));
          continue;
        }
        return out;
      }
      out.push_back(static_cast<char>(c));
    }
  }

  SqlValue parse_number() {
    std::string token;
    for (int c = peek(); (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.' || c == 'e' ||
                         c == 'E';
         c = peek()) {
      token.push_back(static_cast<char>(get()));
    }
    const char *first = token.data();
    const char *last = token.data() + token.size();
    if (!token.empty() && token.front() == '+') ++first;
    if (token.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail(SqlDumpErrc::kMalformedTuple, "bad integer " + token);
      return v;
    }
    double d = 0;
    auto [ptr, ec] = std::from_chars(first, last, d);
    if (ec != std::errc() || ptr != last) fail(SqlDumpErrc::kMalformedTuple, "bad number " + token);
    return d;
  }

  SqlValue parse_value() {
    skip_space();
    int c = peek();
    if (c == '\'' || c == '"') {
      get();
      return parse_string(c);
    }
    if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.') return parse_number();
    if (c == '_') {
      read_word();  // charset introducer such as _binary
      skip_space();
      int q = get();
      if (q != '\'' && q != '"') fail(SqlDumpErrc::kMalformedTuple, "expected string after introducer");
      return parse_string(q);
    }
    if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "expected value");
    std::string word = upper(read_word());
    if (word == "NULL") return std::monostate{};
    fail(SqlDumpErrc::kMalformedTuple, word.empty() ? "unexpected character" : "unexpected token " + word);
  }

  SqlTuple parse_tuple() {
    SqlTuple tuple;
    skip_space();
    if (peek() == ')') {
      get();
      return tuple;
    }
    for (;;) {
      tuple.values.push_back(parse_value());
      skip_space();
      int c = get();
      if (c == ',') continue;
      if (c == ')') return tuple;
      if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside tuple");
      --pos;
      fail(SqlDumpErrc::kMalformedTuple, "expected ',' or ')'");
    }
  }

  std::optional<SqlTuple> next() {
    for (;;) {
      if (in_values) {
        skip_space();
        std::uint64_t start = offset();
        int c = get();
        if (c == kEof) fail(SqlDumpErrc::kUnexpectedEndOfStream, "inside INSERT statement");
        if (expect_tuple) {
          if (c != '(') {
            --pos;
            fail(SqlDumpErrc::kMalformedTuple, "expected '('");
          }
          SqlTuple tuple = parse_tuple();
          expect_tuple = false;
          if (tuple.values.size() != schema.columns.size()) {
            throw SqlDumpError(SqlDumpErrc::kArityMismatch, start,
                               "table " + schema.table + " expects " +
                                   std::to_string(schema.columns.size()) + " values, got " +
                                   std::to_string(tuple.values.size()));
          }
          return tuple;
        }
        if (c == ',') {
          expect_tuple = true;
        } else if (c == ';') {
          in_values = false;
        } else {
          --pos;
          fail(SqlDumpErrc::kMalformedTuple, "expected ',' or ';' between tuples");
        }
        continue;
      }

      skip_space_and_comments();
      int c = peek();
      if (c == kEof) return std::nullopt;
      if (c == ';') {
        get();
        continue;
      }
      if (is_word(c)) {
        std::string word = upper(read_word());
        if (word == "INSERT") {
          handle_insert();
          continue;
        }
        if (word == "CREATE") {
          handle_create();
          continue;
        }
      }
      skip_statement();
    }
  }
};

SqlDumpReader::SqlDumpReader(std::unique_ptr<ByteSource> source, TableSchema schema)
    : impl_(std::make_unique<Impl>()) {
  impl_->source = std::move(source);
  impl_->schema = std::move(schema);
}

SqlDumpReader::~SqlDumpReader() = default;
SqlDumpReader::SqlDumpReader(SqlDumpReader &&) noexcept = default;
SqlDumpReader &SqlDumpReader::operator=(SqlDumpReader &&) noexcept = default;

std::optional<SqlTuple> SqlDumpReader::next() { return impl_->next(); }
const TableSchema &SqlDumpReader::schema() const { return impl_->schema; }
std::uint64_t SqlDumpReader::offset() const { return impl_->offset(); }

// ---------------------------------------------------------------------------
// Writer.

std::string write_sql_value(const SqlValue &value) {
  if (std::holds_alternative<std::monostate>(value)) return "NULL";
  if (const auto *i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto *d = std::get_if<double>(&value)) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *d);
    std::string out(buf.data(), ptr);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
  }
  const auto &s = std::get<std::string>(value);
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('\'');
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      case '\x1a': out += "\\Z"; break;
      default: out.push_back(c); break;
    }
  }
  out.push_back('\'');
  return out;
}

std::string write_insert_statements(const std::string &table, std::span<const SqlTuple> tuples,
                                    std::size_t rows_per_statement) {
  std::string out;
  rows_per_statement = std::max<std::size_t>(rows_per_statement, 1);
  for (std::size_t i = 0; i < tuples.size(); i += rows_per_statement) {
    out += "INSERT INTO `" + table + "` VALUES ";
    std::size_t end = std::min(tuples.size(), i + rows_per_statement);
    for (std::size_t r = i; r < end; ++r) {
      if (r > i) out += ',';
      out += '(';
      for (std::size_t v = 0; v < tuples[r].values.size(); ++v) {
        if (v > 0) out += ',';
        out += write_sql_value(tuples[r].values[v]);
      }
      out += ')';
    }
    out += ";\n";
  }
  return out;
}

}  // namespace dhbb
