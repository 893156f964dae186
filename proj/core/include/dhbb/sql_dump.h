#ifndef DHBB_SQL_DUMP_H_
#define DHBB_SQL_DUMP_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dhbb/error.h"

namespace dhbb {

enum class SqlDumpErrc {
  kMalformedTuple,
  kArityMismatch,
  kUnexpectedEndOfStream,
  kSchemaMismatch,
  kIoError,
};
std::string_view to_string(SqlDumpErrc code);

class SqlDumpError : public CodedError<SqlDumpErrc> {
 public:
  SqlDumpError(SqlDumpErrc code, std::uint64_t offset, std::string detail = {});
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// NULL, integer, floating point or (byte) string.
using SqlValue = std::variant<std::monostate, std::int64_t, double, std::string>;

struct SqlTuple {
  std::vector<SqlValue> values;

  bool operator==(const SqlTuple &) const = default;
};

struct TableSchema {
  std::string table;
  std::vector<std::string> columns;

  // Index of `column`, or -1.
  int index_of(std::string_view column) const;
};

TableSchema page_table_schema();
TableSchema redirect_table_schema();
TableSchema page_props_table_schema();

// Pull-style byte input.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Fills up to buffer.size() bytes; returns 0 at end of input.
  virtual std::size_t read(std::span<char> buffer) = 0;
};

// Wraps a stream; gzip input is detected by its magic bytes and inflated.
std::unique_ptr<ByteSource> make_stream_source(std::istream &in);
// Opens a (possibly gzipped) dump file.
std::unique_ptr<ByteSource> open_dump_file(const std::filesystem::path &path);
std::unique_ptr<ByteSource> make_memory_source(std::string data);

// Streaming reader over a mysqldump file. Yields the tuples of every
// `INSERT INTO <schema.table> VALUES (...),(...);` statement and skips all
// other statements. A `CREATE TABLE` for the same table replaces the
// declared column list, so dumps whose column order drifted between
// MediaWiki versions still resolve columns by name. Memory use is bounded
// by the input buffer plus the largest single tuple.
class SqlDumpReader {
 public:
  SqlDumpReader(std::unique_ptr<ByteSource> source, TableSchema schema);
  ~SqlDumpReader();
  SqlDumpReader(SqlDumpReader &&) noexcept;
  SqlDumpReader &operator=(SqlDumpReader &&) noexcept;

  std::optional<SqlTuple> next();

  const TableSchema &schema() const;
  std::uint64_t offset() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Renders tuples as extended INSERT statements the way mysqldump does
// (`rows_per_statement` tuples per statement).
std::string write_insert_statements(const std::string &table, std::span<const SqlTuple> tuples,
                                    std::size_t rows_per_statement = 100);
std::string write_sql_value(const SqlValue &value);

}  // namespace dhbb

#endif  // DHBB_SQL_DUMP_H_
