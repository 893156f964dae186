#ifndef DHBB_TSV_H_
#define DHBB_TSV_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/error.h"

namespace dhbb::tsv {

enum class TsvErrc { kMalformedRow, kHeaderMismatch };
std::string_view to_string(TsvErrc code);

class TsvError : public CodedError<TsvErrc> {
 public:
  TsvError(TsvErrc code, std::string detail, std::size_t line)
      : CodedError(code, std::move(detail)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An absent field is written as nothing; a present empty string as "".
using Field = std::optional<std::string>;
using Row = std::vector<Field>;

// Fields containing a tab, newline, carriage return or double quote are
// wrapped in double quotes with inner quotes doubled.
std::string write_row(const Row &row);
std::string write_row(const std::vector<std::string> &row);

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  // Next record, or nullopt at end of input. Quoted fields may span lines.
  std::optional<Row> next();
  // 1-based line on which the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t current_line_ = 1;
  std::size_t record_line_ = 0;
};

// Reads the header row and throws kHeaderMismatch unless it equals `expected`.
void expect_header(Reader &reader, const std::vector<std::string> &expected);

}  // namespace dhbb::tsv

#endif  // DHBB_TSV_H_
