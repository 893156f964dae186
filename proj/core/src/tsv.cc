#include "dhbb/tsv.h"

namespace dhbb::tsv {

std::string_view to_string(TsvErrc code) {
  switch (code) {
    case TsvErrc::kMalformedRow: return "MalformedRow";
    case TsvErrc::kHeaderMismatch: return "HeaderMismatch";
  }
  return "TsvError";
}

namespace {

void append_field(std::string &out, const Field &field) {
  if (!field) return;
  const std::string &s = *field;
  if (!s.empty() && s.find_first_of("\t\n\r\"") == std::string::npos) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string write_row(const Row &row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += '\t';
    append_field(out, row[i]);
  }
  out += '\n';
  return out;
}

std::string write_row(const std::vector<std::string> &row) {
  Row fields(row.begin(), row.end());
  return write_row(fields);
}

std::optional<Row> Reader::next() {
  if (pos_ >= data_.size()) return std::nullopt;
  record_line_ = current_line_;
  Row row;
  while (true) {
    Field field;
    if (pos_ < data_.size() && data_[pos_] == '"') {
      ++pos_;
      std::string value;
      while (true) {
        if (pos_ >= data_.size()) {
          throw TsvError(TsvErrc::kMalformedRow, "unterminated quoted field", record_line_);
        }
        char c = data_[pos_++];
        if (c == '"') {
          if (pos_ < data_.size() && data_[pos_] == '"') {
            value += '"';
            ++pos_;
            continue;
          }
          break;
        }
        if (c == '\n') ++current_line_;
        value += c;
      }
      if (pos_ < data_.size() && data_[pos_] != '\t' && data_[pos_] != '\n' &&
          !(data_[pos_] == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n')) {
        throw TsvError(TsvErrc::kMalformedRow, "text after closing quote", record_line_);
      }
      field = std::move(value);
    } else {
      std::size_t end = data_.find_first_of("\t\n", pos_);
      if (end == std::string_view::npos) end = data_.size();
      std::string_view raw = data_.substr(pos_, end - pos_);
      if (!raw.empty() && raw.back() == '\r' && (end == data_.size() || data_[end] == '\n')) {
        raw.remove_suffix(1);
      }
      if (raw.find('"') != std::string_view::npos) {
        throw TsvError(TsvErrc::kMalformedRow, "stray quote in unquoted field", record_line_);
      }
      if (!raw.empty()) field = std::string(raw);
      pos_ = end;
    }
    row.push_back(std::move(field));
    if (pos_ < data_.size() && data_[pos_] == '\r') ++pos_;
    if (pos_ >= data_.size()) break;
    char sep = data_[pos_++];
    if (sep == '\n') {
      ++current_line_;
      break;
    }
  }
  return row;
}

void expect_header(Reader &reader, const std::vector<std::string> &expected) {
  auto header = reader.next();
  bool ok = header && header->size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    ok = (*header)[i] && *(*header)[i] == expected[i];
  }
  if (!ok) {
    std::string want;
    for (const auto &h : expected) want += (want.empty() ? "" : "\t") + h;
    throw TsvError(TsvErrc::kHeaderMismatch, "expected header: " + want, 1);
  }
}

}  // namespace dhbb::tsv
