#ifndef DHBB_ERROR_H_
#define DHBB_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dhbb {

// Base class of every error thrown by the toolkit. `kind()` is a stable tag
// such as "MissingHeader" or "ArityMismatch"; `detail()` carries the context
// (offending key, byte offset, entry id, ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string detail);

  const std::string &kind() const { return kind_; }
  const std::string &detail() const { return detail_; }

 private:
  std::string kind_;
  std::string detail_;
};

// Typed error for one module's error enum. `to_string(Code)` must be
// findable by ADL.
template <typename Code>
class CodedError : public Error {
 public:
  CodedError(Code code, std::string detail = {})
      : Error(std::string(to_string(code)), std::move(detail)), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

}  // namespace dhbb

#endif  // DHBB_ERROR_H_
