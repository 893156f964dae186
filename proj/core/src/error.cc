#include "dhbb/error.h"

namespace dhbb {

namespace {

std::string compose(const std::string &kind, const std::string &detail) {
  if (detail.empty()) return kind;
  return kind + ": " + detail;
}

}  // namespace

Error::Error(std::string kind, std::string detail)
    : std::runtime_error(compose(kind, detail)),
      kind_(std::move(kind)),
      detail_(std::move(detail)) {}

}  // namespace dhbb
