#ifndef DHBB_WIKIDATA_H_
#define DHBB_WIKIDATA_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/error.h"
#include "dhbb/types.h"

namespace dhbb {

enum class WikidataErrc {
  kNetworkError,
  kServiceError,
  kRateLimited,
  kInvalidRequest,
  kFixtureMissing,
  kBadResponse,
};
std::string_view to_string(WikidataErrc code);

class WikidataError : public CodedError<WikidataErrc> {
 public:
  WikidataError(WikidataErrc code, std::string detail, bool retryable = false, int http_status = 0)
      : CodedError<WikidataErrc>(code, std::move(detail)),
        retryable_(retryable),
        http_status_(http_status) {}

  bool retryable() const { return retryable_; }
  int http_status() const { return http_status_; }

 private:
  bool retryable_;
  int http_status_;
};

// An item as returned by wbgetentities. A claim list is nullopt when the
// item has no statement for the property at all, which is different from
// having statements whose values are unknown (an empty list).
struct EntityRecord {
  Qid qid;
  std::map<std::string, std::string> labels;
  std::map<std::string, std::string> descriptions;
  std::map<std::string, std::vector<std::string>> aliases;
  std::optional<std::vector<Qid>> instance_of;  // P31
  std::optional<std::vector<Qid>> country;      // P17
  std::optional<std::vector<Qid>> citizenship;  // P27
  std::map<std::string, std::string> sitelinks;

  // Label in the first language of `languages` that has one.
  std::string label_in(const std::vector<std::string> &languages) const;
};

struct SearchHit {
  Qid qid;
  std::string label;
  std::optional<std::string> description;
  std::string match_text;
  std::string match_type;  // "label", "alias", ...
};

// JSON decoding of the Action API payloads.
std::vector<SearchHit> parse_search_response(std::string_view json);
// Returns found entities; ids reported as missing are appended to `missing`.
std::map<Qid, EntityRecord> parse_entities_response(std::string_view json, std::vector<Qid> *missing);
EntityRecord parse_entity(std::string_view json);

}  // namespace dhbb

#endif  // DHBB_WIKIDATA_H_
