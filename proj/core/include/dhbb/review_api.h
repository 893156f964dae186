#ifndef DHBB_REVIEW_API_H_
#define DHBB_REVIEW_API_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dhbb/corpus.h"
#include "dhbb/mapping_store.h"

namespace dhbb {

struct ReviewRequest {
  std::string method;  // "GET", "POST"
  std::string path;    // "/api/queue"
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct ReviewResponse {
  int status = 200;
  std::string body;  // JSON
};

// JSON review API over a store and the corpus it was built from. Every write
// goes through MappingStore::apply_human, the same path adjudication imports
// use. Transport-agnostic: the HTTP server only translates requests.
//
//   GET  /api/stats
//   GET  /api/queue?status=<record status>&page=<n>&page_size=<n>
//   GET  /api/entries/{id}
//   POST /api/entries/{id}/decision  {"verdict", "qid", "reviewer", "note"}
class ReviewApi {
 public:
  static constexpr std::size_t kDefaultPageSize = 50;
  static constexpr std::size_t kMaxPageSize = 500;
  static constexpr const char *kTokenHeader = "x-review-token";

  // `entries` must outlive the API. With a token set, POSTs must carry it.
  ReviewApi(MappingStore &store, const std::vector<Entry> &entries,
            std::optional<std::string> token = std::nullopt);

  ReviewResponse handle(const ReviewRequest &request) const;

 private:
  ReviewResponse stats() const;
  ReviewResponse queue(const ReviewRequest &request) const;
  ReviewResponse entry(std::int64_t id) const;
  ReviewResponse decide(std::int64_t id, const ReviewRequest &request) const;
  const Entry *find(std::int64_t id) const;

  MappingStore &store_;
  const std::vector<Entry> &entries_;
  std::map<std::int64_t, std::size_t> by_id_;
  std::optional<std::string> token_;
};

}  // namespace dhbb

#endif  // DHBB_REVIEW_API_H_
