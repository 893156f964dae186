#ifndef DHBB_WD_CLIENT_H_
#define DHBB_WD_CLIENT_H_

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "dhbb/rate_limiter.h"
#include "dhbb/response_cache.h"
#include "dhbb/transport.h"
#include "dhbb/wikidata.h"

namespace dhbb {

struct EntityFetch {
  std::map<Qid, EntityRecord> found;
  std::vector<Qid> missing;
};

// What the linker needs from Wikidata. WikidataClient is the real thing;
// tests may substitute their own.
class EntityService {
 public:
  virtual ~EntityService() = default;
  virtual std::vector<SearchHit> search_entities(std::string_view query, std::string_view language,
                                                 int limit) = 0;
  virtual EntityFetch fetch_entities(std::span<const Qid> qids) = 0;
};

struct ClientOptions {
  int max_retries = 2;
  std::chrono::milliseconds backoff{1000};
};

// Cached, rate-limited access to wbsearchentities / wbgetentities.
class WikidataClient : public EntityService {
 public:
  static constexpr int kMaxSearchLimit = 50;
  static constexpr std::size_t kMaxBatch = 50;

  // `cache` may be null.
  WikidataClient(std::shared_ptr<Transport> transport, std::shared_ptr<RateLimiter> limiter,
                 std::shared_ptr<ResponseCache> cache, ClientOptions options = {});

  // Throws WikidataError(kInvalidRequest) for an empty query or a limit
  // outside [1, 50].
  std::vector<SearchHit> search_entities(std::string_view query, std::string_view language,
                                         int limit) override;
  // Any number of ids; batches of at most 50 go to the network.
  EntityFetch fetch_entities(std::span<const Qid> qids) override;

  // Requests that reached the transport, retries included.
  std::uint64_t network_calls() const { return network_calls_.load(); }

 private:
  std::string send_checked(const ApiRequest &request);

  std::shared_ptr<Transport> transport_;
  std::shared_ptr<RateLimiter> limiter_;
  std::shared_ptr<ResponseCache> cache_;
  ClientOptions options_;
  std::atomic<std::uint64_t> network_calls_{0};
};

}  // namespace dhbb

#endif  // DHBB_WD_CLIENT_H_
