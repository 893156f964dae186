#ifndef DHBB_RESPONSE_CACHE_H_
#define DHBB_RESPONSE_CACHE_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "dhbb/rate_limiter.h"

namespace dhbb {

namespace sql {
class Database;
}

// Persistent (endpoint, key) -> response body cache in an SQLite file, which
// may be the mapping store's file. Entries older than the staleness horizon
// are ignored. Concurrent put() on one key: last writer wins.
class ResponseCache {
 public:
  static constexpr std::chrono::hours kDefaultStaleness{24 * 30};

  // `path` may be ":memory:".
  ResponseCache(const std::string &path, std::shared_ptr<Clock> clock,
                std::chrono::seconds staleness = kDefaultStaleness);
  ~ResponseCache();

  std::optional<std::string> get(std::string_view endpoint, std::string_view key);
  void put(std::string_view endpoint, std::string_view key, std::string_view body);
  std::size_t size();

 private:
  std::mutex mu_;
  std::unique_ptr<sql::Database> db_;
  std::shared_ptr<Clock> clock_;
  std::chrono::seconds staleness_;
};

}  // namespace dhbb

#endif  // DHBB_RESPONSE_CACHE_H_
