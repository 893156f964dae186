#include "dhbb/response_cache.h"

#include "sqlite_db.h"

namespace dhbb {

ResponseCache::ResponseCache(const std::string &path, std::shared_ptr<Clock> clock,
                             std::chrono::seconds staleness)
    : db_(std::make_unique<sql::Database>(path)), clock_(std::move(clock)), staleness_(staleness) {
  if (path != ":memory:") db_->exec("PRAGMA journal_mode=WAL");
  db_->exec(
      "CREATE TABLE IF NOT EXISTS wd_cache ("
      " endpoint TEXT NOT NULL,"
      " key TEXT NOT NULL,"
      " body TEXT NOT NULL,"
      " fetched_at INTEGER NOT NULL,"
      " PRIMARY KEY (endpoint, key))");
}

ResponseCache::~ResponseCache() = default;

std::optional<std::string> ResponseCache::get(std::string_view endpoint, std::string_view key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto stmt = db_->prepare("SELECT body, fetched_at FROM wd_cache WHERE endpoint = ?1 AND key = ?2");
  stmt.bind(1, endpoint).bind(2, key);
  if (!stmt.step()) return std::nullopt;
  std::int64_t age = clock_->unix_seconds() - stmt.column_int(1);
  if (age > staleness_.count()) return std::nullopt;
  return stmt.column_text(0);
}

void ResponseCache::put(std::string_view endpoint, std::string_view key, std::string_view body) {
  std::lock_guard<std::mutex> lock(mu_);
  auto stmt = db_->prepare(
      "INSERT OR REPLACE INTO wd_cache (endpoint, key, body, fetched_at) VALUES (?1, ?2, ?3, ?4)");
  stmt.bind(1, endpoint).bind(2, key).bind(3, body).bind(4, clock_->unix_seconds());
  stmt.run();
}

std::size_t ResponseCache::size() {
  std::lock_guard<std::mutex> lock(mu_);
  auto stmt = db_->prepare("SELECT COUNT(*) FROM wd_cache");
  stmt.step();
  return static_cast<std::size_t>(stmt.column_int(0));
}

}  // namespace dhbb
