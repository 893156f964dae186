#include "dhbb/wd_client.h"

#include <algorithm>

#include "dhbb/text.h"
#include "json.hpp"

namespace dhbb {

using nlohmann::json;

namespace {

constexpr std::string_view kSearchEndpoint = "wbsearchentities";
constexpr std::string_view kEntityEndpoint = "wbgetentities";

void check_api_error(const std::string &body) {
  // Cheap pre-check; most bodies carry no error member.
  if (body.find("\"error\"") == std::string::npos) return;
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object() || !doc.contains("error")) return;
  std::string code = doc["error"].value("code", "unknown");
  std::string info = doc["error"].value("info", "");
  if (code == "maxlag" || code == "ratelimited") {
    throw WikidataError(WikidataErrc::kRateLimited, code + ": " + info, /*retryable=*/true);
  }
  throw WikidataError(WikidataErrc::kServiceError, code + ": " + info);
}

}  // namespace

WikidataClient::WikidataClient(std::shared_ptr<Transport> transport,
                               std::shared_ptr<RateLimiter> limiter,
                               std::shared_ptr<ResponseCache> cache, ClientOptions options)
    : transport_(std::move(transport)),
      limiter_(std::move(limiter)),
      cache_(std::move(cache)),
      options_(options) {}

std::string WikidataClient::send_checked(const ApiRequest &request) {
  for (int attempt = 0;; ++attempt) {
    try {
      HttpResponse response;
      {
        RateLimiter::Permit permit = limiter_->acquire();
        ++network_calls_;
        response = transport_->send(request);
      }
      if (response.status == 429) {
        WikidataError e(WikidataErrc::kRateLimited, "HTTP 429", true, 429);
        if (attempt >= options_.max_retries) throw e;
        auto wait = response.retry_after_seconds
                        ? std::chrono::duration_cast<Clock::duration>(
                              std::chrono::seconds(*response.retry_after_seconds))
                        : std::chrono::duration_cast<Clock::duration>(options_.backoff * (1 << attempt));
        limiter_->clock().sleep_until(limiter_->clock().now() + wait);
        continue;
      }
      if (response.status != 200) {
        throw WikidataError(WikidataErrc::kServiceError, "HTTP " + std::to_string(response.status),
                            response.status >= 500, response.status);
      }
      check_api_error(response.body);
      return response.body;
    } catch (const WikidataError &e) {
      if (!e.retryable() || attempt >= options_.max_retries) throw;
      auto wait = std::chrono::duration_cast<Clock::duration>(options_.backoff * (1 << attempt));
      limiter_->clock().sleep_until(limiter_->clock().now() + wait);
    }
  }
}

std::vector<SearchHit> WikidataClient::search_entities(std::string_view query,
                                                       std::string_view language, int limit) {
  std::string normalized = text::collapse_whitespace(query);
  if (normalized.empty()) throw WikidataError(WikidataErrc::kInvalidRequest, "empty search query");
  if (limit < 1 || limit > kMaxSearchLimit) {
    throw WikidataError(WikidataErrc::kInvalidRequest, "search limit must be in [1, 50]");
  }
  ApiRequest request = ApiRequest::search(normalized, language, limit);
  const std::string key = request.canonical();
  if (cache_) {
    if (auto body = cache_->get(kSearchEndpoint, key)) return parse_search_response(*body);
  }
  std::string body = send_checked(request);
  std::vector<SearchHit> hits = parse_search_response(body);
  if (cache_) cache_->put(kSearchEndpoint, key, body);
  return hits;
}

EntityFetch WikidataClient::fetch_entities(std::span<const Qid> qids) {
  std::vector<Qid> wanted(qids.begin(), qids.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  EntityFetch result;
  std::vector<Qid> pending;
  auto absorb = [&result](Qid requested, const json &entity) {
    if (entity.contains("missing")) {
      result.missing.push_back(requested);
      return;
    }
    result.found.emplace(requested, parse_entity(entity.dump()));
  };

  for (Qid q : wanted) {
    std::optional<std::string> cached;
    if (cache_) cached = cache_->get(kEntityEndpoint, q.str());
    if (cached) {
      absorb(q, json::parse(*cached));
    } else {
      pending.push_back(q);
    }
  }

  for (std::size_t begin = 0; begin < pending.size(); begin += kMaxBatch) {
    std::size_t end = std::min(pending.size(), begin + kMaxBatch);
    std::span<const Qid> batch(pending.data() + begin, end - begin);
    std::string body = send_checked(ApiRequest::get_entities(batch));
    json doc = json::parse(body, nullptr, false);
    if (!doc.is_object() || !doc.contains("entities")) {
      throw WikidataError(WikidataErrc::kBadResponse, "entities response without 'entities'");
    }
    const json &entities = doc["entities"];
    for (Qid q : batch) {
      json entity = entities.contains(q.str()) ? entities[q.str()]
                                               : json{{"id", q.str()}, {"missing", ""}};
      if (cache_) cache_->put(kEntityEndpoint, q.str(), entity.dump());
      absorb(q, entity);
    }
  }
  std::sort(result.missing.begin(), result.missing.end());
  return result;
}

}  // namespace dhbb
