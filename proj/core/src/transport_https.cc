#include "dhbb/transport.h"
#include "dhbb/wikidata.h"
#include "httplib.h"

namespace dhbb {

namespace {

// One connection per request, so concurrent permits from the rate limiter
// really are concurrent.
class HttpsTransport : public Transport {
 public:
  explicit HttpsTransport(HttpsOptions options) : options_(std::move(options)) {}

  HttpResponse send(const ApiRequest &request) override {
    httplib::SSLClient client(options_.host);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_follow_location(true);
    httplib::Headers headers = {{"User-Agent", options_.user_agent},
                                {"Accept", "application/json"}};
    auto result = client.Get(options_.path + "?" + request.query_string(), headers);
    if (!result) {
      throw WikidataError(WikidataErrc::kNetworkError, httplib::to_string(result.error()),
                          /*retryable=*/true);
    }
    HttpResponse response{result->status, result->body, std::nullopt};
    if (result->has_header("Retry-After")) {
      try {
        response.retry_after_seconds = std::stoi(result->get_header_value("Retry-After"));
      } catch (const std::exception &) {
      }
    }
    return response;
  }

 private:
  HttpsOptions options_;
};

}  // namespace

std::shared_ptr<Transport> make_https_transport(HttpsOptions options) {
  return std::make_shared<HttpsTransport>(std::move(options));
}

}  // namespace dhbb
