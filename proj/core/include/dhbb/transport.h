#ifndef DHBB_TRANSPORT_H_
#define DHBB_TRANSPORT_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dhbb/types.h"

namespace dhbb {

// One Action API call, parameters kept sorted by key.
class ApiRequest {
 public:
  static ApiRequest search(std::string_view query, std::string_view language, int limit);
  static ApiRequest get_entities(std::span<const Qid> ids);

  void set(std::string key, std::string value);
  std::string get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>> &params() const { return params_; }

  // "k=v&k=v" with raw (unescaped) values; the identity of a request.
  std::string canonical() const;
  // Percent-encoded query string for the wire.
  std::string query_string() const;
  // Hex SHA-256 of canonical(); names fixture files.
  std::string fixture_key() const;

 private:
  std::vector<std::pair<std::string, std::string>> params_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::optional<int> retry_after_seconds;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Throws WikidataError(kNetworkError) when no HTTP response was obtained.
  virtual HttpResponse send(const ApiRequest &request) = 0;
};

struct HttpsOptions {
  std::string host = "www.wikidata.org";
  std::string path = "/w/api.php";
  std::string user_agent = "dhbb-link/0.1 (DHBB to Wikidata linking toolkit)";
  std::chrono::seconds timeout{30};
};

std::shared_ptr<Transport> make_https_transport(HttpsOptions options = {});

// Canned responses read from `<dir>/<fixture_key>.json`, each holding
// {"request": <canonical>, "status": <int>, "body": <string>}.
// wbgetentities requests are answered per id (one fixture per entity) and
// merged, so batch composition does not affect which files are needed.
class FixtureTransport : public Transport {
 public:
  enum class OnMissing {
    kError,       // throw WikidataError(kFixtureMissing)
    kEmptyResult, // no search hits / entity reported missing
  };

  explicit FixtureTransport(std::filesystem::path dir, OnMissing on_missing = OnMissing::kError);
  HttpResponse send(const ApiRequest &request) override;

 private:
  std::optional<HttpResponse> load(const ApiRequest &request) const;

  std::filesystem::path dir_;
  OnMissing on_missing_;
};

// Forwards to `inner` and writes every 200 response as fixtures in `dir`.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path dir);
  HttpResponse send(const ApiRequest &request) override;

 private:
  std::shared_ptr<Transport> inner_;
  std::filesystem::path dir_;
};

// Counts calls that reach the wrapped transport.
class CountingTransport : public Transport {
 public:
  explicit CountingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
  HttpResponse send(const ApiRequest &request) override {
    ++calls_;
    return inner_->send(request);
  }
  std::uint64_t calls() const { return calls_.load(); }

 private:
  std::shared_ptr<Transport> inner_;
  std::atomic<std::uint64_t> calls_{0};
};

// Writes one fixture file; used by the recorder and by test setup code.
void write_fixture(const std::filesystem::path &dir, const ApiRequest &request,
                   const HttpResponse &response);

}  // namespace dhbb

#endif  // DHBB_TRANSPORT_H_
