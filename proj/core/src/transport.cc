#include "dhbb/transport.h"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dhbb/wikidata.h"
#include "json.hpp"

namespace dhbb {

using nlohmann::json;

namespace {

constexpr std::string_view kEntityProps = "aliases|claims|descriptions|labels|sitelinks";

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.' || c == '~';
    if (unreserved) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

std::vector<std::string> split_ids(const std::string &ids) {
  std::vector<std::string> out;
  std::stringstream in(ids);
  std::string id;
  while (std::getline(in, id, '|')) {
    if (!id.empty()) out.push_back(id);
  }
  return out;
}

ApiRequest single_entity_request(const ApiRequest &batch, const std::string &id) {
  ApiRequest one = batch;
  one.set("ids", id);
  return one;
}

}  // namespace

ApiRequest ApiRequest::search(std::string_view query, std::string_view language, int limit) {
  ApiRequest r;
  r.set("action", "wbsearchentities");
  r.set("format", "json");
  r.set("language", std::string(language));
  r.set("uselang", std::string(language));
  r.set("limit", std::to_string(limit));
  r.set("search", std::string(query));
  r.set("type", "item");
  return r;
}

ApiRequest ApiRequest::get_entities(std::span<const Qid> ids) {
  ApiRequest r;
  r.set("action", "wbgetentities");
  r.set("format", "json");
  r.set("props", std::string(kEntityProps));
  std::string joined;
  for (Qid q : ids) {
    if (!joined.empty()) joined += '|';
    joined += q.str();
  }
  r.set("ids", joined);
  return r;
}

void ApiRequest::set(std::string key, std::string value) {
  auto it = std::lower_bound(params_.begin(), params_.end(), key,
                             [](const auto &p, const std::string &k) { return p.first < k; });
  if (it != params_.end() && it->first == key) {
    it->second = std::move(value);
  } else {
    params_.insert(it, {std::move(key), std::move(value)});
  }
}

std::string ApiRequest::get(std::string_view key) const {
  for (const auto &[k, v] : params_) {
    if (k == key) return v;
  }
  return {};
}

std::string ApiRequest::canonical() const {
  std::string out;
  for (const auto &[k, v] : params_) {
    if (!out.empty()) out += '&';
    out += k + "=" + v;
  }
  return out;
}

std::string ApiRequest::query_string() const {
  std::string out;
  for (const auto &[k, v] : params_) {
    if (!out.empty()) out += '&';
    out += percent_encode(k) + "=" + percent_encode(v);
  }
  return out;
}

std::string ApiRequest::fixture_key() const { return sha256_hex(canonical()); }

void write_fixture(const std::filesystem::path &dir, const ApiRequest &request,
                   const HttpResponse &response) {
  std::filesystem::create_directories(dir);
  json doc = {{"request", request.canonical()}, {"status", response.status}, {"body", response.body}};
  std::ofstream out(dir / (request.fixture_key() + ".json"), std::ios::trunc);
  out << doc.dump(2) << "\n";
  if (!out) throw WikidataError(WikidataErrc::kNetworkError, "cannot write fixture in " + dir.string());
}

FixtureTransport::FixtureTransport(std::filesystem::path dir, OnMissing on_missing)
    : dir_(std::move(dir)), on_missing_(on_missing) {}

std::optional<HttpResponse> FixtureTransport::load(const ApiRequest &request) const {
  std::ifstream in(dir_ / (request.fixture_key() + ".json"));
  if (!in) return std::nullopt;
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw WikidataError(WikidataErrc::kBadResponse, "fixture for " + request.canonical() + ": " + e.what());
  }
  if (doc.value("request", "") != request.canonical()) {
    throw WikidataError(WikidataErrc::kBadResponse, "fixture key collision for " + request.canonical());
  }
  return HttpResponse{doc.value("status", 200), doc.value("body", ""), std::nullopt};
}

HttpResponse FixtureTransport::send(const ApiRequest &request) {
  const std::string action = request.get("action");
  if (action != "wbgetentities") {
    if (auto r = load(request)) return *r;
    if (on_missing_ == OnMissing::kEmptyResult && action == "wbsearchentities") {
      return HttpResponse{200, R"({"search":[]})", std::nullopt};
    }
    throw WikidataError(WikidataErrc::kFixtureMissing, request.canonical());
  }

  json merged = {{"entities", json::object()}};
  for (const auto &id : split_ids(request.get("ids"))) {
    ApiRequest one = single_entity_request(request, id);
    auto r = load(one);
    if (!r) {
      if (on_missing_ == OnMissing::kError) {
        throw WikidataError(WikidataErrc::kFixtureMissing, one.canonical());
      }
      merged["entities"][id] = {{"id", id}, {"missing", ""}};
      continue;
    }
    if (r->status != 200) return *r;
    json part = json::parse(r->body);
    const json entities = part.value("entities", json::object());
    for (const auto &[key, value] : entities.items()) {
      merged["entities"][key] = value;
    }
  }
  return HttpResponse{200, merged.dump(), std::nullopt};
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

HttpResponse RecordingTransport::send(const ApiRequest &request) {
  HttpResponse response = inner_->send(request);
  if (response.status != 200) return response;
  if (request.get("action") != "wbgetentities") {
    write_fixture(dir_, request, response);
    return response;
  }
  json doc = json::parse(response.body);
  const json entities = doc.value("entities", json::object());
  for (const auto &id : split_ids(request.get("ids"))) {
    if (!entities.contains(id)) continue;
    json part = {{"entities", {{id, entities.at(id)}}}};
    write_fixture(dir_, single_entity_request(request, id), HttpResponse{200, part.dump(), std::nullopt});
  }
  return response;
}

}  // namespace dhbb
