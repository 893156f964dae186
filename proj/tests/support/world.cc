#include "world.h"

#include <fstream>
#include <random>
#include <sstream>

#include "dhbb/sql_dump.h"
#include "dhbb/transport.h"
#include "json.hpp"

namespace dhbb::testing {

using nlohmann::json;

TempDir::TempDir() {
  std::random_device rd;
  std::mt19937_64 rng(rd());
  path_ = std::filesystem::temp_directory_path() / ("dhbb-test-" + std::to_string(rng()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path data_dir() { return DHBB_TEST_DATA_DIR; }

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path &path, const std::string &contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

World World::load(const std::filesystem::path &json_path) { return parse(read_file(json_path)); }

World World::parse(const std::string &json_text) {
  World w;
  w.json_ = json_text;
  return w;
}

std::vector<std::string> World::wikis() const {
  std::vector<std::string> out;
  const json wikis = json::parse(json_).at("wikis");
  for (const auto &[wiki, _] : wikis.items()) out.push_back(wiki);
  return out;
}

namespace {

std::string db_title(std::string title) {
  for (char &c : title) {
    if (c == ' ') c = '_';
  }
  return title;
}

SqlTuple page_tuple(std::int64_t id, const std::string &title, bool redirect) {
  return SqlTuple{{id, std::int64_t{0}, db_title(title), std::int64_t{redirect ? 1 : 0},
                   std::int64_t{0}, 0.5, std::string("20240101000000"),
                   std::string("20240101000000"), std::int64_t{1}, std::int64_t{100},
                   std::string("wikitext"), SqlValue{}}};
}

json entity_body(const json &e) {
  json item = {{"type", "item"}, {"id", e["id"]}};
  json labels = json::object(), descriptions = json::object(), aliases = json::object();
  const json e_labels = e.value("labels", json::object());
  const json e_descriptions = e.value("descriptions", json::object());
  const json e_aliases = e.value("aliases", json::object());
  for (const auto &[lang, v] : e_labels.items()) {
    labels[lang] = {{"language", lang}, {"value", v}};
  }
  for (const auto &[lang, v] : e_descriptions.items()) {
    descriptions[lang] = {{"language", lang}, {"value", v}};
  }
  for (const auto &[lang, list] : e_aliases.items()) {
    for (const auto &v : list) aliases[lang].push_back({{"language", lang}, {"value", v}});
  }
  json claims = json::object();
  for (const auto &[key, property] :
       std::map<std::string, std::string>{{"instance_of", "P31"}, {"country", "P17"}, {"citizenship", "P27"}}) {
    if (!e.contains(key)) continue;
    claims[property] = json::array();
    for (const auto &q : e[key]) {
      std::string id = q.get<std::string>();
      claims[property].push_back(
          {{"mainsnak",
            {{"snaktype", "value"},
             {"property", property},
             {"datavalue",
              {{"value", {{"entity-type", "item"}, {"numeric-id", std::stoull(id.substr(1))}, {"id", id}}},
               {"type", "wikibase-entityid"}}}}},
           {"type", "statement"},
           {"rank", "normal"}});
    }
  }
  item["labels"] = labels;
  item["descriptions"] = descriptions;
  item["aliases"] = aliases;
  item["claims"] = claims;
  item["sitelinks"] = json::object();
  return {{"entities", {{e["id"].get<std::string>(), item}}}};
}

}  // namespace

WorldDumps World::dumps(const std::string &wiki) const {
  json w = json::parse(json_)["wikis"][wiki];
  std::vector<SqlTuple> pages, redirects, props;
  std::map<std::string, std::int64_t> ids;
  std::int64_t next_id = 1;
  for (const auto &p : w["pages"]) ids[p["title"].get<std::string>()] = next_id++;
  for (const auto &p : w["pages"]) {
    std::string title = p["title"];
    std::int64_t id = ids[title];
    bool redirect = p.contains("redirect_to");
    pages.push_back(page_tuple(id, title, redirect));
    if (redirect) {
      redirects.push_back(SqlTuple{{id, std::int64_t{0}, db_title(p["redirect_to"]), std::string(),
                                    std::string()}});
    }
    if (p.contains("qid")) {
      props.push_back(SqlTuple{{id, std::string("wikibase_item"), p["qid"].get<std::string>(), SqlValue{}}});
    }
  }
  return {write_insert_statements("page", pages), write_insert_statements("redirect", redirects),
          write_insert_statements("page_props", props)};
}

SitelinkIndex World::index(const std::string &wiki) const {
  WorldDumps d = dumps(wiki);
  IndexBuildOptions options;
  options.source_label = wiki;
  return build_index(make_memory_source(d.page), make_memory_source(d.redirect),
                     make_memory_source(d.page_props), options)
      .index;
}

IndexSet World::indexes(const LinkerConfig &config) const {
  IndexSet out;
  auto have = wikis();
  for (const auto &wiki : config.wikis) {
    if (std::find(have.begin(), have.end(), wiki) == have.end()) continue;
    out.push_back({wiki, std::make_shared<const SitelinkIndex>(index(wiki))});
  }
  return out;
}

void World::write_fixtures(const std::filesystem::path &dir, int search_limit) const {
  std::filesystem::create_directories(dir);
  json world = json::parse(json_);
  for (const auto &s : world.value("searches", json::array())) {
    std::string query = s["query"];
    json hits = json::array();
    for (const auto &h : s["hits"]) {
      json hit = {{"id", h["id"]}, {"title", h["id"]}, {"label", h["label"]}};
      if (h.contains("description")) hit["description"] = h["description"];
      hit["match"] = {{"type", h.value("match_type", "label")},
                      {"language", s.value("language", "pt")},
                      {"text", h.value("match_text", h["label"].get<std::string>())}};
      hits.push_back(hit);
    }
    json body = {{"searchinfo", {{"search", query}}}, {"search", hits}, {"success", 1}};
    write_fixture(dir, ApiRequest::search(query, s.value("language", "pt"), search_limit),
                  HttpResponse{200, body.dump(), std::nullopt});
  }
  for (const auto &e : world.value("entities", json::array())) {
    Qid q = Qid::from_string(e["id"].get<std::string>());
    write_fixture(dir, ApiRequest::get_entities(std::span<const Qid>(&q, 1)),
                  HttpResponse{200, entity_body(e).dump(), std::nullopt});
  }
}

void World::write_indexes(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  for (const auto &wiki : wikis()) index(wiki).save(dir / (wiki + ".idx"));
}

}  // namespace dhbb::testing
