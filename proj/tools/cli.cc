#include "cli.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <csignal>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dhbb/config.h"
#include "dhbb/corpus.h"
#include "dhbb/evaluator.h"
#include "dhbb/linker.h"
#include "dhbb/mapping_store.h"
#include "dhbb/rate_limiter.h"
#include "dhbb/response_cache.h"
#include "dhbb/review_api.h"
#include "dhbb/sitelink_index.h"
#include "dhbb/transport.h"
#include "dhbb/wd_client.h"
#include "review_server.h"

namespace dhbb::cli {

namespace {

// Flags shared by every command that talks to Wikidata.
struct RemoteFlags {
  std::string fixtures;
  bool fixtures_strict = false;
  bool offline = false;
  std::string cache;
  std::string record;
};

void add_remote_flags(CLI::App *cmd, RemoteFlags &f) {
  cmd->add_option("--fixtures", f.fixtures, "Answer Wikidata requests from a fixture directory");
  cmd->add_flag("--fixtures-strict", f.fixtures_strict,
                "Fail on requests with no fixture instead of treating them as empty");
  cmd->add_flag("--offline", f.offline, "Skip remote search and entity fetches entirely");
  cmd->add_option("--cache", f.cache, "SQLite response cache file");
  cmd->add_option("--record", f.record, "Write every live response as a fixture into this directory");
}

std::shared_ptr<WikidataClient> make_client(const RemoteFlags &f, const LinkerConfig &config,
                                            int jobs) {
  if (f.offline) return nullptr;
  std::shared_ptr<Transport> transport;
  RateLimitOptions rate = config.rate;
  if (!f.fixtures.empty()) {
    transport = std::make_shared<FixtureTransport>(
        f.fixtures, f.fixtures_strict ? FixtureTransport::OnMissing::kError
                                      : FixtureTransport::OnMissing::kEmptyResult);
    // Nothing leaves the machine, so there is nothing to be polite to.
    rate = {1e9, std::max(jobs, 1), std::chrono::milliseconds(0)};
  } else {
    transport = make_https_transport();
    if (!f.record.empty()) transport = std::make_shared<RecordingTransport>(transport, f.record);
  }
  auto clock = std::make_shared<SystemClock>();
  std::shared_ptr<ResponseCache> cache;
  if (!f.cache.empty()) cache = std::make_shared<ResponseCache>(f.cache, clock, config.cache_staleness);
  return std::make_shared<WikidataClient>(transport, std::make_shared<RateLimiter>(rate, clock), cache);
}

// Config file (optional) plus command-line overrides.
struct ConfigFlags {
  std::string path;
  std::optional<double> accept_threshold;
  std::optional<double> ambiguity_margin;
  std::optional<int> fuzzy_max_edits;
  std::vector<std::string> set;
};

void add_config_flags(CLI::App *cmd, ConfigFlags &f) {
  cmd->add_option("--config", f.path, "Linker configuration file (key = value)");
  cmd->add_option("--accept-threshold", f.accept_threshold, "Override accept_threshold");
  cmd->add_option("--ambiguity-margin", f.ambiguity_margin, "Override ambiguity_margin");
  cmd->add_option("--fuzzy-max-edits", f.fuzzy_max_edits, "Override fuzzy_max_edits");
  cmd->add_option("--set", f.set, "Override any configuration key: --set key=value");
}

LinkerConfig load_effective_config(const ConfigFlags &f) {
  LinkerConfig config = f.path.empty() ? LinkerConfig{} : load_config(f.path);
  if (f.accept_threshold) config.accept_threshold = *f.accept_threshold;
  if (f.ambiguity_margin) config.ambiguity_margin = *f.ambiguity_margin;
  if (f.fuzzy_max_edits) config.fuzzy_max_edits = *f.fuzzy_max_edits;
  for (const auto &kv : f.set) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(ConfigErrc::kInvalidValue, "--set " + kv);
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate(config);
  return config;
}

// Writes to --out when given, else to the command's standard output.
class Output {
 public:
  Output(const std::string &path, std::ostream &fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("IoError", "cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream &stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream *stream_;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Corpus load_corpus_verbose(const std::string &dir, std::ostream &err) {
  Corpus corpus = load_corpus(dir);
  err << "corpus: " << corpus.stats.total << " entries (" << corpus.stats.biographical
      << " biographical, " << corpus.stats.thematic << " thematic)\n";
  for (const auto &f : corpus.failures) {
    err << "  skipped " << f.source_path << ": " << f.kind << ": " << f.message << "\n";
  }
  return corpus;
}

IndexSet load_indexes(const std::vector<std::string> &specs, const LinkerConfig &config,
                      std::ostream &err) {
  std::vector<WikiIndex> loaded;
  for (const auto &spec : specs) {
    std::string wiki, path = spec;
    if (auto eq = spec.find('='); eq != std::string::npos) {
      wiki = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    }
    auto index = std::make_shared<const SitelinkIndex>(SitelinkIndex::load(path));
    if (wiki.empty()) wiki = index->source_label();
    err << "index " << wiki << ": " << index->stats().qids << " titles, "
        << index->stats().redirects << " redirects\n";
    loaded.push_back({wiki, std::move(index)});
  }
  // Configured wiki order first; anything else afterwards, as given.
  IndexSet ordered;
  for (const auto &wiki : config.wikis) {
    auto it = std::find_if(loaded.begin(), loaded.end(), [&](const WikiIndex &w) { return w.wiki == wiki; });
    if (it == loaded.end()) {
      if (!loaded.empty()) err << "warning: no index loaded for " << wiki << "\n";
      continue;
    }
    ordered.push_back(std::move(*it));
    loaded.erase(it);
  }
  for (auto &w : loaded) ordered.push_back(std::move(w));
  return ordered;
}

std::atomic<ReviewServer *> g_server{nullptr};

void handle_stop_signal(int) {
  if (ReviewServer *s = g_server.load()) s->stop();
}

void set_env_names(CLI::App *cmd) {
  for (CLI::Option *opt : cmd->get_options()) {
    const auto &names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    std::string env = "DHBB_" + names.front();
    for (char &c : env) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    opt->envname(env);
  }
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Link DHBB entries to Wikidata items", "dhbb"};
  app.require_subcommand(1);

  // build-index
  auto *build = app.add_subcommand("build-index", "Build a title -> QID index from Wikipedia SQL dumps");
  std::string page_dump, redirect_dump, props_dump, index_out, wiki_label;
  int namespace_id = 0;
  std::optional<std::int64_t> created_at;
  build->add_option("--page", page_dump, "page table dump (.sql or .sql.gz)")->required();
  build->add_option("--redirect", redirect_dump, "redirect table dump")->required();
  build->add_option("--page-props", props_dump, "page_props table dump")->required();
  build->add_option("--out", index_out, "Index file to write")->required();
  build->add_option("--wiki", wiki_label, "Wiki name stored in the index, e.g. ptwiki")->required();
  build->add_option("--namespace", namespace_id, "Namespace to index")->capture_default_str();
  build->add_option("--created-at", created_at, "Creation time to record (unix seconds; default now)");

  // link
  auto *link = app.add_subcommand("link", "Link corpus entries and print the coverage report");
  std::string corpus_dir, store_path, report_out, decisions_out;
  std::vector<std::string> index_specs;
  ConfigFlags config_flags;
  RemoteFlags remote;
  bool force = false;
  int jobs = 1;
  link->add_option("--corpus", corpus_dir, "Directory of <id>.text entries")->required();
  link->add_option("--index", index_specs, "Index file, optionally as wiki=path (repeatable)");
  link->add_option("--store", store_path, "Mapping store file")->required();
  link->add_flag("--force", force, "Relink entries that already have a decision");
  link->add_option("--jobs", jobs, "Entries linked concurrently")->capture_default_str();
  link->add_option("--out", report_out, "Write the coverage report here instead of stdout");
  link->add_option("--decisions", decisions_out, "Write every decision as JSON lines");
  add_config_flags(link, config_flags);
  add_remote_flags(link, remote);

  // sample
  auto *sample = app.add_subcommand("sample", "Draw a stratified evaluation sample");
  std::size_t per_stratum = 25;
  std::uint64_t seed = 0;
  std::string plan_out;
  sample->add_option("--store", store_path, "Mapping store file")->required();
  sample->add_option("--per-stratum", per_stratum, "Entries per stratum")->capture_default_str();
  sample->add_option("--seed", seed, "Sampling seed")->required();
  sample->add_option("--out", plan_out, "Plan TSV (default stdout)");

  // adjudicate-import
  auto *adjudicate = app.add_subcommand("adjudicate-import", "Apply adjudication verdicts to the store");
  std::string adjudications_path;
  bool force_human = false;
  adjudicate->add_option("--store", store_path, "Mapping store file")->required();
  adjudicate->add_option("--adjudications", adjudications_path, "Adjudication TSV")->required();
  adjudicate->add_flag("--force", force_human, "Overwrite conflicting human records");

  // evaluate
  auto *evaluate = app.add_subcommand("evaluate", "Compute error and recoverability rates");
  std::string eval_out;
  evaluate->add_option("--adjudications", adjudications_path, "Adjudication TSV")->required();
  evaluate->add_option("--out", eval_out, "Report file (default stdout)");

  // export / import-tsv
  auto *export_cmd = app.add_subcommand("export", "Export the mapping spreadsheet as TSV");
  std::string export_out;
  export_cmd->add_option("--store", store_path, "Mapping store file")->required();
  export_cmd->add_option("--out", export_out, "TSV file (default stdout)");

  auto *import_cmd = app.add_subcommand("import-tsv", "Load an edited mapping spreadsheet into the store");
  std::string import_in;
  import_cmd->add_option("--store", store_path, "Mapping store file")->required();
  import_cmd->add_option("--in", import_in, "TSV file")->required();

  // gaps
  auto *gaps = app.add_subcommand("gaps", "List entries missing from Wikidata");
  std::string gaps_out;
  gaps->add_option("--store", store_path, "Mapping store file")->required();
  gaps->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  gaps->add_option("--out", gaps_out, "TSV file (default stdout)");

  // serve
  auto *serve = app.add_subcommand("serve", "Run the review API and UI");
  std::string host = "127.0.0.1", ui_dir, token;
  int port = 8080;
  serve->add_option("--store", store_path, "Mapping store file")->required();
  serve->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--ui", ui_dir, "Built review UI directory served at /");
  serve->add_option("--token", token, "Require this value in the X-Review-Token header on writes");

  // bootstrap-config
  auto *bootstrap = app.add_subcommand("bootstrap-config",
                                       "Look up the Brazil and disambiguation QIDs and write a config");
  std::string bootstrap_out;
  bootstrap->add_option("--out", bootstrap_out, "Config file (default stdout)");
  add_remote_flags(bootstrap, remote);

  for (CLI::App *cmd : app.get_subcommands([](CLI::App *) { return true; })) set_env_names(cmd);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp &) {
    CLI::App *parsed = nullptr;
    for (CLI::App *cmd : app.get_subcommands()) parsed = cmd;
    out << (parsed ? parsed->help() : app.help());
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << "\n\n";
    CLI::App *parsed = nullptr;
    for (CLI::App *cmd : app.get_subcommands()) parsed = cmd;
    err << (parsed ? parsed->help() : app.help());
    return kExitUsage;
  }

  try {
    if (*build) {
      IndexBuildOptions options;
      options.source_label = wiki_label;
      options.namespace_id = namespace_id;
      options.created_at = created_at.value_or(static_cast<std::int64_t>(std::time(nullptr)));
      err << "parsing dumps...\n";
      IndexBuildResult result = build_index_from_files(page_dump, redirect_dump, props_dump, options);
      for (const auto &w : result.warnings) err << "warning: " << w << "\n";
      result.index.save(index_out);
      const auto &s = result.index.stats();
      out << wiki_label << ": " << s.pages << " pages, " << s.qids << " titles with items, "
          << s.redirects << " redirects -> " << index_out << "\n";
      return kExitOk;
    }

    if (*link) {
      LinkerConfig config = load_effective_config(config_flags);
      if (!config.brazil_qid) err << "warning: brazil_qid unset; country filters disabled\n";
      Corpus corpus = load_corpus_verbose(corpus_dir, err);
      IndexSet indexes = load_indexes(index_specs, config, err);
      auto client = make_client(remote, config, jobs);
      if (indexes.empty() && !client) {
        err << "usage error: need at least one --index or a Wikidata client\n\n" << link->help();
        return kExitUsage;
      }
      MappingStore store(store_path);
      LinkRunOptions options;
      options.force = force;
      options.jobs = jobs;
      LinkRunResult result = link_corpus(corpus.entries, indexes, client.get(), config, &store, options);
      err << "linked " << result.decisions.size() << " entries (" << result.resumed << " resumed, "
          << result.failures.size() << " failed, " << result.conflicts
          << " kept by human review)\n";
      for (const auto &f : result.failures) err << "  entry " << f.entry_id << ": " << f.message << "\n";
      if (client) err << "network calls: " << client->network_calls() << "\n";
      if (!decisions_out.empty()) {
        Output decisions(decisions_out, out);
        for (const auto &d : result.decisions) decisions.stream() << decision_to_json(d) << "\n";
      }
      Output report(report_out, out);
      report.stream() << render_coverage(result.report);
      return kExitOk;
    }

    if (*sample) {
      MappingStore store(store_path);
      SamplePlan plan = stratified_sample(store, per_stratum, seed);
      for (const auto &w : plan.warnings) err << "warning: " << w << "\n";
      for (const auto &[s, ids] : plan.entries) {
        err << to_string(s) << ": " << ids.size() << " of " << plan.population.at(s) << "\n";
      }
      Output o(plan_out, out);
      o.stream() << render_plan_tsv(plan, store);
      return kExitOk;
    }

    if (*adjudicate) {
      MappingStore store(store_path);
      auto records = parse_adjudications_tsv(read_file(adjudications_path));
      ApplyResult r = apply_adjudications(store, records, force_human);
      out << r.changed << " changed, " << r.unchanged << " unchanged, " << r.conflicts.size()
          << " conflicts\n";
      for (auto id : r.conflicts) err << "  conflict: entry " << id << " already has a different human decision\n";
      return r.conflicts.empty() ? kExitOk : kExitFailure;
    }

    if (*evaluate) {
      auto records = parse_adjudications_tsv(read_file(adjudications_path));
      Output o(eval_out, out);
      o.stream() << render_report(compute_metrics(records));
      return kExitOk;
    }

    if (*export_cmd) {
      MappingStore store(store_path);
      if (export_out.empty()) {
        store.export_tsv(out);
      } else {
        store.export_tsv(std::filesystem::path(export_out));
        err << store.size() << " records -> " << export_out << "\n";
      }
      return kExitOk;
    }

    if (*import_cmd) {
      MappingStore store(store_path);
      out << store.import_tsv_file(import_in) << " records created or changed\n";
      return kExitOk;
    }

    if (*gaps) {
      MappingStore store(store_path);
      Corpus corpus = load_corpus_verbose(corpus_dir, err);
      auto items = gap_report(store, corpus.entries);
      err << items.size() << " gap items\n";
      Output o(gaps_out, out);
      o.stream() << render_gap_tsv(items);
      return kExitOk;
    }

    if (*serve) {
      MappingStore store(store_path);
      Corpus corpus = load_corpus_verbose(corpus_dir, err);
      ReviewApi api(store, corpus.entries,
                    token.empty() ? std::nullopt : std::optional<std::string>(token));
      ReviewServer server(api, ui_dir.empty() ? std::nullopt
                                              : std::optional<std::filesystem::path>(ui_dir));
      int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      err << "listening on http://" << host << ":" << bound << "\n";
      server.listen();
      g_server = nullptr;
      return kExitOk;
    }

    if (*bootstrap) {
      LinkerConfig config;
      auto client = make_client(remote, config, 1);
      if (!client) {
        err << "usage error: bootstrap-config needs Wikidata (live or --fixtures)\n";
        return kExitUsage;
      }
      auto exact = [&](std::string_view label) -> Qid {
        for (const auto &hit : client->search_entities(label, "en", 10)) {
          if (hit.label == label) return hit.qid;
        }
        throw Error("NotFound", "no item labelled \"" + std::string(label) + "\"");
      };
      config.brazil_qid = exact("Brazil");
      config.disambiguation_class_qids = {exact("Wikimedia disambiguation page")};
      err << "brazil_qid = " << config.brazil_qid->str() << ", disambiguation class = "
          << config.disambiguation_class_qids.front().str() << "\n";
      Output o(bootstrap_out, out);
      o.stream() << render_config(config);
      return kExitOk;
    }
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dhbb::cli
