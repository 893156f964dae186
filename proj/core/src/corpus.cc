#include "dhbb/corpus.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "dhbb/text.h"

namespace dhbb {

std::string_view to_string(CorpusErrc code) {
  switch (code) {
    case CorpusErrc::kMissingHeader: return "MissingHeader";
    case CorpusErrc::kMissingRequiredKey: return "MissingRequiredKey";
    case CorpusErrc::kUnknownNature: return "UnknownNature";
    case CorpusErrc::kNonNumericFilename: return "NonNumericFilename";
    case CorpusErrc::kDirectoryNotFound: return "DirectoryNotFound";
    case CorpusErrc::kEmptyCorpus: return "EmptyCorpus";
  }
  return "CorpusError";
}

namespace {

constexpr std::string_view kDelimiter = "---";

// Splits into lines without their terminators; `offsets[i]` is the byte
// offset just past line i (including its terminator).
void split_lines(std::string_view raw, std::vector<std::string_view> *lines,
                 std::vector<std::size_t> *offsets) {
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? raw.size() : nl;
    std::string_view line = raw.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines->push_back(line);
    pos = nl == std::string_view::npos ? raw.size() : nl + 1;
    offsets->push_back(pos);
  }
}

bool is_delimiter(std::string_view line) {
  while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
  return line == kDelimiter;
}

std::string unquote(std::string value) {
  if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
      value.back() == value.front()) {
    return value.substr(1, value.size() - 2);
  }
  return value;
}

std::int64_t id_from_path(std::string_view source_path) {
  std::string stem = std::filesystem::path(std::string(source_path)).stem().string();
  bool numeric = !stem.empty() &&
                 std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; });
  std::int64_t id = 0;
  if (numeric) {
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
    numeric = ec == std::errc() && ptr == stem.data() + stem.size() && id > 0;
  }
  if (!numeric) throw CorpusError(CorpusErrc::kNonNumericFilename, std::string(source_path));
  return id;
}

Nature nature_from_header(const std::string &value) {
  std::string folded = text::to_lower(text::strip_marks(text::trim(value)));
  if (folded.starts_with("biografico")) return Nature::kBiographical;
  if (folded.starts_with("tematico")) return Nature::kThematic;
  throw CorpusError(CorpusErrc::kUnknownNature, value);
}

bool is_entry_filename(const std::string &name) {
  constexpr std::string_view kSuffix = ".text";
  if (name.size() <= kSuffix.size() || !name.ends_with(kSuffix)) return false;
  return std::all_of(name.begin(), name.end() - kSuffix.size(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

const Entry *Corpus::find(std::int64_t id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const Entry &e, std::int64_t v) { return e.id < v; });
  if (it == entries.end() || it->id != id) return nullptr;
  return &*it;
}

Entry parse_entry(std::string_view raw, std::string_view source_path) {
  if (raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::vector<std::size_t> offsets;
  split_lines(raw, &lines, &offsets);

  std::size_t open = 0;
  while (open < lines.size() && text::trim(lines[open]).empty()) ++open;
  if (open == lines.size() || !is_delimiter(lines[open])) {
    throw CorpusError(CorpusErrc::kMissingHeader, std::string(source_path));
  }
  std::size_t close = open + 1;
  while (close < lines.size() && !is_delimiter(lines[close])) ++close;
  if (close == lines.size()) {
    throw CorpusError(CorpusErrc::kMissingHeader, std::string(source_path));
  }

  std::map<std::string, std::string> header;
  std::string last_key;
  for (std::size_t i = open + 1; i < close; ++i) {
    std::string_view line = lines[i];
    if (line.empty()) continue;
    bool continuation = line.front() == ' ' || line.front() == '\t' || line.starts_with("- ");
    std::size_t colon = line.find(':');
    if (continuation || colon == std::string_view::npos || colon == 0) {
      if (!last_key.empty()) {
        header[last_key] += '\n';
        header[last_key] += line;
      }
      continue;
    }
    last_key = text::trim(line.substr(0, colon));
    header[last_key] = text::trim(line.substr(colon + 1));
  }

  Entry entry;
  entry.source_path = std::string(source_path);

  auto title = header.find("title");
  if (title == header.end()) throw CorpusError(CorpusErrc::kMissingRequiredKey, "title");
  entry.title = text::trim(unquote(title->second));
  if (entry.title.empty()) throw CorpusError(CorpusErrc::kMissingRequiredKey, "title");

  auto natureza = header.find("natureza");
  if (natureza == header.end()) throw CorpusError(CorpusErrc::kMissingRequiredKey, "natureza");
  entry.nature = nature_from_header(unquote(natureza->second));

  entry.id = id_from_path(source_path);
  entry.body = std::string(raw.substr(offsets[close]));

  header.erase("title");
  header.erase("natureza");
  entry.metadata = std::move(header);
  return entry;
}

std::string render_entry(const Entry &entry) {
  std::string out = "---\n";
  out += "title: " + entry.title + "\n";
  out += entry.nature == Nature::kThematic ? "natureza: temático\n" : "natureza: biográfico\n";
  for (const auto &[key, value] : entry.metadata) {
    out += key + ":";
    if (!value.empty() && value.front() != '\n') out += " ";
    out += value + "\n";
  }
  out += "---\n";
  out += entry.body;
  return out;
}

CorpusStats compute_stats(const std::vector<Entry> &entries) {
  CorpusStats stats;
  stats.total = entries.size();
  for (const auto &e : entries) {
    if (e.nature == Nature::kThematic) {
      ++stats.thematic;
    } else {
      ++stats.biographical;
    }
  }
  return stats;
}

Corpus load_corpus(const std::filesystem::path &dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw CorpusError(CorpusErrc::kDirectoryNotFound, dir.string());
  }

  std::vector<std::filesystem::path> files;
  for (const auto &item : std::filesystem::directory_iterator(dir)) {
    if (item.is_regular_file() && is_entry_filename(item.path().filename().string())) {
      files.push_back(item.path());
    }
  }
  std::sort(files.begin(), files.end());

  struct Outcome {
    std::optional<Entry> entry;
    std::optional<ParseFailure> failure;
  };
  std::vector<Outcome> outcomes(files.size());

  auto parse_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto &path = files[i];
      try {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open file");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        outcomes[i].entry = parse_entry(buffer.str(), path.string());
      } catch (const Error &e) {
        outcomes[i].failure = ParseFailure{path.string(), e.kind(), e.what()};
      } catch (const std::exception &e) {
        outcomes[i].failure = ParseFailure{path.string(), "IoError", e.what()};
      }
    }
  };

  std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  workers = std::min(workers, std::max<std::size_t>(1, files.size() / 64));
  std::vector<std::future<void>> tasks;
  std::size_t chunk = (files.size() + workers - 1) / std::max<std::size_t>(workers, 1);
  for (std::size_t begin = 0; begin < files.size(); begin += chunk) {
    tasks.push_back(std::async(std::launch::async, parse_range, begin,
                               std::min(files.size(), begin + chunk)));
  }
  for (auto &t : tasks) t.get();

  Corpus corpus;
  for (auto &o : outcomes) {
    if (o.entry) corpus.entries.push_back(std::move(*o.entry));
    if (o.failure) corpus.failures.push_back(std::move(*o.failure));
  }
  std::stable_sort(corpus.entries.begin(), corpus.entries.end(),
                   [](const Entry &a, const Entry &b) { return a.id < b.id; });

  // "007.text" and "7.text" name the same entry; keep the first path.
  std::vector<Entry> unique;
  unique.reserve(corpus.entries.size());
  for (auto &e : corpus.entries) {
    if (!unique.empty() && unique.back().id == e.id) {
      corpus.failures.push_back(ParseFailure{e.source_path, "DuplicateId",
                                             "duplicate entry id " + std::to_string(e.id)});
      continue;
    }
    unique.push_back(std::move(e));
  }
  corpus.entries = std::move(unique);

  if (corpus.entries.empty()) throw CorpusError(CorpusErrc::kEmptyCorpus, dir.string());
  corpus.stats = compute_stats(corpus.entries);
  return corpus;
}

std::string first_sentence(std::string_view body, std::size_t max_code_points) {
  std::string flat = text::collapse_whitespace(body);
  std::size_t cut = flat.size();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    char c = flat[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 == flat.size()) {
      cut = i + 1;
      break;
    }
    // Sentence break: terminator, space, then something that is not lowercase
    // ASCII (keeps "dep. fed." style abbreviations together).
    if (flat[i + 1] == ' ' && i + 2 < flat.size() && !(flat[i + 2] >= 'a' && flat[i + 2] <= 'z')) {
      // Single-letter initials such as "J. Silva" do not end a sentence.
      bool initial = i >= 1 && std::isupper(static_cast<unsigned char>(flat[i - 1])) &&
                     (i == 1 || flat[i - 2] == ' ');
      if (!initial) {
        cut = i + 1;
        break;
      }
    }
  }
  return text::truncate_code_points(std::string_view(flat).substr(0, cut), max_code_points);
}

}  // namespace dhbb
