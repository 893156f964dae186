#include "dhbb/normalize.h"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "dhbb/text.h"

namespace dhbb {

std::string_view to_string(NormalizeErrc code) {
  switch (code) {
    case NormalizeErrc::kTooFewTokens: return "TooFewTokens";
  }
  return "NormalizeError";
}

namespace {

constexpr std::array<std::string_view, 18> kFunctionWords = {
    "a",  "as", "o",  "os",  "e",  "da",   "das", "de",  "do",
    "dos", "em", "na", "nas", "no", "nos", "para", "por", "com"};

constexpr std::array<std::string_view, 6> kParticles = {"de", "da", "do", "das", "dos", "e"};

std::string join(const std::vector<std::string> &tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Token rules, in order:
//   - the trailing acronym token and mixed-case tokens are kept verbatim;
//   - tokens without cased letters are kept;
//   - an all-uppercase token is kept unless the title is "shouting" (two or
//     more multi-letter words and none of them has a lowercase letter) or
//     `recase_capitals` is set;
//   - otherwise function words after the first position are lowercased and
//     every other token is title-cased.
std::string canonicalize_impl(std::string_view title, bool recase_capitals) {
  std::string collapsed = text::collapse_whitespace(title);
  std::vector<std::string> tokens = text::split_whitespace(collapsed);
  if (tokens.empty()) return {};

  const bool has_acronym = extract_acronym(collapsed).acronym.has_value();
  const std::size_t acronym_index = has_acronym ? tokens.size() - 1 : tokens.size();

  std::size_t multi_letter = 0;
  bool any_lower = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i == acronym_index || text::cased_letter_count(tokens[i]) < 2) continue;
    ++multi_letter;
    any_lower = any_lower || text::has_lower(tokens[i]);
  }
  const bool shouting = multi_letter >= 2 && !any_lower;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string &token = tokens[i];
    if (i == acronym_index) continue;
    const bool upper = text::has_upper(token);
    const bool lower = text::has_lower(token);
    if (upper && lower) continue;
    if (!upper && !lower) continue;
    if (upper && !shouting && !recase_capitals) continue;
    std::string lowered = text::to_lower(token);
    if (i > 0 && is_function_word(lowered)) {
      token = std::move(lowered);
    } else {
      token = text::title_case_word(token);
    }
  }
  return join(tokens, 0, tokens.size());
}

}  // namespace

bool is_function_word(std::string_view lowercase_token) {
  return std::find(kFunctionWords.begin(), kFunctionWords.end(), lowercase_token) !=
         kFunctionWords.end();
}

bool is_name_particle(std::string_view token) {
  std::string folded = fold_diacritics(token);
  return std::find(kParticles.begin(), kParticles.end(), folded) != kParticles.end();
}

AcronymSplit extract_acronym(std::string_view title) {
  AcronymSplit split{std::string(title), std::nullopt};
  std::string trimmed = text::trim(title);
  if (trimmed.empty() || trimmed.back() != ')') return split;

  std::size_t open = trimmed.rfind('(');
  if (open == std::string::npos || open == 0) return split;
  std::string inner = trimmed.substr(open + 1, trimmed.size() - open - 2);
  if (text::code_point_count(inner) < 2) return split;
  if (inner.find_first_of("()") != std::string::npos) return split;
  for (char32_t c : text::decode(inner)) {
    if (text::is_whitespace(c)) return split;
  }
  // The acronym must be its own word: "(" has to follow whitespace.
  std::u32string before = text::decode(std::string_view(trimmed).substr(0, open));
  if (before.empty() || !text::is_whitespace(before.back())) return split;

  std::string base = text::trim(std::string_view(trimmed).substr(0, open));
  if (base.empty()) return split;
  split.base = std::move(base);
  split.acronym = std::move(inner);
  return split;
}

std::string canonicalize(std::string_view title) { return canonicalize_impl(title, false); }

std::string canonicalize_person_name(std::string_view name) {
  return canonicalize_impl(name, true);
}

std::string fold_diacritics(std::string_view s) {
  return text::to_lower(text::strip_marks(text::to_lower(s)));
}

std::string display_name(std::string_view title) {
  std::size_t comma = title.find(',');
  if (comma == std::string_view::npos) return text::trim(title);
  std::string surname = text::trim(title.substr(0, comma));
  std::string given = text::trim(title.substr(comma + 1));
  if (surname.empty() || given.empty()) return text::trim(title);
  return given + " " + surname;
}

std::vector<std::string> person_variants(std::string_view full_name) {
  std::vector<std::string> tokens = text::split_whitespace(full_name);
  std::vector<bool> particle(tokens.size());
  std::size_t content = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    particle[i] = is_name_particle(tokens[i]);
    if (!particle[i]) ++content;
  }
  if (content < 2) throw NormalizeError(NormalizeErrc::kTooFewTokens, std::string(full_name));

  std::vector<std::string> variants;
  auto add = [&variants](std::string v) {
    if (std::find(variants.begin(), variants.end(), v) == variants.end()) {
      variants.push_back(std::move(v));
    }
  };

  const std::size_t n = tokens.size();
  add(join(tokens, 0, n));

  // Final surname group: last content token, plus a particle run before it
  // and the content token that precedes the run ("Flecha de Lima").
  std::size_t last = n - 1;
  while (particle[last]) --last;
  std::size_t group_begin = last;
  if (last > 0 && particle[last - 1]) {
    std::size_t j = last - 1;
    while (j > 0 && particle[j]) --j;
    if (!particle[j]) group_begin = j;
  }
  if (group_begin > 0) {
    add(tokens[0] + " " + join(tokens, group_begin, last + 1));
  }

  for (std::size_t start = 0; start + 2 <= n; ++start) {
    if (!particle[start]) add(join(tokens, start, n));
  }
  return variants;
}

int damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  const int inf = static_cast<int>(la + lb);
  const std::size_t width = lb + 2;
  std::vector<int> h((la + 2) * width);
  auto at = [&](std::size_t i, std::size_t j) -> int & { return h[i * width + j]; };

  at(0, 0) = inf;
  for (std::size_t i = 0; i <= la; ++i) {
    at(i + 1, 0) = inf;
    at(i + 1, 1) = static_cast<int>(i);
  }
  for (std::size_t j = 0; j <= lb; ++j) {
    at(0, j + 1) = inf;
    at(1, j + 1) = static_cast<int>(j);
  }

  // Last row in which each symbol of `a` was seen.
  std::unordered_map<char32_t, std::size_t> last_row;
  for (std::size_t i = 1; i <= la; ++i) {
    std::size_t last_match_col = 0;
    for (std::size_t j = 1; j <= lb; ++j) {
      auto found = last_row.find(b[j - 1]);
      std::size_t i1 = found == last_row.end() ? 0 : found->second;
      std::size_t j1 = last_match_col;
      int cost = 1;
      if (a[i - 1] == b[j - 1]) {
        cost = 0;
        last_match_col = j;
      }
      int best = at(i, j) + cost;
      best = std::min(best, at(i + 1, j) + 1);
      best = std::min(best, at(i, j + 1) + 1);
      best = std::min(best, at(i1, j1) + static_cast<int>(i - i1 - 1) + 1 +
                                static_cast<int>(j - j1 - 1));
      at(i + 1, j + 1) = best;
    }
    last_row[a[i - 1]] = i;
  }
  return at(la + 1, lb + 1);
}

std::optional<int> bounded_edit_distance(std::string_view a, std::string_view b, int max) {
  if (max < 0) return std::nullopt;
  std::u32string fa = text::decode(fold_diacritics(a));
  std::u32string fb = text::decode(fold_diacritics(b));
  std::size_t diff = fa.size() > fb.size() ? fa.size() - fb.size() : fb.size() - fa.size();
  if (diff > static_cast<std::size_t>(max)) return std::nullopt;
  int d = damerau_levenshtein(fa, fb);
  if (d > max) return std::nullopt;
  return d;
}

TitleForms derive_forms(std::string_view title, Nature nature) {
  TitleForms forms;
  forms.original = std::string(title);
  if (nature == Nature::kBiographical) {
    forms.canonical = canonicalize_person_name(display_name(title));
  } else {
    forms.canonical = canonicalize(title);
  }
  AcronymSplit split = extract_acronym(forms.canonical);
  forms.base = split.base;
  forms.acronym = split.acronym;
  forms.folded = fold_diacritics(forms.canonical);
  if (nature == Nature::kBiographical) {
    try {
      forms.variants = person_variants(forms.canonical);
    } catch (const NormalizeError &) {
      forms.variants = {forms.canonical};
    }
  }
  return forms;
}

}  // namespace dhbb
