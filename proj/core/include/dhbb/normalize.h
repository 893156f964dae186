#ifndef DHBB_NORMALIZE_H_
#define DHBB_NORMALIZE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dhbb/error.h"
#include "dhbb/types.h"

namespace dhbb {

enum class NormalizeErrc { kTooFewTokens };
std::string_view to_string(NormalizeErrc code);
using NormalizeError = CodedError<NormalizeErrc>;

struct AcronymSplit {
  std::string base;
  std::optional<std::string> acronym;

  bool operator==(const AcronymSplit &) const = default;
};

// All search keys derived from one entry title.
struct TitleForms {
  std::string original;
  std::string canonical;
  std::string base;
  std::optional<std::string> acronym;
  std::string folded;
  std::vector<std::string> variants;  // person-name variants, biographical only
};

// A trailing "(TOKEN)" with at least two code points and no whitespace is
// split off as the acronym. Total function.
AcronymSplit extract_acronym(std::string_view title);

// Portuguese title casing with whitespace collapsed. See normalize.cc for the
// exact token rules; idempotent.
std::string canonicalize(std::string_view title);

// Like canonicalize() but every all-uppercase word is recased, so surnames
// written in capitals ("FLECHA DE LIMA") become "Flecha de Lima".
std::string canonicalize_person_name(std::string_view name);

// Decompose, drop combining marks, lowercase. Idempotent.
std::string fold_diacritics(std::string_view s);

// Dictionary biographical titles are "SURNAME, Given names"; returns
// "Given names SURNAME". Titles without a comma are returned trimmed.
std::string display_name(std::string_view title);

bool is_name_particle(std::string_view token);
bool is_function_word(std::string_view lowercase_token);

// Person-name variants in priority order: the full name, first name plus the
// final surname group, then every tail of two or more tokens that starts at a
// non-particle. Throws NormalizeError(kTooFewTokens) with fewer than two
// non-particle tokens.
std::vector<std::string> person_variants(std::string_view full_name);

// Unrestricted Damerau-Levenshtein distance over the folded code points of
// `a` and `b`, or nullopt when it exceeds `max`.
std::optional<int> bounded_edit_distance(std::string_view a, std::string_view b, int max);

// Same metric, unbounded, on raw code point sequences.
int damerau_levenshtein(std::u32string_view a, std::u32string_view b);

TitleForms derive_forms(std::string_view title, Nature nature);

}  // namespace dhbb

#endif  // DHBB_NORMALIZE_H_
