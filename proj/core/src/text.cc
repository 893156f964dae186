#include "dhbb/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace dhbb::text {

namespace {

template <typename Fn>
void for_each_code_point(std::string_view s, Fn &&fn) {
  const auto *bytes = reinterpret_cast<const uint8_t *>(s.data());
  int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    fn(static_cast<char32_t>(c));
  }
}

void append(std::string &out, char32_t c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t *>(buf), n, U8_MAX_LENGTH,
            static_cast<UChar32>(c), error);
  if (error) {
    out += "\xEF\xBF\xBD";
  } else {
    out.append(buf, static_cast<std::size_t>(n));
  }
}

template <typename Map>
std::string map_code_points(std::string_view s, Map &&map) {
  std::string out;
  out.reserve(s.size());
  for_each_code_point(s, [&](char32_t c) { append(out, map(c)); });
  return out;
}

}  // namespace

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](char32_t c) { out.push_back(c); });
  return out;
}

std::string encode(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t c : code_points) append(out, c);
  return out;
}

bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string trim(std::string_view s) {
  std::u32string cps = decode(s);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && is_whitespace(cps[begin])) ++begin;
  while (end > begin && is_whitespace(cps[end - 1])) --end;
  return encode(std::u32string_view(cps).substr(begin, end - begin));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for_each_code_point(s, [&](char32_t c) {
    if (is_whitespace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append(current, c);
    }
  });
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  for (const auto &token : split_whitespace(s)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

std::string to_lower(std::string_view s) {
  return map_code_points(s, [](char32_t c) {
    return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
  });
}

std::string to_upper(std::string_view s) {
  return map_code_points(s, [](char32_t c) {
    return static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
  });
}

std::string title_case_word(std::string_view word) {
  bool seen_letter = false;
  return map_code_points(word, [&](char32_t c) {
    auto cp = static_cast<UChar32>(c);
    if (!u_isalpha(cp)) return c;
    if (!seen_letter) {
      seen_letter = true;
      return static_cast<char32_t>(u_toupper(cp));
    }
    return static_cast<char32_t>(u_tolower(cp));
  });
}

std::string upper_first(std::string_view s) {
  bool first = true;
  return map_code_points(s, [&](char32_t c) {
    if (!first) return c;
    first = false;
    return static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
  });
}

bool has_lower(std::string_view s) {
  bool found = false;
  for_each_code_point(s, [&](char32_t c) {
    if (u_islower(static_cast<UChar32>(c))) found = true;
  });
  return found;
}

bool has_upper(std::string_view s) {
  bool found = false;
  for_each_code_point(s, [&](char32_t c) {
    if (u_isupper(static_cast<UChar32>(c))) found = true;
  });
  return found;
}

std::size_t cased_letter_count(std::string_view s) {
  std::size_t n = 0;
  for_each_code_point(s, [&](char32_t c) {
    auto cp = static_cast<UChar32>(c);
    if (u_isupper(cp) || u_islower(cp)) ++n;
  });
  return n;
}

std::string strip_marks(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfd = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFD normalizer unavailable");
  icu::UnicodeString decomposed =
      nfd->normalize(icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size()))), status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  std::string utf8;
  decomposed.toUTF8String(utf8);
  std::string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](char32_t c) {
    if (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) return;
    append(out, c);
  });
  return out;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for_each_code_point(s, [&](char32_t) { ++n; });
  return n;
}

std::string truncate_code_points(std::string_view s, std::size_t max_code_points) {
  std::u32string cps = decode(s);
  if (cps.size() <= max_code_points) return encode(cps);
  return encode(std::u32string_view(cps).substr(0, max_code_points));
}

}  // namespace dhbb::text
