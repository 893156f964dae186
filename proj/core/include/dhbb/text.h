#ifndef DHBB_TEXT_H_
#define DHBB_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the normalizer, the index and the store. All
// functions accept arbitrary bytes; invalid sequences become U+FFFD.
namespace dhbb::text {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view code_points);

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

// First cased letter uppercased, every other letter lowercased.
std::string title_case_word(std::string_view word);
// Uppercases only the first code point (MediaWiki title rule).
std::string upper_first(std::string_view s);

bool has_lower(std::string_view s);
bool has_upper(std::string_view s);
std::size_t cased_letter_count(std::string_view s);

// Canonical decomposition with all combining marks removed.
std::string strip_marks(std::string_view s);

std::string truncate_code_points(std::string_view s, std::size_t max_code_points);
std::size_t code_point_count(std::string_view s);

bool is_whitespace(char32_t c);

}  // namespace dhbb::text

#endif  // DHBB_TEXT_H_
