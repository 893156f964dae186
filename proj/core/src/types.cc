#include "dhbb/types.h"

#include <charconv>
#include <stdexcept>

namespace dhbb {

std::optional<Qid> Qid::parse(std::string_view text) {
  if (text.size() < 2 || text.front() != 'Q') return std::nullopt;
  std::string_view digits = text.substr(1);
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || n == 0) {
    return std::nullopt;
  }
  return Qid(n);
}

Qid Qid::from_string(std::string_view text) {
  auto q = parse(text);
  if (!q) throw std::invalid_argument("not a QID: " + std::string(text));
  return *q;
}

std::string Qid::str() const { return "Q" + std::to_string(number_); }

std::string_view to_string(Nature nature) {
  return nature == Nature::kBiographical ? "biographical" : "thematic";
}

std::optional<Nature> parse_nature(std::string_view text) {
  if (text == "biographical") return Nature::kBiographical;
  if (text == "thematic") return Nature::kThematic;
  return std::nullopt;
}

}  // namespace dhbb
