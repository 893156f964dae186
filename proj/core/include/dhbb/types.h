#ifndef DHBB_TYPES_H_
#define DHBB_TYPES_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace dhbb {

// Wikidata item identifier, "Q" followed by decimal digits. Ordering is by
// the numeric part, which is the tie-break order used across the pipeline.
class Qid {
 public:
  constexpr Qid() = default;
  constexpr explicit Qid(std::uint64_t number) : number_(number) {}

  // Accepts exactly `Q[0-9]+` (no sign, no whitespace, number > 0).
  static std::optional<Qid> parse(std::string_view text);
  // Like parse() but throws std::invalid_argument.
  static Qid from_string(std::string_view text);

  std::uint64_t number() const { return number_; }
  std::string str() const;

  friend constexpr auto operator<=>(Qid, Qid) = default;

 private:
  std::uint64_t number_ = 0;
};

enum class Nature { kBiographical, kThematic };

std::string_view to_string(Nature nature);
std::optional<Nature> parse_nature(std::string_view text);

}  // namespace dhbb

template <>
struct std::hash<dhbb::Qid> {
  std::size_t operator()(dhbb::Qid q) const noexcept {
    return std::hash<std::uint64_t>{}(q.number());
  }
};

#endif  // DHBB_TYPES_H_
