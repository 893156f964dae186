#ifndef DHBB_TESTS_SUPPORT_ORACLES_H_
#define DHBB_TESTS_SUPPORT_ORACLES_H_

// Reference implementations used only by tests. They are deliberately slow
// and written straight from the definitions, sharing no code with the
// library.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dhbb::oracle {

// Edit distance as the length of a shortest path in the graph whose edges
// are single insertions, deletions, substitutions and swaps of adjacent
// characters. Bidirectional breadth-first search; fine for short strings.
int edit_distance_bfs(const std::u32string &a, const std::u32string &b);

// Plain Levenshtein (no transpositions), full matrix.
int levenshtein(const std::u32string &a, const std::u32string &b);

// Person-name variants by brute force over every order-preserving token
// subsequence, keeping the ones the variant rule admits.
std::set<std::string> name_variants(const std::vector<std::string> &tokens);

// Naive title -> QID resolution by linear scans over raw dump rows.
struct PageRow {
  std::int64_t id = 0;
  int ns = 0;
  std::string title;  // underscores, first letter already upper case
  bool is_redirect = false;
};
struct RedirectRow {
  std::int64_t from = 0;
  int ns = 0;
  std::string title;
};
struct PropRow {
  std::int64_t page = 0;
  std::string name;
  std::string value;
};

std::optional<std::uint64_t> lookup(const std::vector<PageRow> &pages,
                                    const std::vector<RedirectRow> &redirects,
                                    const std::vector<PropRow> &props, const std::string &title,
                                    int max_hops);

}  // namespace dhbb::oracle

#endif  // DHBB_TESTS_SUPPORT_ORACLES_H_
