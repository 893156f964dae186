#include "oracles.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace dhbb::oracle {

namespace {

std::vector<std::u32string> neighbours(const std::u32string &s, const std::u32string &alphabet) {
  std::vector<std::u32string> out;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    for (char32_t c : alphabet) out.push_back(s.substr(0, i) + c + s.substr(i));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back(s.substr(0, i) + s.substr(i + 1));
    for (char32_t c : alphabet) {
      if (c == s[i]) continue;
      std::u32string t = s;
      t[i] = c;
      out.push_back(t);
    }
    if (i + 1 < s.size()) {
      std::u32string t = s;
      std::swap(t[i], t[i + 1]);
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace

int edit_distance_bfs(const std::u32string &a, const std::u32string &b) {
  if (a == b) return 0;
  // Characters outside both strings never help, so the alphabet is closed.
  std::u32string alphabet;
  for (char32_t c : a + b) {
    if (alphabet.find(c) == std::u32string::npos) alphabet += c;
  }
  std::unordered_map<std::u32string, int> seen_a{{a, 0}}, seen_b{{b, 0}};
  std::vector<std::u32string> front_a{a}, front_b{b};
  int depth_a = 0, depth_b = 0;
  while (true) {
    bool grow_a = front_a.size() <= front_b.size();
    auto &front = grow_a ? front_a : front_b;
    auto &seen = grow_a ? seen_a : seen_b;
    auto &other = grow_a ? seen_b : seen_a;
    int &depth = grow_a ? depth_a : depth_b;
    ++depth;
    std::vector<std::u32string> next;
    int best = -1;
    for (const auto &s : front) {
      for (auto &t : neighbours(s, alphabet)) {
        if (seen.contains(t)) continue;
        seen.emplace(t, depth);
        if (auto it = other.find(t); it != other.end()) {
          int total = depth + it->second;
          if (best < 0 || total < best) best = total;
        }
        next.push_back(std::move(t));
      }
    }
    if (best >= 0) return best;
    front = std::move(next);
  }
}

int levenshtein(const std::u32string &a, const std::u32string &b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

namespace {

bool particle(const std::string &t) {
  static const std::set<std::string> kParticles{"de", "da", "do", "das", "dos", "e"};
  std::string lower;
  for (char c : t) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return kParticles.contains(lower);
}

std::string join(const std::vector<std::string> &tokens, const std::vector<std::size_t> &pick) {
  std::string out;
  for (std::size_t i : pick) out += (out.empty() ? "" : " ") + tokens[i];
  return out;
}

}  // namespace

std::set<std::string> name_variants(const std::vector<std::string> &tokens) {
  const std::size_t n = tokens.size();
  std::set<std::string> out;
  if (n == 0) return out;

  // Final surname group, straight from the definition.
  std::size_t last = n;
  for (std::size_t i = n; i-- > 0;) {
    if (!particle(tokens[i])) {
      last = i;
      break;
    }
  }
  std::size_t group_begin = last;
  std::size_t k = last;
  while (k > 0 && particle(tokens[k - 1])) --k;
  if (k < last && k > 0 && !particle(tokens[k - 1])) group_begin = k - 1;

  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) pick.push_back(i);
    }
    bool full = pick.size() == n;
    bool contiguous = pick.back() - pick.front() + 1 == pick.size();
    bool tail = contiguous && pick.back() == n - 1 && pick.size() >= 2 && !particle(tokens[pick.front()]);
    bool first_plus_group = false;
    if (last < n && group_begin > 0 && pick.front() == 0 && pick.size() == 1 + (last - group_begin + 1)) {
      first_plus_group = true;
      for (std::size_t j = 1; j < pick.size(); ++j) {
        if (pick[j] != group_begin + (j - 1)) first_plus_group = false;
      }
    }
    if (full || tail || first_plus_group) out.insert(join(tokens, pick));
  }
  return out;
}

std::optional<std::uint64_t> lookup(const std::vector<PageRow> &pages,
                                    const std::vector<RedirectRow> &redirects,
                                    const std::vector<PropRow> &props, const std::string &title,
                                    int max_hops) {
  std::vector<std::string> visited{title};
  std::string current = title;
  for (int hops = 0;; ++hops) {
    const PageRow *page = nullptr;
    for (const auto &p : pages) {
      if (p.ns == 0 && p.title == current) page = &p;
    }
    if (!page) return std::nullopt;
    if (!page->is_redirect) {
      for (const auto &pp : props) {
        if (pp.page == page->id && pp.name == "wikibase_item" && pp.value.size() > 1 &&
            pp.value[0] == 'Q') {
          return std::stoull(pp.value.substr(1));
        }
      }
    }
    const RedirectRow *rd = nullptr;
    for (const auto &r : redirects) {
      if (r.from == page->id && r.ns == 0) rd = &r;
    }
    if (!page->is_redirect || !rd) return std::nullopt;
    if (std::find(visited.begin(), visited.end(), rd->title) != visited.end()) return std::nullopt;
    if (hops == max_hops) return std::nullopt;
    visited.push_back(rd->title);
    current = rd->title;
  }
}

}  // namespace dhbb::oracle
