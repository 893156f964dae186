#ifndef DHBB_TESTS_SUPPORT_GENERATORS_H_
#define DHBB_TESTS_SUPPORT_GENERATORS_H_

// Seeded generators for property tests and the acceptance binary.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dhbb/evaluator.h"
#include "dhbb/linker.h"
#include "dhbb/mapping_store.h"
#include "dhbb/sql_dump.h"
#include "oracles.h"

namespace dhbb::testing {

// page-table tuples whose strings carry quotes, backslashes, control
// characters and UTF-8; some columns are NULL.
std::vector<SqlTuple> random_page_tuples(std::uint64_t seed, std::size_t n);

// mysqldump-style text (comments, CREATE TABLE, LOCK TABLES, extended
// INSERTs) written with its own escaping, independent of the library writer.
std::string mysqldump_text(const TableSchema &schema, std::span<const SqlTuple> tuples,
                           std::size_t rows_per_statement);

struct IndexFixture {
  std::vector<oracle::PageRow> pages;
  std::vector<oracle::RedirectRow> redirects;
  std::vector<oracle::PropRow> props;
  std::string page_sql;
  std::string redirect_sql;
  std::string props_sql;
  std::vector<std::string> universe;  // every title in the dumps plus absent ones
  std::vector<std::string> cycle;     // titles of the planted redirect cycle

  std::size_t rows() const { return pages.size() + redirects.size() + props.size(); }
};

// About `n_pages` pages with redirect chains of every length up to six, a
// planted two-page cycle, dangling redirects, talk-namespace pages and
// redirects that carry a wikibase_item of their own.
IndexFixture make_index_fixture(std::uint64_t seed, std::size_t n_pages);

// Synthetic Portuguese person name: 2-6 tokens, particles included.
std::vector<std::string> random_name_tokens(std::mt19937_64 &rng);

// Short strings over a small alphabet with accented letters, for edit
// distance checks.
std::string random_short_string(std::mt19937_64 &rng, std::size_t max_len);

// Valid mapping records with hostile text (tabs, newlines, quotes, accents).
std::vector<MappingRecord> random_records(std::uint64_t seed, std::size_t n);

// `size` adjudications for `stratum` with exactly `hits` counted outcomes.
std::vector<AdjudicationRecord> adjudication_fixture(Stratum stratum, std::size_t size,
                                                     std::size_t hits, std::int64_t first_id);

}  // namespace dhbb::testing

#endif  // DHBB_TESTS_SUPPORT_GENERATORS_H_
