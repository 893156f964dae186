#include <benchmark/benchmark.h>

#include <random>

#include "dhbb/sql_dump.h"

namespace dhbb {
namespace {

std::string page_dump(std::size_t rows) {
  std::mt19937_64 rng(1);
  std::vector<SqlTuple> tuples;
  tuples.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string title = "T\xc3\xadtulo_" + std::to_string(rng() % 100000) + "_'quoted'_\\_x";
    tuples.push_back(SqlTuple{{static_cast<std::int64_t>(i + 1), std::int64_t{0}, title,
                               std::int64_t(rng() % 2), std::int64_t{0}, 0.123456789,
                               std::string("20240101000000"), std::string("20240101000000"),
                               std::int64_t{1}, std::int64_t(rng() % 50000), std::string("wikitext"),
                               SqlValue{}}});
  }
  return write_insert_statements("page", tuples, 500);
}

void BM_ParsePageDump(benchmark::State &state) {
  const std::string dump = page_dump(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    SqlDumpReader reader(make_memory_source(dump), page_table_schema());
    std::size_t n = 0;
    while (auto t = reader.next()) ++n;
    benchmark::DoNotOptimize(n);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * dump.size()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParsePageDump)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace dhbb
