#ifndef DHBB_SRC_SQLITE_DB_H_
#define DHBB_SRC_SQLITE_DB_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

struct sqlite3;
struct sqlite3_stmt;

namespace dhbb::sql {

class Statement;

// Owning SQLite connection. Not thread-safe; callers hold their own lock.
class Database {
 public:
  explicit Database(const std::string &path);
  ~Database();
  Database(const Database &) = delete;
  Database &operator=(const Database &) = delete;

  void exec(std::string_view sql);
  Statement prepare(std::string_view sql);
  sqlite3 *handle() { return db_; }

 private:
  sqlite3 *db_ = nullptr;
};

class Statement {
 public:
  Statement(sqlite3 *db, std::string_view sql);
  ~Statement();
  Statement(Statement &&other) noexcept;
  Statement(const Statement &) = delete;
  Statement &operator=(const Statement &) = delete;

  Statement &bind(int index, std::int64_t value);
  Statement &bind(int index, double value);
  Statement &bind(int index, std::string_view value);
  Statement &bind(int index, const std::optional<std::string> &value);
  Statement &bind_null(int index);

  // Returns true while a row is available.
  bool step();
  void run();  // step to completion
  void reset();

  std::int64_t column_int(int i) const;
  double column_double(int i) const;
  std::string column_text(int i) const;
  std::optional<std::string> column_optional_text(int i) const;
  bool column_is_null(int i) const;

 private:
  sqlite3 *db_;
  sqlite3_stmt *stmt_ = nullptr;
};

// BEGIN IMMEDIATE ... COMMIT, rolled back if not committed.
class Transaction {
 public:
  explicit Transaction(Database &db);
  ~Transaction();
  void commit();

 private:
  Database &db_;
  bool done_ = false;
};

}  // namespace dhbb::sql

#endif  // DHBB_SRC_SQLITE_DB_H_
