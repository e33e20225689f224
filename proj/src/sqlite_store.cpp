#include <mutex>

#include <sqlite3.h>

#include "foodwise/error.hpp"
#include "foodwise/store.hpp"

namespace foodwise {

namespace {

using nlohmann::json;

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail("prepare");
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, std::string_view text) {
    // A null data pointer binds SQL NULL, so empty views need a real address.
    if (sqlite3_bind_text(stmt_, index, text.empty() ? "" : text.data(), static_cast<int>(text.size()),
                          SQLITE_TRANSIENT) != SQLITE_OK) {
      fail("bind");
    }
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail("step");
  }

  std::string text(int column) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, column));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, column))) : std::string();
  }
  std::int64_t integer(int column) const { return sqlite3_column_int64(stmt_, column); }

 private:
  [[noreturn]] void fail(const char* what) const {
    throw Error(Errc::StorageUnavailable, std::string("sqlite ") + what + ": " + sqlite3_errmsg(db_));
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

class SqliteDocumentStore final : public DocumentStore {
 public:
  explicit SqliteDocumentStore(const std::filesystem::path& file) {
    if (sqlite3_open_v2(file.string().c_str(), &db_,
                        SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
      const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(Errc::StorageUnavailable, "cannot open " + file.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=NORMAL");
    exec(
        "CREATE TABLE IF NOT EXISTS documents ("
        " collection TEXT NOT NULL, key TEXT NOT NULL, owner TEXT NOT NULL DEFAULT '',"
        " version INTEGER NOT NULL, body TEXT NOT NULL,"
        " PRIMARY KEY (collection, key))");
    exec("CREATE INDEX IF NOT EXISTS documents_owner ON documents (collection, owner)");
  }

  ~SqliteDocumentStore() override { sqlite3_close(db_); }

  std::int64_t put(std::string_view collection, std::string_view key, const json& value,
                   std::string_view owner) override {
    std::lock_guard lock(mutex_);
    Statement st(db_,
                 "INSERT INTO documents (collection, key, owner, version, body) VALUES (?1, ?2, ?3, 1, ?4) "
                 "ON CONFLICT (collection, key) DO UPDATE SET owner = excluded.owner, "
                 "version = documents.version + 1, body = excluded.body "
                 "RETURNING version");
    const std::string body = value.dump();
    st.bind(1, collection).bind(2, key).bind(3, owner).bind(4, body);
    if (!st.step()) throw Error(Errc::StorageUnavailable, "upsert returned no version");
    const std::int64_t version = st.integer(0);
    while (st.step()) {
    }
    return version;
  }

  bool insert(std::string_view collection, std::string_view key, const json& value,
              std::string_view owner) override {
    std::lock_guard lock(mutex_);
    Statement st(db_,
                 "INSERT INTO documents (collection, key, owner, version, body) VALUES (?1, ?2, ?3, 1, ?4) "
                 "ON CONFLICT (collection, key) DO NOTHING");
    const std::string body = value.dump();
    st.bind(1, collection).bind(2, key).bind(3, owner).bind(4, body);
    st.step();
    return sqlite3_changes(db_) == 1;
  }

  std::optional<StoredDocument> find(std::string_view collection,
                                     std::string_view key) const override {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT key, version, body FROM documents WHERE collection = ?1 AND key = ?2");
    st.bind(1, collection).bind(2, key);
    if (!st.step()) return std::nullopt;
    return row(st);
  }

  bool erase(std::string_view collection, std::string_view key) override {
    std::lock_guard lock(mutex_);
    Statement st(db_, "DELETE FROM documents WHERE collection = ?1 AND key = ?2");
    st.bind(1, collection).bind(2, key);
    st.step();
    return sqlite3_changes(db_) == 1;
  }

  std::vector<StoredDocument> list(std::string_view collection) const override {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT key, version, body FROM documents WHERE collection = ?1 ORDER BY key");
    st.bind(1, collection);
    return rows(st);
  }

  std::vector<StoredDocument> list_owned(std::string_view collection,
                                         std::string_view owner) const override {
    std::lock_guard lock(mutex_);
    Statement st(db_,
                 "SELECT key, version, body FROM documents WHERE collection = ?1 AND owner = ?2 "
                 "ORDER BY key");
    st.bind(1, collection).bind(2, owner);
    return rows(st);
  }

 private:
  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      const std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(Errc::StorageUnavailable, "sqlite: " + msg);
    }
  }

  static StoredDocument row(const Statement& st) {
    json body = json::parse(st.text(2), nullptr, false);
    if (body.is_discarded()) throw Error(Errc::StorageUnavailable, "corrupt document body for " + st.text(0));
    return {st.text(0), st.integer(1), std::move(body)};
  }

  static std::vector<StoredDocument> rows(Statement& st) {
    std::vector<StoredDocument> out;
    while (st.step()) out.push_back(row(st));
    return out;
  }

  sqlite3* db_ = nullptr;
  mutable std::mutex mutex_;
};

}  // namespace

std::unique_ptr<DocumentStore> open_sqlite_document_store(const std::filesystem::path& file) {
  return std::make_unique<SqliteDocumentStore>(file);
}

}  // namespace foodwise
