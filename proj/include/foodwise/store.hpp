#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace foodwise {

struct StoredDocument {
  std::string key;
  std::int64_t version = 0;
  nlohmann::json value;
};

// Keyed JSON documents grouped in named collections. Each document may carry
// an owner tag used for secondary lookups. Single-document operations are
// atomic; implementations are safe under concurrent callers.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  /// Upsert. Returns the new version (1 for a fresh key).
  virtual std::int64_t put(std::string_view collection, std::string_view key,
                           const nlohmann::json& value, std::string_view owner = {}) = 0;

  /// Writes only if the key is absent; false when it already exists.
  virtual bool insert(std::string_view collection, std::string_view key,
                      const nlohmann::json& value, std::string_view owner = {}) = 0;

  virtual std::optional<StoredDocument> find(std::string_view collection,
                                             std::string_view key) const = 0;

  virtual bool erase(std::string_view collection, std::string_view key) = 0;

  /// Ordered by key.
  virtual std::vector<StoredDocument> list(std::string_view collection) const = 0;
  virtual std::vector<StoredDocument> list_owned(std::string_view collection,
                                                 std::string_view owner) const = 0;

  /// Throws Error(NotFound).
  StoredDocument get(std::string_view collection, std::string_view key) const;
};

std::unique_ptr<DocumentStore> make_memory_document_store();
/// SQLite file; created if missing. Throws Error(StorageUnavailable).
std::unique_ptr<DocumentStore> open_sqlite_document_store(const std::filesystem::path& file);

struct BlobRef {
  std::string key;
  std::string content_type;
  std::int64_t size_bytes = 0;

  friend bool operator==(const BlobRef&, const BlobRef&) = default;
};

struct Blob {
  BlobRef ref;
  std::string bytes;
};

inline constexpr std::int64_t kDefaultMaxBlobBytes = 5 * 1024 * 1024;

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// Content-addressed: the key is the SHA-256 of the bytes.
class BlobStore {
 public:
  explicit BlobStore(std::int64_t max_bytes) : max_bytes_(max_bytes) {}
  virtual ~BlobStore() = default;

  std::int64_t max_bytes() const noexcept { return max_bytes_; }

  /// Throws Error(BlobTooLarge) with the limit as subject.
  BlobRef put(std::string_view bytes, std::string_view content_type);

  /// Throws Error(NotFound).
  virtual Blob get(std::string_view key) const = 0;
  virtual bool contains(std::string_view key) const = 0;

 protected:
  virtual void write(const BlobRef& ref, std::string_view bytes) = 0;

 private:
  std::int64_t max_bytes_;
};

std::unique_ptr<BlobStore> make_memory_blob_store(std::int64_t max_bytes = kDefaultMaxBlobBytes);
/// Files under `dir/<first two hex digits>/<key>` with a `.type` sidecar.
std::unique_ptr<BlobStore> open_file_blob_store(const std::filesystem::path& dir,
                                                std::int64_t max_bytes = kDefaultMaxBlobBytes);

}  // namespace foodwise
