#include "foodwise/store.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <system_error>

#include <sodium.h>

#include "foodwise/error.hpp"

namespace foodwise {

namespace fs = std::filesystem;
using nlohmann::json;

StoredDocument DocumentStore::get(std::string_view collection, std::string_view key) const {
  auto doc = find(collection, key);
  if (!doc) {
    throw Error(Errc::NotFound,
                "no document '" + std::string(key) + "' in " + std::string(collection),
                std::string(key));
  }
  return *std::move(doc);
}

namespace {

class MemoryDocumentStore final : public DocumentStore {
 public:
  std::int64_t put(std::string_view collection, std::string_view key, const json& value,
                   std::string_view owner) override {
    std::unique_lock lock(mutex_);
    Entry& e = collections_[std::string(collection)][std::string(key)];
    e.version += 1;
    e.value = value;
    e.owner = owner;
    return e.version;
  }

  bool insert(std::string_view collection, std::string_view key, const json& value,
              std::string_view owner) override {
    std::unique_lock lock(mutex_);
    auto& docs = collections_[std::string(collection)];
    auto [it, fresh] = docs.try_emplace(std::string(key));
    if (!fresh) return false;
    it->second = Entry{1, value, std::string(owner)};
    return true;
  }

  std::optional<StoredDocument> find(std::string_view collection,
                                     std::string_view key) const override {
    std::shared_lock lock(mutex_);
    const auto c = collections_.find(collection);
    if (c == collections_.end()) return std::nullopt;
    const auto it = c->second.find(key);
    if (it == c->second.end()) return std::nullopt;
    return StoredDocument{it->first, it->second.version, it->second.value};
  }

  bool erase(std::string_view collection, std::string_view key) override {
    std::unique_lock lock(mutex_);
    const auto c = collections_.find(collection);
    if (c == collections_.end()) return false;
    const auto it = c->second.find(key);
    if (it == c->second.end()) return false;
    c->second.erase(it);
    return true;
  }

  std::vector<StoredDocument> list(std::string_view collection) const override {
    return scan(collection, nullptr);
  }

  std::vector<StoredDocument> list_owned(std::string_view collection,
                                         std::string_view owner) const override {
    return scan(collection, &owner);
  }

 private:
  struct Entry {
    std::int64_t version = 0;
    json value;
    std::string owner;
  };

  std::vector<StoredDocument> scan(std::string_view collection, const std::string_view* owner) const {
    std::shared_lock lock(mutex_);
    std::vector<StoredDocument> out;
    const auto c = collections_.find(collection);
    if (c == collections_.end()) return out;
    for (const auto& [key, e] : c->second) {
      if (owner && e.owner != *owner) continue;
      out.push_back({key, e.version, e.value});
    }
    return out;
  }

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::map<std::string, Entry, std::less<>>, std::less<>> collections_;
};

void init_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error(Errc::StorageUnavailable, "libsodium failed to initialize");
}

class MemoryBlobStore final : public BlobStore {
 public:
  using BlobStore::BlobStore;

  Blob get(std::string_view key) const override {
    std::shared_lock lock(mutex_);
    const auto it = blobs_.find(key);
    if (it == blobs_.end()) throw Error(Errc::NotFound, "no blob '" + std::string(key) + "'", std::string(key));
    return it->second;
  }

  bool contains(std::string_view key) const override {
    std::shared_lock lock(mutex_);
    return blobs_.find(key) != blobs_.end();
  }

 protected:
  void write(const BlobRef& ref, std::string_view bytes) override {
    std::unique_lock lock(mutex_);
    blobs_[ref.key] = Blob{ref, std::string(bytes)};
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Blob, std::less<>> blobs_;
};

bool valid_key(std::string_view key) {
  if (key.size() != 64) return false;
  for (char c : key) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

void write_file_atomically(const fs::path& target, std::string_view bytes) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::StorageUnavailable, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(Errc::StorageUnavailable, "cannot rename into " + target.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::StorageUnavailable, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class FileBlobStore final : public BlobStore {
 public:
  FileBlobStore(fs::path dir, std::int64_t max_bytes) : BlobStore(max_bytes), dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::StorageUnavailable, "cannot create " + dir_.string() + ": " + ec.message());
  }

  Blob get(std::string_view key) const override {
    if (!contains(key)) throw Error(Errc::NotFound, "no blob '" + std::string(key) + "'", std::string(key));
    std::shared_lock lock(mutex_);
    Blob blob;
    blob.bytes = read_file(path_of(key));
    blob.ref = {std::string(key), read_file(type_path_of(key)),
                static_cast<std::int64_t>(blob.bytes.size())};
    return blob;
  }

  bool contains(std::string_view key) const override {
    if (!valid_key(key)) return false;
    std::shared_lock lock(mutex_);
    std::error_code ec;
    return fs::exists(type_path_of(key), ec);
  }

 protected:
  void write(const BlobRef& ref, std::string_view bytes) override {
    std::unique_lock lock(mutex_);
    std::error_code ec;
    fs::create_directories(path_of(ref.key).parent_path(), ec);
    if (ec) throw Error(Errc::StorageUnavailable, "cannot create blob directory: " + ec.message());
    // The type sidecar is written last; its presence marks a complete blob.
    write_file_atomically(path_of(ref.key), bytes);
    write_file_atomically(type_path_of(ref.key), ref.content_type);
  }

 private:
  fs::path path_of(std::string_view key) const {
    return dir_ / std::string(key.substr(0, 2)) / std::string(key);
  }
  fs::path type_path_of(std::string_view key) const {
    fs::path p = path_of(key);
    p += ".type";
    return p;
  }

  fs::path dir_;
  mutable std::shared_mutex mutex_;
};

}  // namespace

std::unique_ptr<DocumentStore> make_memory_document_store() {
  return std::make_unique<MemoryDocumentStore>();
}

std::string sha256_hex(std::string_view bytes) {
  init_sodium();
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  char hex[crypto_hash_sha256_BYTES * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
  return hex;
}

BlobRef BlobStore::put(std::string_view bytes, std::string_view content_type) {
  if (static_cast<std::int64_t>(bytes.size()) > max_bytes_) {
    throw Error(Errc::BlobTooLarge,
                "blob of " + std::to_string(bytes.size()) + " bytes exceeds the " +
                    std::to_string(max_bytes_) + " byte limit",
                std::to_string(max_bytes_));
  }
  BlobRef ref{sha256_hex(bytes), std::string(content_type), static_cast<std::int64_t>(bytes.size())};
  write(ref, bytes);
  return ref;
}

std::unique_ptr<BlobStore> make_memory_blob_store(std::int64_t max_bytes) {
  return std::make_unique<MemoryBlobStore>(max_bytes);
}

std::unique_ptr<BlobStore> open_file_blob_store(const fs::path& dir, std::int64_t max_bytes) {
  return std::make_unique<FileBlobStore>(dir, max_bytes);
}

}  // namespace foodwise
