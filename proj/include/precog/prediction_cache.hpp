#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "precog/backend.hpp"

namespace precog {

struct CacheKey {
  std::string example_id;
  std::size_t masked_index = 0;
  int k = 0;
  std::string fingerprint;

  auto operator<=>(const CacheKey&) const = default;
};

struct CacheEntry {
  CacheKey key;
  TopKPrediction prediction;
};

struct CacheStats {
  std::size_t entries = 0;
  std::size_t malformed_lines = 0;
  std::size_t duplicate_keys = 0;
  std::size_t conflicting_keys = 0;
  std::map<std::string, std::size_t> per_fingerprint;
  std::set<int> k_values;
};

/// Append-only JSON-lines store of predictions:
///   {"eid": ..., "idx": ..., "k": ..., "fp": ..., "tokens": [...]}
/// A truncated trailing line (interrupted writer) is skipped on load.
class PredictionCache {
 public:
  explicit PredictionCache(std::filesystem::path path);
  PredictionCache(const PredictionCache&) = delete;
  PredictionCache& operator=(const PredictionCache&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

  std::optional<TopKPrediction> lookup(const CacheKey& key) const;
  /// No-op when the key is already present.
  void store(const CacheKey& key, const TopKPrediction& prediction);

  std::size_t size() const;
  /// Fingerprints seen with a given k.
  std::set<std::string> fingerprints_for_k(int k) const;

  /// Re-reads the file from disk without touching in-memory state.
  static std::vector<CacheEntry> read_entries(const std::filesystem::path& path, std::size_t* malformed = nullptr);
  static CacheStats stats(const std::filesystem::path& path);

  static std::string encode_line(const CacheKey& key, const TopKPrediction& prediction);

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<CacheKey, TopKPrediction> entries_;
  std::ofstream out_;
};

/// Cache-through wrapper. With no inner backend it runs in cache-only mode
/// where a miss is a BackendError.
class CachingBackend final : public MlmBackend {
 public:
  CachingBackend(std::shared_ptr<PredictionCache> cache, std::shared_ptr<MlmBackend> inner);

  TopKPrediction predict_topk(const MaskedVariant& variant, int k) override;
  std::string kind() const override;
  std::string model_id() const override;
  /// Cache-only mode resolves the fingerprint from the cache contents; it
  /// must be unique for the requested k.
  std::string fingerprint(int k) const override;

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  std::shared_ptr<PredictionCache> cache_;
  std::shared_ptr<MlmBackend> inner_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace precog
