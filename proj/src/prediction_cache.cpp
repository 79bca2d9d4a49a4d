#include "precog/prediction_cache.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <sstream>

namespace precog {

using nlohmann::json;

namespace {

std::optional<CacheEntry> decode_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    CacheEntry e;
    e.key.example_id = j.at("eid").get<std::string>();
    e.key.masked_index = j.at("idx").get<std::size_t>();
    e.key.k = j.at("k").get<int>();
    e.key.fingerprint = j.at("fp").get<std::string>();
    e.prediction.tokens = j.at("tokens").get<std::vector<std::string>>();
    e.prediction.k = e.key.k;
    return e;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string PredictionCache::encode_line(const CacheKey& key, const TopKPrediction& prediction) {
  json j;
  j["eid"] = key.example_id;
  j["idx"] = key.masked_index;
  j["k"] = key.k;
  j["fp"] = key.fingerprint;
  j["tokens"] = prediction.tokens;
  return j.dump();
}

std::vector<CacheEntry> PredictionCache::read_entries(const std::filesystem::path& path, std::size_t* malformed) {
  std::vector<CacheEntry> out;
  std::size_t bad = 0;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (auto e = decode_line(line)) {
      out.push_back(std::move(*e));
    } else {
      ++bad;
    }
  }
  if (malformed) *malformed = bad;
  return out;
}

PredictionCache::PredictionCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  bool needs_newline = false;
  if (std::filesystem::exists(path_)) {
    std::size_t malformed = 0;
    for (auto& e : read_entries(path_, &malformed)) entries_.emplace(std::move(e.key), std::move(e.prediction));
    if (malformed) spdlog::warn("prediction cache {}: skipped {} malformed line(s)", path_.string(), malformed);
    std::ifstream in(path_, std::ios::binary | std::ios::ate);
    if (in.tellg() > 0) {
      in.seekg(-1, std::ios::end);
      needs_newline = in.get() != '\n';
    }
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open prediction cache " + path_.string());
  if (needs_newline) out_ << '\n' << std::flush;
}

std::optional<TopKPrediction> PredictionCache::lookup(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PredictionCache::store(const CacheKey& key, const TopKPrediction& prediction) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, prediction);
  if (!inserted) return;
  it->second.k = key.k;
  out_ << encode_line(key, prediction) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write to prediction cache failed: " + path_.string());
}

std::size_t PredictionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::set<std::string> PredictionCache::fingerprints_for_k(int k) const {
  std::lock_guard lock(mutex_);
  std::set<std::string> out;
  for (const auto& [key, _] : entries_) {
    if (key.k == k) out.insert(key.fingerprint);
  }
  return out;
}

CacheStats PredictionCache::stats(const std::filesystem::path& path) {
  CacheStats s;
  auto entries = read_entries(path, &s.malformed_lines);
  std::map<CacheKey, const TopKPrediction*> seen;
  for (const auto& e : entries) {
    auto [it, inserted] = seen.emplace(e.key, &e.prediction);
    if (!inserted) {
      ++s.duplicate_keys;
      if (it->second->tokens != e.prediction.tokens) ++s.conflicting_keys;
      continue;
    }
    ++s.per_fingerprint[e.key.fingerprint];
    s.k_values.insert(e.key.k);
  }
  s.entries = seen.size();
  return s;
}

CachingBackend::CachingBackend(std::shared_ptr<PredictionCache> cache, std::shared_ptr<MlmBackend> inner)
    : cache_(std::move(cache)), inner_(std::move(inner)) {
  if (!cache_) throw std::invalid_argument("CachingBackend requires a cache");
}

std::string CachingBackend::kind() const { return inner_ ? inner_->kind() : "cache"; }

std::string CachingBackend::model_id() const { return inner_ ? inner_->model_id() : cache_->path().filename().string(); }

std::string CachingBackend::fingerprint(int k) const {
  if (inner_) return inner_->fingerprint(k);
  auto fps = cache_->fingerprints_for_k(k);
  if (fps.size() != 1) {
    throw std::runtime_error("cache-only mode needs exactly one backend fingerprint for k=" + std::to_string(k) +
                             " in " + cache_->path().string() + ", found " + std::to_string(fps.size()));
  }
  return *fps.begin();
}

TopKPrediction CachingBackend::predict_topk(const MaskedVariant& variant, int k) {
  CacheKey key{variant.example_id, variant.masked_index, k, fingerprint(k)};
  if (auto hit = cache_->lookup(key)) {
    ++hits_;
    return *hit;
  }
  if (!inner_) throw BackendError("cache miss in cache-only mode", variant.example_id, variant.masked_index);
  ++misses_;
  TopKPrediction p = inner_->predict_topk(variant, k);
  cache_->store(key, p);
  return p;
}

}  // namespace precog
