#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include "precog/backend.hpp"

namespace precog {

struct RemoteOptions {
  int max_in_flight = 8;
  int attempts = 3;
  std::chrono::milliseconds backoff_base{1000};
  std::chrono::seconds timeout{60};
};

/// HTTP client for a /topk + /health inference service.
///
///   POST /topk   {"tokens": [...], "masked_index": i, "k": k}
///             -> {"model": "...", "tokens": [...]}
///   GET /health -> {"model": "..."}
///
/// Connection errors and 5xx responses are retried with exponential backoff
/// (backoff_base * 2^attempt); 4xx responses fail immediately. Responses are
/// validated against the vocabulary and must report the same model as /health.
class RemoteBackend final : public MlmBackend {
 public:
  RemoteBackend(std::string base_url, const Vocabulary& vocab, RemoteOptions options = {});

  TopKPrediction predict_topk(const MaskedVariant& variant, int k) override;
  std::string kind() const override { return "remote"; }
  /// Queries /health on first use.
  std::string model_id() const override;

  std::size_t requests_sent() const noexcept { return requests_; }

 private:
  std::string fetch_model_id() const;

  std::string base_url_;
  const Vocabulary& vocab_;
  RemoteOptions options_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
  mutable std::once_flag model_once_;
  mutable std::string model_id_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace precog
