#include "precog/remote_backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <thread>

namespace precog {

using nlohmann::json;

namespace {

struct SemaphoreGuard {
  std::counting_semaphore<>& sem;
  explicit SemaphoreGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
};

httplib::Client make_client(const std::string& url, const RemoteOptions& options) {
  httplib::Client cli(url);
  auto secs = static_cast<time_t>(options.timeout.count());
  cli.set_connection_timeout(secs, 0);
  cli.set_read_timeout(secs, 0);
  cli.set_write_timeout(secs, 0);
  return cli;
}

}  // namespace

RemoteBackend::RemoteBackend(std::string base_url, const Vocabulary& vocab, RemoteOptions options)
    : base_url_(std::move(base_url)), vocab_(vocab), options_(options) {
  if (options_.max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
  if (options_.attempts < 1) throw std::invalid_argument("attempts must be >= 1");
  in_flight_ = std::make_unique<std::counting_semaphore<>>(options_.max_in_flight);
}

std::string RemoteBackend::fetch_model_id() const {
  std::string last_error;
  for (int attempt = 0; attempt < options_.attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
    auto cli = make_client(base_url_, options_);
    auto res = cli.Get("/health");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status < 500) break;
      continue;
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("model") || !j["model"].is_string()) {
      throw std::runtime_error("malformed /health response from " + base_url_);
    }
    return j["model"].get<std::string>();
  }
  throw std::runtime_error("backend unreachable at " + base_url_ + ": " + last_error);
}

std::string RemoteBackend::model_id() const {
  std::call_once(model_once_, [this] { model_id_ = fetch_model_id(); });
  return model_id_;
}

TopKPrediction RemoteBackend::predict_topk(const MaskedVariant& variant, int k) {
  if (k < 1) throw BackendError("k must be >= 1", variant.example_id, variant.masked_index);
  const std::string expected_model = model_id();

  json req;
  req["tokens"] = variant.rendered_tokens();
  req["masked_index"] = variant.masked_index;
  req["k"] = k;
  const std::string body = req.dump();

  SemaphoreGuard guard(*in_flight_);
  std::string last_error;
  for (int attempt = 0; attempt < options_.attempts; ++attempt) {
    if (attempt > 0) {
      auto delay = options_.backoff_base * (1 << (attempt - 1));
      spdlog::debug("retrying /topk for {}:{} in {} ms ({})", variant.example_id, variant.masked_index,
                    delay.count(), last_error);
      std::this_thread::sleep_for(delay);
    }
    ++requests_;
    auto cli = make_client(base_url_, options_);
    auto res = cli.Post("/topk", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError("/topk rejected request: HTTP " + std::to_string(res->status) + " " + res->body,
                         variant.example_id, variant.masked_index);
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("tokens") || !j["tokens"].is_array() ||
        !j.contains("model") || !j["model"].is_string()) {
      throw BackendError("malformed /topk response", variant.example_id, variant.masked_index);
    }
    if (j["model"].get<std::string>() != expected_model) {
      throw BackendError("model changed from '" + expected_model + "' to '" + j["model"].get<std::string>() + "'",
                         variant.example_id, variant.masked_index);
    }
    TopKPrediction out;
    out.k = k;
    try {
      out.tokens = j["tokens"].get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw BackendError("non-string token in /topk response", variant.example_id, variant.masked_index);
    }
    validate_prediction(out, vocab_, variant);
    return out;
  }
  throw BackendError("backend unreachable after " + std::to_string(options_.attempts) + " attempts: " + last_error,
                     variant.example_id, variant.masked_index);
}

}  // namespace precog
