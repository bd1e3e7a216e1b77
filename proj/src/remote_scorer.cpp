#include "dqm/remote_scorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "dqm/error.hpp"

namespace dqm {
namespace {

using nlohmann::json;

// Runs fn(batch_index) for every batch on up to `workers` threads. The first
// exception thrown by any batch is rethrown after all workers finish.
template <typename Fn>
void for_each_batch(size_t n_batches, int workers, Fn&& fn) {
  if (n_batches == 0) return;
  size_t threads = std::min<size_t>(n_batches, static_cast<size_t>(std::max(1, workers)));
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto run = [&] {
    for (size_t b; (b = next.fetch_add(1)) < n_batches;) {
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n_batches;
      }
    }
  };
  if (threads == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (size_t i = 0; i < threads; ++i) pool.emplace_back(run);
  }
  if (failure) std::rethrow_exception(failure);
}

bool transient(int status) { return status == 429 || status >= 500; }

// Longest prefix of at most `limit` bytes that does not split a UTF-8 sequence.
std::string utf8_prefix(const std::string& s, size_t limit) {
  if (s.size() <= limit) return s;
  size_t cut = limit;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return s.substr(0, cut);
}

}  // namespace

void RemoteConfig::validate() const {
  if (endpoint.empty()) throw ValidationError("remote backend requires an endpoint");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (max_in_flight < 1) throw ValidationError("max in-flight requests must be >= 1");
  if (retries < 0) throw ValidationError("retries must be >= 0");
}

RemoteScorer::RemoteScorer(RemoteConfig config) : config_(std::move(config)) { config_.validate(); }

json RemoteScorer::post(const std::string& path, const json& body) const {
  const std::string payload = body.dump(-1, ' ', false, json::error_handler_t::replace);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1 << (attempt - 1)));
    httplib::Client cli(config_.endpoint);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    auto res = cli.Post(path, payload, "application/json");
    if (!res) {
      last_error = config_.endpoint + path + ": " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = config_.endpoint + path + ": HTTP " + std::to_string(res->status) + " " +
                   res->body.substr(0, 200);
      if (transient(res->status)) continue;
      throw BackendError(last_error, attempt);
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError(config_.endpoint + path + ": malformed JSON response: " + e.what(), attempt);
    }
  }
  throw BackendError(last_error, config_.retries);
}

json RemoteScorer::health() const {
  httplib::Client cli(config_.endpoint);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  cli.set_connection_timeout(std::max<long>(1, secs.count()), 0);
  auto res = cli.Get("/health");
  if (!res) {
    throw BackendError(config_.endpoint + "/health unreachable: " + httplib::to_string(res.error()));
  }
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception&) {
    throw BackendError(config_.endpoint + "/health returned non-JSON (HTTP " +
                       std::to_string(res->status) + ")");
  }
  if (res->status != 200 || body.value("status", "") != "ok") {
    throw BackendError(config_.endpoint + "/health not ok: " + body.dump());
  }
  return body;
}

std::vector<EmbeddingVector> RemoteScorer::embed(std::span<const std::string> texts) const {
  for (const auto& t : texts) {
    if (t.empty()) throw BackendError("remote embed: empty text has a zero vector");
  }
  std::vector<EmbeddingVector> out(texts.size());
  const size_t bs = static_cast<size_t>(config_.batch_size);
  const size_t n_batches = (texts.size() + bs - 1) / bs;
  for_each_batch(n_batches, config_.max_in_flight, [&](size_t b) {
    size_t lo = b * bs, hi = std::min(texts.size(), lo + bs);
    json req{{"texts", json::array()}};
    for (size_t i = lo; i < hi; ++i) req["texts"].push_back(texts[i]);
    json res = post("/v1/embed", req);
    if (!res.contains("vectors") || !res["vectors"].is_array() || res["vectors"].size() != hi - lo) {
      throw BackendError("/v1/embed: response length does not match request");
    }
    for (size_t i = lo; i < hi; ++i) {
      const json& vec = res["vectors"][i - lo];
      if (!vec.is_array() || vec.empty()) throw BackendError("/v1/embed: vector is not a non-empty array");
      EmbeddingVector v;
      v.values.reserve(vec.size());
      for (const auto& x : vec) {
        if (!x.is_number()) throw BackendError("/v1/embed: non-numeric vector entry");
        v.values.push_back(x.get<double>());
      }
      v.normalize();
      out[i] = std::move(v);
    }
  });
  for (const auto& v : out) {
    if (v.dim() != out.front().dim()) throw BackendError("/v1/embed: inconsistent vector dimensions");
  }
  return out;
}

std::vector<SpecificityDistribution> RemoteScorer::classify(std::span<const PairQuery> pairs) const {
  std::vector<SpecificityDistribution> out(pairs.size());
  const size_t bs = static_cast<size_t>(config_.batch_size);
  const size_t n_batches = (pairs.size() + bs - 1) / bs;
  for_each_batch(n_batches, config_.max_in_flight, [&](size_t b) {
    size_t lo = b * bs, hi = std::min(pairs.size(), lo + bs);
    json req{{"pairs", json::array()}};
    for (size_t i = lo; i < hi; ++i) {
      const auto& p = pairs[i];
      req["pairs"].push_back({{"q_a", p.q_a}, {"c_a", p.c_a}, {"q_b", p.q_b}, {"c_b", p.c_b}});
    }
    json res = post("/v1/specificity", req);
    if (!res.contains("distributions") || !res["distributions"].is_array() ||
        res["distributions"].size() != hi - lo) {
      throw BackendError("/v1/specificity: response length does not match request");
    }
    for (size_t i = lo; i < hi; ++i) {
      const json& d = res["distributions"][i - lo];
      SpecificityDistribution dist;
      try {
        dist = {d.at("general").get<double>(), d.at("specific").get<double>(),
                d.at("other").get<double>()};
        dist.validate(config_.sum_tolerance);
      } catch (const json::exception& e) {
        throw ValidationError(std::string("/v1/specificity: malformed distribution: ") + e.what());
      }
      out[i] = dist;
    }
  });
  return out;
}

std::vector<GeneratedQuestion> RemoteScorer::generate(std::span<const std::string> contexts) const {
  std::vector<GeneratedQuestion> out(contexts.size());
  const size_t bs = static_cast<size_t>(config_.batch_size);
  const size_t n_batches = (contexts.size() + bs - 1) / bs;
  for_each_batch(n_batches, config_.max_in_flight, [&](size_t b) {
    size_t lo = b * bs, hi = std::min(contexts.size(), lo + bs);
    json req{{"contexts", json::array()}};
    for (size_t i = lo; i < hi; ++i) {
      if (contexts[i].empty()) throw ValidationError("cannot generate a question from an empty context");
      bool cut = contexts[i].size() > config_.max_context_chars;
      out[i].truncated = cut;
      req["contexts"].push_back(utf8_prefix(contexts[i], config_.max_context_chars));
    }
    json res = post("/v1/generate", req);
    if (!res.contains("questions") || !res["questions"].is_array() ||
        res["questions"].size() != hi - lo) {
      throw BackendError("/v1/generate: response length does not match request");
    }
    for (size_t i = lo; i < hi; ++i) {
      const json& q = res["questions"][i - lo];
      if (!q.is_string() || q.get<std::string>().empty()) {
        throw BackendError("/v1/generate: empty generation for context " + std::to_string(i));
      }
      out[i].text = q.get<std::string>();
    }
  });
  return out;
}

}  // namespace dqm
