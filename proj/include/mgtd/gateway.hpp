#pragma once
// Chat-completion gateway: uniform access to an OpenAI-compatible HTTP
// backend or a scripted mock, with deterministic response caching, retries,
// a bounded in-flight limit, and robust extraction of structured replies.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgtd/errors.hpp"
#include "mgtd/types.hpp"

namespace mgtd {

struct ChatMessage {
  std::string role;  // "system" or "user"
  std::string content;
};

struct CompletionRequest {
  std::string model;
  std::vector<ChatMessage> messages;  // exactly one system followed by one user
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

struct CompletionResult {
  std::string text;
  bool cached = false;
};

// Structured agent reply: {"reasoning", "final_decision", "confidence"}.
struct AgentReply {
  std::string reasoning;
  Decision decision = Decision::AI;
  double confidence = 0.0;  // clamped into [0, 1]
  bool clamped = false;     // true when the raw value fell outside [0, 1]
};

// Stable digest of (model, messages, temperature, max_tokens); any field
// change produces a different key.
std::string cache_key(const CompletionRequest& request);

// Locates the first balanced JSON object in raw (skipping prose and code
// fences) and parses the reply fields. Decision labels are matched
// case-insensitively; confidence may be a number or a numeric string and is
// clamped into [0, 1] with a warning. Throws ReplyParseError (carrying the
// raw text) when no object parses or a field is missing/unrecognizable.
AgentReply extract_structured_reply(const std::string& raw);

// First balanced JSON object found in raw as text, or empty when none.
std::string first_json_object(const std::string& raw);

// ---------------------------------------------------------------------------
// Backends

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

struct HttpBackendOptions {
  std::string base_url;      // e.g. "https://api.deepseek.com/v1"
  std::string api_key_env;   // env var holding the bearer token ("" = none)
  int max_attempts = 3;      // total tries for transient transport failures
  int backoff_ms = 250;      // doubled after every failed attempt
  int timeout_sec = 120;
};

// POSTs to <base_url>/chat/completions with the OpenAI-compatible body
// {model, messages, temperature, max_tokens}. Transient failures
// (connect errors, 408/429/5xx) are retried with exponential backoff;
// 401/403 raise AuthError immediately.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  std::string complete(const CompletionRequest& request) override;
  std::string name() const override { return "http:" + options_.base_url; }

 private:
  HttpBackendOptions options_;
  std::string api_key_;
};

// One scripted reply rule. Missing fields match anything; *_contains entries
// must all be present as substrings. Rules are evaluated in order and the
// first match wins.
struct MockRule {
  std::optional<std::string> model;
  std::vector<std::string> system_contains;
  std::vector<std::string> user_contains;
  std::string reply;
  int delay_ms = 0;  // simulated latency (concurrency tests)
};

struct MockStats {
  long calls = 0;
  int max_in_flight = 0;
};

// Deterministic scripted backend for replay and tests.
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::vector<MockRule> rules) : rules_(std::move(rules)) {}

  // Movable before use; the mutex and stats start fresh in the destination.
  MockBackend(MockBackend&& other) noexcept : rules_(std::move(other.rules_)) {}
  MockBackend& operator=(MockBackend&&) = delete;

  // Script file format: {"replies": [{"when": {"model"?, "system_contains"?,
  // "user_contains"?}, "reply": "..." | "reply_json": {...}, "delay_ms"?}]}.
  // "system_contains"/"user_contains" accept a string or array of strings.
  static MockBackend from_file(const std::filesystem::path& path);
  static MockBackend from_json_text(const std::string& text);

  std::string complete(const CompletionRequest& request) override;  // throws ScriptMissError
  std::string name() const override { return "mock"; }

  MockStats stats() const;

 private:
  std::vector<MockRule> rules_;
  mutable std::mutex mu_;
  long calls_ = 0;
  int in_flight_ = 0;
  int max_in_flight_ = 0;
};

// ---------------------------------------------------------------------------
// Cache

// Append-only reply cache persisted as JSON lines
// {"key", "model", "reply", "ts"}. Corrupt lines are skipped with a warning.
// Reads and writes are atomic per key (single internal mutex).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path path);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& model, const std::string& reply);

  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

// ---------------------------------------------------------------------------
// Session

struct SessionCounters {
  long requests = 0;
  long cache_hits = 0;
  long backend_calls = 0;
  long reasks = 0;
};

// Front door used by the pipeline: cache lookup, then a backend call bounded
// by the concurrency limit. Cache hits perform no backend call and do not
// consume a concurrency slot.
class Session {
 public:
  Session(std::shared_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache,
          int concurrency_limit);

  CompletionResult complete(const CompletionRequest& request);

  // complete + parse, with one re-ask (strict-JSON reminder appended to the
  // user message) when parsing fails. The second failure propagates.
  template <typename Parser>
  auto complete_parsed(CompletionRequest request, Parser&& parse)
      -> decltype(parse(std::string{})) {
    auto first = complete(request);
    try {
      return parse(first.text);
    } catch (const ReplyParseError&) {
      reasks_.fetch_add(1);
      request.messages.back().content += "\n\nRespond strictly in JSON.";
      auto second = complete(request);
      return parse(second.text);
    }
  }

  AgentReply complete_reply(const CompletionRequest& request) {
    return complete_parsed(request, extract_structured_reply);
  }

  SessionCounters counters() const;
  int concurrency_limit() const { return limit_; }
  Backend& backend() { return *backend_; }

 private:
  class Slot;  // RAII acquire/release on the bounded counter

  std::shared_ptr<Backend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  int limit_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_use_ = 0;

  std::atomic<long> requests_{0};
  std::atomic<long> cache_hits_{0};
  std::atomic<long> backend_calls_{0};
  std::atomic<long> reasks_{0};
};

}  // namespace mgtd
