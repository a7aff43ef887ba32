#include "mgtd/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "mgtd/util.hpp"

namespace mgtd {

namespace {

void check_message_shape(const CompletionRequest& request) {
  if (request.messages.size() != 2 || request.messages[0].role != "system" ||
      request.messages[1].role != "user")
    throw std::invalid_argument(
        "completion request must carry exactly one system message followed by one user message");
  for (const auto& m : request.messages)
    if (m.content.empty()) throw std::invalid_argument("empty message content");
}

nlohmann::ordered_json request_body(const CompletionRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  auto messages = nlohmann::ordered_json::array();
  for (const auto& m : request.messages)
    messages.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
  return body;
}

std::vector<std::string> contains_list(const nlohmann::json& value) {
  std::vector<std::string> out;
  if (value.is_string()) {
    out.push_back(value.get<std::string>());
  } else if (value.is_array()) {
    for (const auto& v : value) out.push_back(v.get<std::string>());
  } else {
    throw DataError("mock script: *_contains must be a string or array of strings");
  }
  return out;
}

std::string message_text(const CompletionRequest& request, const std::string& role) {
  std::string out;
  for (const auto& m : request.messages)
    if (m.role == role) out += m.content;
  return out;
}

}  // namespace

std::string cache_key(const CompletionRequest& request) {
  // Canonical serialization; field order is fixed so the digest is stable.
  return sha256_hex(request_body(request).dump());
}

std::string first_json_object(const std::string& raw) {
  std::size_t start = 0;
  while ((start = raw.find('{', start)) != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          std::string candidate = raw.substr(start, i - start + 1);
          if (nlohmann::json::accept(candidate)) return candidate;
          break;  // balanced but unparseable; try the next '{'
        }
      }
    }
    ++start;
  }
  return {};
}

AgentReply extract_structured_reply(const std::string& raw) {
  std::string obj = first_json_object(raw);
  if (obj.empty()) throw ReplyParseError("no JSON object found in reply", raw);
  nlohmann::json j = nlohmann::json::parse(obj);

  AgentReply reply;

  if (!j.contains("reasoning")) throw ReplyParseError("reply missing field 'reasoning'", raw);
  reply.reasoning =
      j["reasoning"].is_string() ? j["reasoning"].get<std::string>() : j["reasoning"].dump();

  if (!j.contains("final_decision") || !j["final_decision"].is_string())
    throw ReplyParseError("reply missing field 'final_decision'", raw);
  auto decision = parse_decision(j["final_decision"].get<std::string>());
  if (!decision)
    throw ReplyParseError(
        "unrecognized decision '" + j["final_decision"].get<std::string>() + "'", raw);
  reply.decision = *decision;

  if (!j.contains("confidence")) throw ReplyParseError("reply missing field 'confidence'", raw);
  double confidence = 0.0;
  const auto& c = j["confidence"];
  if (c.is_number()) {
    confidence = c.get<double>();
  } else if (c.is_string()) {
    const std::string s = trim(c.get<std::string>());
    char* end = nullptr;
    confidence = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
      throw ReplyParseError("confidence is not numeric: '" + s + "'", raw);
  } else {
    throw ReplyParseError("confidence is not numeric", raw);
  }

  if (confidence < 0.0 || confidence > 1.0) {
    warn("confidence " + std::to_string(confidence) + " clamped into [0,1]");
    confidence = confidence < 0.0 ? 0.0 : 1.0;
    reply.clamped = true;
  }
  reply.confidence = confidence;
  return reply;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw ConfigError("http backend: empty base url");
  if (!options_.api_key_env.empty()) {
    const char* key = std::getenv(options_.api_key_env.c_str());
    if (key && *key)
      api_key_ = key;
    else
      warn("environment variable " + options_.api_key_env +
           " is not set; requests go out without credentials");
  }
}

std::string HttpBackend::complete(const CompletionRequest& request) {
  check_message_shape(request);

  // Split "scheme://host[:port]/prefix" into the client target and path prefix.
  std::string url = options_.base_url;
  std::size_t scheme = url.find("://");
  std::size_t host_begin = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host_begin);
  std::string target = slash == std::string::npos ? url : url.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  const std::string path = prefix + "/chat/completions";

  const std::string body = request_body(request).dump();
  std::string last_error;

  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      int sleep_ms = options_.backoff_ms << (attempt - 2);
      std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    }

    httplib::Client client(target);
    client.set_connection_timeout(options_.timeout_sec, 0);
    client.set_read_timeout(options_.timeout_sec, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("authentication failed (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 408 || res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw GatewayError("backend rejected request (HTTP " + std::to_string(res->status) +
                         "): " + res->body.substr(0, 200));

    try {
      auto j = nlohmann::json::parse(res->body);
      return trim(j.at("choices").at(0).at("message").at("content").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw GatewayError("malformed completion response: " + std::string(e.what()));
    }
  }

  throw TransportError("transport failure after " + std::to_string(options_.max_attempts) +
                           " attempts (" + last_error + ")",
                       options_.max_attempts);
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend MockBackend::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("mock script: malformed JSON: " + std::string(e.what()));
  }
  const nlohmann::json& list = doc.is_array() ? doc : doc.at("replies");
  if (!list.is_array()) throw DataError("mock script: 'replies' must be an array");

  std::vector<MockRule> rules;
  for (const auto& entry : list) {
    MockRule rule;
    if (entry.contains("when")) {
      const auto& when = entry["when"];
      if (when.contains("model")) rule.model = when["model"].get<std::string>();
      if (when.contains("system_contains"))
        rule.system_contains = contains_list(when["system_contains"]);
      if (when.contains("user_contains")) rule.user_contains = contains_list(when["user_contains"]);
    }
    if (entry.contains("reply_json"))
      rule.reply = entry["reply_json"].dump();
    else if (entry.contains("reply") && entry["reply"].is_string())
      rule.reply = entry["reply"].get<std::string>();
    else
      throw DataError("mock script: rule needs a 'reply' string or 'reply_json' value");
    if (entry.contains("delay_ms")) rule.delay_ms = entry["delay_ms"].get<int>();
    rules.push_back(std::move(rule));
  }
  return MockBackend(std::move(rules));
}

MockBackend MockBackend::from_file(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

std::string MockBackend::complete(const CompletionRequest& request) {
  check_message_shape(request);
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_;
    ++in_flight_;
    if (in_flight_ > max_in_flight_) max_in_flight_ = in_flight_;
  }
  struct Depart {
    MockBackend* self;
    ~Depart() {
      std::lock_guard<std::mutex> lock(self->mu_);
      --self->in_flight_;
    }
  } depart{this};

  const std::string system = message_text(request, "system");
  const std::string user = message_text(request, "user");

  for (const auto& rule : rules_) {
    if (rule.model && *rule.model != request.model) continue;
    bool ok = true;
    for (const auto& s : rule.system_contains)
      if (!contains(system, s)) { ok = false; break; }
    if (ok)
      for (const auto& s : rule.user_contains)
        if (!contains(user, s)) { ok = false; break; }
    if (!ok) continue;
    if (rule.delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(rule.delay_ms));
    return rule.reply;
  }

  throw ScriptMissError("mock backend: no scripted reply matches request (model=" + request.model +
                        ", user=\"" + user.substr(0, 80) + "...\")");
}

MockStats MockBackend::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {calls_, max_in_flight_};
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // fresh cache
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("reply").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      warn("cache " + path_.string() + ": skipping corrupt line " + std::to_string(lineno));
    }
  }
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& model,
                        const std::string& reply) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = reply;
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    warn("cache " + path_.string() + ": cannot append, entry kept in memory only");
    return;
  }
  nlohmann::ordered_json rec = {
      {"key", key}, {"model", model}, {"reply", reply}, {"ts", now_rfc3339()}};
  out << rec.dump() << "\n";
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Session

class Session::Slot {
 public:
  explicit Slot(Session& session) : session_(session) {
    std::unique_lock<std::mutex> lock(session_.mu_);
    session_.cv_.wait(lock, [&] { return session_.in_use_ < session_.limit_; });
    ++session_.in_use_;
  }
  ~Slot() {
    {
      std::lock_guard<std::mutex> lock(session_.mu_);
      --session_.in_use_;
    }
    session_.cv_.notify_one();
  }

 private:
  Session& session_;
};

Session::Session(std::shared_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache,
                 int concurrency_limit)
    : backend_(std::move(backend)), cache_(std::move(cache)),
      limit_(concurrency_limit < 1 ? 1 : concurrency_limit) {
  if (!backend_) throw ConfigError("session: no backend configured");
}

CompletionResult Session::complete(const CompletionRequest& request) {
  check_message_shape(request);
  requests_.fetch_add(1);

  const std::string key = cache_key(request);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      cache_hits_.fetch_add(1);
      return {*hit, true};
    }
  }

  std::string text;
  {
    Slot slot(*this);  // cache hits above never consume a slot
    backend_calls_.fetch_add(1);
    text = backend_->complete(request);
  }
  if (cache_) cache_->put(key, request.model, text);
  return {text, false};
}

SessionCounters Session::counters() const {
  return {requests_.load(), cache_hits_.load(), backend_calls_.load(), reasks_.load()};
}

}  // namespace mgtd
