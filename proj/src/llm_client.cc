#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "llmdep/errors.h"
#include "llmdep/llm.h"
#include <json.hpp>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace llmdep {

void ChatRequest::Validate() const {
  if (messages.empty()) throw ConfigError("chat request has no messages");
  if (messages.front().role != "system") {
    throw ConfigError("first chat message must have role 'system'");
  }
}

int DefaultMaxOutputTokens(size_t n_words, int steps) {
  const int per_row = kMaxRowCharacters / 4;
  return static_cast<int>(n_words) * steps * per_row +
         steps * kBlockOverheadTokens;
}

ChatRequest MakeChatRequest(const PromptBundle& bundle, std::string model_name,
                            int max_output_tokens) {
  ChatRequest req;
  req.model_name = std::move(model_name);
  req.messages = {{"system", bundle.system}, {"user", bundle.user}};
  req.max_output_tokens = max_output_tokens;
  return req;
}

std::string ChatRequestJson(const ChatRequest& request) {
  nlohmann::ordered_json j;
  j["model"] = request.model_name;
  j["messages"] = nlohmann::ordered_json::array();
  for (const ChatMessage& m : request.messages) {
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  j["max_tokens"] = request.max_output_tokens;
  j["temperature"] = request.temperature;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string ParseChatResponse(std::string_view body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw FormatError("response body is not JSON");
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw FormatError("response has no choices");
  }
  const nlohmann::json& first = choices->front();
  if (!first.contains("message") || !first["message"].contains("content")) {
    throw FormatError("response choice has no message content");
  }
  const nlohmann::json& content = first["message"]["content"];
  if (content.is_null()) return "";
  if (!content.is_string()) throw FormatError("message content is not text");
  return content.get<std::string>();
}

Endpoint ParseEndpoint(std::string_view url) {
  Endpoint ep;
  const size_t sep = url.find("://");
  if (sep == std::string_view::npos) {
    throw ConfigError("endpoint '" + std::string(url) + "' has no scheme");
  }
  ep.scheme = std::string(url.substr(0, sep));
  if (ep.scheme != "http" && ep.scheme != "https") {
    throw ConfigError("endpoint scheme must be http or https");
  }
  const std::string rest(url.substr(sep + 3));
  const size_t slash = rest.find('/');
  const std::string authority = rest.substr(0, slash);
  std::string path = slash == std::string::npos ? "" : rest.substr(slash);
  const size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    ep.host = authority.substr(0, colon);
    const std::string port = authority.substr(colon + 1);
    char* end = nullptr;
    const long p = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p <= 0 || p > 65535) {
      throw ConfigError("bad port in endpoint '" + std::string(url) + "'");
    }
    ep.port = static_cast<int>(p);
  } else {
    ep.host = authority;
    ep.port = ep.scheme == "https" ? 443 : 80;
  }
  if (ep.host.empty()) {
    throw ConfigError("endpoint '" + std::string(url) + "' has no host");
  }
  while (!path.empty() && path.back() == '/') path.pop_back();
  if (path.ends_with("/chat/completions")) {
    ep.path = path;
  } else if (path.ends_with("/v1")) {
    ep.path = path + "/chat/completions";
  } else {
    ep.path = path + "/v1/chat/completions";
  }
  return ep;
}

std::chrono::milliseconds RetryPolicy::BackoffAfter(int attempt) const {
  const double ms = static_cast<double>(initial_backoff.count()) *
                    std::pow(multiplier, attempt - 1);
  return std::chrono::milliseconds(static_cast<int64_t>(
      std::min(ms, static_cast<double>(max_backoff.count()))));
}

bool IsTransientStatus(int http_status) {
  return http_status == 0 || http_status == 408 || http_status == 429 ||
         (http_status >= 500 && http_status <= 599);
}

void RequestLog::Record(std::string_view sent_id, int attempt, int http_status,
                        std::string_view request_body,
                        std::string_view response_body,
                        std::string_view error) {
  nlohmann::ordered_json j;
  j["sent_id"] = sent_id;
  j["attempt"] = attempt;
  j["http_status"] = http_status;
  j["request"] = request_body;
  j["response"] = response_body;
  if (!error.empty()) j["error"] = error;
  const std::string line =
      j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
  std::lock_guard<std::mutex> lock(mu_);
  if (sink_) sink_(line);
}

HttpChatClient::HttpChatClient(Endpoint endpoint, std::string api_key,
                               RetryPolicy retry, Sleeper sleeper,
                               RequestLog* log)
    : endpoint_(std::move(endpoint)),
      api_key_(std::move(api_key)),
      retry_(retry),
      sleeper_(std::move(sleeper)),
      log_(log) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

CompletionResult HttpChatClient::Complete(const ChatRequest& request,
                                          std::string_view sent_id) {
  request.Validate();
  const std::string body = ChatRequestJson(request);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }
  const std::string base = endpoint_.scheme + "://" + endpoint_.host + ":" +
                           std::to_string(endpoint_.port);
  CompletionResult result;
  const int max_attempts = std::max(1, retry_.max_attempts);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    httplib::Client client(base);
    client.set_connection_timeout(retry_.timeout);
    client.set_read_timeout(retry_.timeout);
    client.set_write_timeout(retry_.timeout);
    AttemptRecord record;
    record.attempt = attempt;
    std::string response_body;
    bool transient = true;
    if (auto res = client.Post(endpoint_.path, headers, body,
                               "application/json")) {
      record.http_status = res->status;
      response_body = res->body;
      if (res->status == 200) {
        try {
          result.text = ParseChatResponse(res->body);
          result.ok = true;
        } catch (const FormatError& e) {
          record.error = e.what();
          transient = false;
        }
      } else {
        record.error = "HTTP " + std::to_string(res->status);
        transient = IsTransientStatus(res->status);
      }
    } else {
      record.error = httplib::to_string(res.error());
    }
    if (log_ != nullptr) {
      log_->Record(sent_id, attempt, record.http_status, body, response_body,
                   record.error);
    }
    result.attempts.push_back(record);
    if (result.ok) return result;
    if (!transient) break;
    if (attempt < max_attempts) sleeper_(retry_.BackoffAfter(attempt));
  }
  result.error = "failed after " + std::to_string(result.attempts.size()) +
                 " attempt(s): " + result.attempts.back().error;
  return result;
}

std::vector<CompletionResult> RunBounded(
    size_t n, size_t max_in_flight,
    const std::function<CompletionResult(size_t)>& fn) {
  std::vector<CompletionResult> results(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fn(i);
      } catch (const std::exception& e) {
        results[i].ok = false;
        results[i].error = e.what();
      }
    }
  };
  const size_t threads = std::clamp<size_t>(max_in_flight, 1, std::max<size_t>(n, 1));
  if (threads == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace llmdep
