#ifndef LLMDEP_LLM_H_
#define LLMDEP_LLM_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "llmdep/prompts.h"
#include "llmdep/treebank.h"

namespace llmdep {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  int max_output_tokens = 0;
  double temperature = 0.0;

  // Throws ConfigError unless there is at least one message and the first
  // one has role "system".
  void Validate() const;
};

// Output budget per sentence. A row of the TSV is bounded at
// kMaxRowCharacters characters, about kMaxRowCharacters / 4 tokens, and each
// task block repeats all rows; kBlockOverheadTokens covers headers.
inline constexpr int kMaxRowCharacters = 96;
inline constexpr int kBlockOverheadTokens = 16;
int DefaultMaxOutputTokens(size_t n_words, int steps);

// System and user messages of the bundle; the gold reply is not sent.
ChatRequest MakeChatRequest(const PromptBundle& bundle, std::string model_name,
                            int max_output_tokens);

// Chat-completions request body.
std::string ChatRequestJson(const ChatRequest& request);
// choices[0].message.content of a chat-completions response. Throws
// FormatError if the body has no such field.
std::string ParseChatResponse(std::string_view body);

struct Endpoint {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  // Request path, ending in "/chat/completions".
  std::string path;
};

// Accepts "http[s]://host[:port][/base]". A base that does not already end
// in "/chat/completions" gets "/v1/chat/completions" appended (or
// "/chat/completions" when it ends in "/v1"). Throws ConfigError.
Endpoint ParseEndpoint(std::string_view url);

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};
  std::chrono::seconds timeout{120};

  // Delay before attempt `attempt` + 1, for attempt >= 1.
  std::chrono::milliseconds BackoffAfter(int attempt) const;
};

// Timeouts, connection failures, 429 and 5xx are retried.
bool IsTransientStatus(int http_status);

struct AttemptRecord {
  int attempt = 0;
  int http_status = 0;  // 0 when no response was received
  std::string error;
};

struct CompletionResult {
  bool ok = false;
  std::string text;
  std::string error;
  std::vector<AttemptRecord> attempts;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Never throws for remote failures; they are reported in the result.
  virtual CompletionResult Complete(const ChatRequest& request,
                                    std::string_view sent_id) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Thread-safe sink for one JSON line per request/response pair.
class RequestLog {
 public:
  explicit RequestLog(std::function<void(const std::string&)> sink)
      : sink_(std::move(sink)) {}

  void Record(std::string_view sent_id, int attempt, int http_status,
              std::string_view request_body, std::string_view response_body,
              std::string_view error);

 private:
  std::mutex mu_;
  std::function<void(const std::string&)> sink_;
};

// POSTs chat-completions requests with "Authorization: Bearer <api_key>"
// when a key is given, retrying transient failures with exponential backoff.
class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(Endpoint endpoint, std::string api_key, RetryPolicy retry,
                 Sleeper sleeper = {}, RequestLog* log = nullptr);

  CompletionResult Complete(const ChatRequest& request,
                            std::string_view sent_id) override;

 private:
  Endpoint endpoint_;
  std::string api_key_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  RequestLog* log_;
};

// Runs fn(0..n-1) with at most max_in_flight calls at a time. Results are
// stored by index, so the output never depends on completion order.
std::vector<CompletionResult> RunBounded(
    size_t n, size_t max_in_flight,
    const std::function<CompletionResult(size_t)>& fn);

enum class MockMode { kOracle, kNoisy };

// Error injection for the local mock. All probabilities are in [0, 1].
//
// The noisy sampler draws from Rng(DeriveSeed(seed, sent_id)) in this order:
//   per token, in order:
//     head:   with p_head_error, if the gold head is not 0, the head becomes
//             a uniform draw from {0..n} minus {gold head, own id};
//     upos:   with p_upos_error, a uniform other UPOS tag;
//     deprel: with p_deprel_error, a uniform other universal relation;
//     form:   with p_form_error, one of: FORM gets a '#' appended, FORM
//             loses its last character (or becomes '?'), ID is shifted by n;
//   per sentence (n >= 2 only):
//     extra root: with p_multi_root, a uniform token whose head is not 0
//             gets head 0;
//     cycle:  with p_cycle, uniform tokens i != j get heads j and i;
//   per row, in order:
//     drop:   with p_drop_row the row is left out;
//     fields: with p_field_count the row omits DEPREL (4 fields).
struct MockPolicy {
  MockMode mode = MockMode::kOracle;
  uint64_t seed = 0;
  double p_drop_row = 0.0;
  double p_field_count = 0.0;
  double p_head_error = 0.0;
  double p_upos_error = 0.0;
  double p_deprel_error = 0.0;
  double p_multi_root = 0.0;
  double p_cycle = 0.0;
  double p_form_error = 0.0;

  // Throws ConfigError for probabilities outside [0, 1].
  void Validate() const;
  // Oracle mode has every probability at 0.
  MockPolicy Effective() const;

  // Keys: mode ("oracle"|"noisy"), seed and the p_* names above.
  // Throws ConfigError on unknown keys or bad values.
  static MockPolicy FromJson(std::string_view json);
  std::string ToJson() const;
};

MockMode ParseMockMode(std::string_view name);

// Oracle mode returns bundle.gold_assistant unchanged. Deterministic in
// (policy, gold.sent_id).
std::string MockComplete(const PromptBundle& bundle, const Sentence& gold,
                         const StepPlan& plan, const MockPolicy& policy);

// The 17 UPOS tags and 37 universal relations used for substitutions.
const std::vector<std::string>& UposTags();
const std::vector<std::string>& UniversalRelations();

}  // namespace llmdep

#endif  // LLMDEP_LLM_H_
