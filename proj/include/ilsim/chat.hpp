// Copyright 2026 The ilsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ILSIM_CHAT_HPP_
#define ILSIM_CHAT_HPP_

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ilsim/acre.hpp"
#include "ilsim/agent.hpp"
#include "ilsim/bayes.hpp"

namespace ilsim {

// Chat-completions client layer: message structures, a wire client with
// retries, posterior reconstruction from token probabilities, and the
// prompt templates used for the reasoning and acronym tasks.

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct TokenCandidate {
  std::string token;
  double prob = 0.0;

  bool operator==(const TokenCandidate&) const = default;
};

struct TokenLogprobs {
  std::string token;
  double prob = 0.0;
  std::vector<TokenCandidate> top;

  bool operator==(const TokenLogprobs&) const = default;
};

// One request/response pair, including the returned per-token candidate
// lists when the endpoint provided them. Serializes to a canonical JSON
// fixture format that round-trips byte-exactly.
struct ChatExchange {
  std::vector<ChatMessage> messages;
  std::string response_text;
  bool logprobs_present = false;
  std::vector<TokenLogprobs> logprobs;

  std::string to_json() const;
  static ChatExchange from_json(const std::string& text);
  static ChatExchange from_json_file(const std::string& path);

  bool operator==(const ChatExchange&) const = default;
};

struct DecodingParams {
  double temperature = 0.1;
  int top_logprobs = 5;
};

struct EndpointConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;
  // Name of the environment variable holding the API key. Keys never live
  // in config files.
  std::string api_key_env = "ILSIM_API_KEY";
  int max_attempts = 4;
  double initial_backoff_s = 0.25;
};

// Blocking token-bucket rate limiter; the one piece of state shared
// across concurrent chat handles.
class TokenBucket {
 public:
  TokenBucket(double tokens_per_second, double burst);

  // Blocks until a token is available, then consumes it.
  void acquire();

  // Non-blocking variant for tests.
  bool try_acquire();

 private:
  void refill_locked();

  std::mutex mu_;
  std::condition_variable cv_;
  double rate_;
  double burst_;
  double available_;
  std::chrono::steady_clock::time_point last_refill_;
};

// One chat-completions call. Retries transient failures (429, 5xx,
// transport errors) with exponential backoff up to max_attempts. Distinct
// error types: AuthError (missing key or 401/403), RateLimitError (429
// after retries), WireError (malformed response or exhausted transport
// failures). A response without logprobs is returned with them marked
// absent, not an error.
ChatExchange chat_call(const EndpointConfig& endpoint,
                       std::span<const ChatMessage> messages,
                       const DecodingParams& decoding,
                       TokenBucket* limiter = nullptr);

// Posterior over all 3^M rules reconstructed from the per-token candidate
// lists: the probability of a rule is the product over objects of its
// state token's candidate probability. States missing from a candidate
// list receive `floor_prob` and raise the flag instead of annihilating the
// product.
struct RulePosterior {
  BeliefState belief;
  double prenorm_total = 0.0;        // sum over all rules before normalizing
  double format_token_product = 1.0; // product over non-value tokens
  bool floor_applied = false;
  bool total_out_of_tolerance = false;  // |prenorm_total - 1| > 0.05
};

RulePosterior extract_rule_posterior(const ChatExchange& exchange,
                                     std::size_t num_objects,
                                     double floor_prob = 1e-6);

enum class PromptKind {
  kImitationOnly,    // infer a rule from examples
  kSelfRefine,       // ...then self-check against the examples
  kHypoSearch,       // ...with external interpreter feedback
  kGenerateExamples, // emit new examples from a fixed rule
  kAcronym,          // emit new acronym examples from examples
};

enum class BiasPosition { kNone, kBeforeExamples, kAfterExamples };

struct PromptSlots {
  std::vector<std::string> object_names;   // reasoning-task kinds
  std::vector<AcreExample> examples;       // reasoning-task kinds
  std::string bias_sentence;
  BiasPosition bias_position = BiasPosition::kNone;
  std::string feedback;                    // hypo-search interpreter report
  std::optional<AcreRule> rule;            // generate-examples kind
  std::vector<std::string> acronym_lines;  // acronym kind, pre-rendered
  std::size_t batch_size = 0;              // how many examples to request
};

// Deterministic rendering; throws TemplateError when a slot the kind
// requires is missing or inconsistent.
std::vector<ChatMessage> render_prompt(PromptKind kind,
                                       const PromptSlots& slots);

// Renders one example line, e.g. "[A,B] -> on".
std::string format_acre_example(const AcreExample& example,
                                std::span<const std::string> object_names);

// Parses "Rule: {A:on, B:off, ...}"; every object must appear exactly
// once. Throws FormatError with the offending text attached.
AcreRule parse_rule_response(const std::string& text,
                             std::span<const std::string> object_names);

// Parses example lines in the format produced by format_acre_example.
// Non-empty lines that do not parse raise FormatError.
std::vector<AcreExample> parse_examples_response(
    const std::string& text, std::span<const std::string> object_names);

// The uniform agent handle: an exact Bayesian mock bound to an explicit
// rule space, or a chat endpoint bound to the prompt templates.
struct AgentHandle {
  enum class Kind { kMockBayesian, kChatLlm };

  Kind kind = Kind::kMockBayesian;

  // Mock binding.
  const AcreSpace* space = nullptr;
  BeliefState prior;

  // Chat binding.
  EndpointConfig endpoint;
  DecodingParams decoding;
  std::vector<std::string> object_names;
  std::shared_ptr<TokenBucket> limiter;
  int parse_retries = 2;

  static AgentHandle mock(const AcreSpace& space, BeliefState prior);
  static AgentHandle chat(EndpointConfig endpoint, DecodingParams decoding,
                          std::vector<std::string> object_names);
};

// Proposes a rule from examples. The mock returns the MAP rule plus the
// full exact posterior; the chat agent parses the response (bounded
// retries, FormatError with transcript afterwards) and reconstructs the
// posterior when token probabilities are available.
std::pair<AcreRule, std::optional<BeliefState>> agent_propose_rule(
    const AgentHandle& handle, std::span<const AcreExample> examples);

// Engine-facing adapter around a chat handle for the reasoning task:
// observe caches examples, select proposes a rule (re-proposing with
// interpreter feedback while an admissible mask rejects it), generate
// prompts for new examples from the selected rule.
class ChatAcreAgent final : public Agent {
 public:
  ChatAcreAgent(AgentHandle handle, const AcreSpace& space);

  void reset() override;
  void observe(std::span<const Example> data) override;
  bool has_belief() const override { return belief_.has_value(); }
  const BeliefState& belief() const override;
  void set_belief(BeliefState b) override { belief_ = std::move(b); }
  std::size_t select(const std::vector<bool>* admissible) override;
  std::vector<Example> generate(std::size_t h, std::size_t count,
                                Rng& rng) override;
  std::vector<Example> generate_marginal(std::size_t count, Rng& rng) override;

 private:
  AgentHandle handle_;
  const AcreSpace& space_;
  std::vector<AcreExample> observed_;
  std::optional<BeliefState> belief_;
};

}  // namespace ilsim

#endif  // ILSIM_CHAT_HPP_
