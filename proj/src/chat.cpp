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

#include "ilsim/chat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace ilsim {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])))
    --end;
  return s.substr(begin, end - begin);
}

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Strips surrounding whitespace and punctuation so a token like " on,"
// compares equal to "on".
std::string token_word(const std::string& token) {
  std::string out;
  for (char c : token)
    if (std::isalnum(static_cast<unsigned char>(c))) out += c;
  return to_lower(out);
}

std::optional<LightState> state_of_token(const std::string& token) {
  const std::string word = token_word(token);
  if (word == "on") return LightState::kOn;
  if (word == "off") return LightState::kOff;
  if (word == "und" || word == "undetermined") return LightState::kUnd;
  return std::nullopt;
}

}  // namespace

std::string ChatExchange::to_json() const {
  json j;
  j["schema_version"] = 1;
  json msgs = json::array();
  for (const ChatMessage& m : messages)
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  j["messages"] = std::move(msgs);
  j["response_text"] = response_text;
  j["logprobs_present"] = logprobs_present;
  json lps = json::array();
  for (const TokenLogprobs& t : logprobs) {
    json top = json::array();
    for (const TokenCandidate& c : t.top)
      top.push_back({{"prob", c.prob}, {"token", c.token}});
    lps.push_back({{"prob", t.prob}, {"token", t.token}, {"top", std::move(top)}});
  }
  j["logprobs"] = std::move(lps);
  return j.dump(2) + "\n";
}

ChatExchange ChatExchange::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw WireError(std::string("ChatExchange: invalid JSON: ") + e.what());
  }
  if (j.value("schema_version", 0) != 1)
    throw WireError("ChatExchange: unsupported schema version");
  ChatExchange ex;
  for (const auto& m : j.at("messages"))
    ex.messages.push_back(ChatMessage{m.at("role").get<std::string>(),
                                      m.at("content").get<std::string>()});
  ex.response_text = j.at("response_text").get<std::string>();
  ex.logprobs_present = j.at("logprobs_present").get<bool>();
  for (const auto& t : j.at("logprobs")) {
    TokenLogprobs entry;
    entry.token = t.at("token").get<std::string>();
    entry.prob = t.at("prob").get<double>();
    for (const auto& c : t.at("top"))
      entry.top.push_back(TokenCandidate{c.at("token").get<std::string>(),
                                         c.at("prob").get<double>()});
    ex.logprobs.push_back(std::move(entry));
  }
  return ex;
}

ChatExchange ChatExchange::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second),
      burst_(burst),
      available_(burst),
      last_refill_(std::chrono::steady_clock::now()) {
  if (!(tokens_per_second > 0.0) || !(burst >= 1.0))
    throw DomainError("TokenBucket: rate must be > 0 and burst >= 1");
}

void TokenBucket::refill_locked() {
  const auto now = std::chrono::steady_clock::now();
  const double elapsed =
      std::chrono::duration<double>(now - last_refill_).count();
  available_ = std::min(burst_, available_ + elapsed * rate_);
  last_refill_ = now;
}

void TokenBucket::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  for (;;) {
    refill_locked();
    if (available_ >= 1.0) {
      available_ -= 1.0;
      return;
    }
    const double deficit = 1.0 - available_;
    const auto wait = std::chrono::duration<double>(deficit / rate_);
    cv_.wait_for(lock, wait);
  }
}

bool TokenBucket::try_acquire() {
  std::lock_guard<std::mutex> lock(mu_);
  refill_locked();
  if (available_ >= 1.0) {
    available_ -= 1.0;
    return true;
  }
  return false;
}

namespace {

struct SplitUrl {
  std::string host;  // scheme://host[:port]
  std::string path_prefix;
};

SplitUrl split_base_url(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos)
    throw ConfigError("chat endpoint URL must include a scheme: " + base_url);
  const std::size_t slash = base_url.find('/', scheme + 3);
  if (slash == std::string::npos) return SplitUrl{base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return SplitUrl{base_url.substr(0, slash), prefix};
}

ChatExchange parse_wire_response(const std::string& body,
                                 std::vector<ChatMessage> messages) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw WireError(std::string("malformed chat response: ") + e.what());
  }
  ChatExchange ex;
  ex.messages = std::move(messages);
  try {
    const json& choice = j.at("choices").at(0);
    ex.response_text = choice.at("message").at("content").get<std::string>();
    if (choice.contains("logprobs") && !choice.at("logprobs").is_null() &&
        choice.at("logprobs").contains("content")) {
      ex.logprobs_present = true;
      for (const auto& t : choice.at("logprobs").at("content")) {
        TokenLogprobs entry;
        entry.token = t.at("token").get<std::string>();
        entry.prob = std::exp(t.at("logprob").get<double>());
        if (t.contains("top_logprobs")) {
          for (const auto& c : t.at("top_logprobs"))
            entry.top.push_back(
                TokenCandidate{c.at("token").get<std::string>(),
                               std::exp(c.at("logprob").get<double>())});
        }
        ex.logprobs.push_back(std::move(entry));
      }
    }
  } catch (const json::exception& e) {
    throw WireError(std::string("unexpected chat response shape: ") +
                    e.what());
  }
  return ex;
}

}  // namespace

ChatExchange chat_call(const EndpointConfig& endpoint,
                       std::span<const ChatMessage> messages,
                       const DecodingParams& decoding, TokenBucket* limiter) {
  const char* key = std::getenv(endpoint.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw AuthError("credential environment variable '" +
                    endpoint.api_key_env + "' is not set");

  const SplitUrl url = split_base_url(endpoint.base_url);
  json body;
  body["model"] = endpoint.model;
  json msgs = json::array();
  for (const ChatMessage& m : messages)
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  body["temperature"] = decoding.temperature;
  body["logprobs"] = true;
  body["top_logprobs"] = decoding.top_logprobs;
  const std::string payload = body.dump();

  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 0; attempt < endpoint.max_attempts; ++attempt) {
    if (attempt > 0) {
      const double backoff =
          endpoint.initial_backoff_s * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
    if (limiter != nullptr) limiter->acquire();

    httplib::Client client(url.host);
    client.set_read_timeout(120, 0);
    httplib::Headers headers{
        {"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post((url.path_prefix + "/chat/completions").c_str(),
                           headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
      rate_limited = false;
      continue;
    }
    if (res->status == 200) {
      std::vector<ChatMessage> request(messages.begin(), messages.end());
      return parse_wire_response(res->body, std::move(request));
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("endpoint rejected the credential (HTTP " +
                      std::to_string(res->status) + ")");
    if (res->status == 429) {
      rate_limited = true;
      last_error = "rate limited (HTTP 429)";
      continue;
    }
    if (res->status >= 500) {
      rate_limited = false;
      last_error = "server error (HTTP " + std::to_string(res->status) + ")";
      continue;
    }
    throw WireError("unexpected HTTP status " + std::to_string(res->status));
  }
  if (rate_limited)
    throw RateLimitError("rate limit persisted across " +
                         std::to_string(endpoint.max_attempts) + " attempts");
  throw WireError("chat call failed after " +
                  std::to_string(endpoint.max_attempts) +
                  " attempts: " + last_error);
}

RulePosterior extract_rule_posterior(const ChatExchange& exchange,
                                     std::size_t num_objects,
                                     double floor_prob) {
  if (!exchange.logprobs_present)
    throw MisuseError("extract_rule_posterior: exchange has no logprobs");

  // Value positions are the tokens that spell out a state, in response
  // order; the fixed rule format guarantees one per object.
  std::vector<std::size_t> value_positions;
  for (std::size_t i = 0; i < exchange.logprobs.size(); ++i)
    if (state_of_token(exchange.logprobs[i].token).has_value())
      value_positions.push_back(i);
  if (value_positions.size() < num_objects)
    throw FormatError("extract_rule_posterior: found " +
                          std::to_string(value_positions.size()) +
                          " state tokens, need " +
                          std::to_string(num_objects),
                      exchange.response_text);
  value_positions.resize(num_objects);

  RulePosterior result;
  // Per-object categorical over the three states.
  std::vector<std::array<double, 3>> state_probs(num_objects);
  for (std::size_t obj = 0; obj < num_objects; ++obj) {
    const TokenLogprobs& tok = exchange.logprobs[value_positions[obj]];
    std::array<double, 3> probs{floor_prob, floor_prob, floor_prob};
    std::array<bool, 3> present{false, false, false};
    for (const TokenCandidate& cand : tok.top) {
      const auto state = state_of_token(cand.token);
      if (!state.has_value()) continue;
      const std::size_t s = static_cast<std::size_t>(*state);
      // Keep the highest candidate when tokenization yields duplicates.
      if (!present[s] || cand.prob > probs[s]) probs[s] = cand.prob;
      present[s] = true;
    }
    if (!(present[0] && present[1] && present[2])) result.floor_applied = true;
    state_probs[obj] = probs;
  }

  // Format tokens are everything that is not a value position.
  std::vector<bool> is_value(exchange.logprobs.size(), false);
  for (std::size_t pos : value_positions) is_value[pos] = true;
  for (std::size_t i = 0; i < exchange.logprobs.size(); ++i)
    if (!is_value[i]) result.format_token_product *= exchange.logprobs[i].prob;

  // The pre-normalization total factorizes over objects.
  result.prenorm_total = 1.0;
  for (const auto& probs : state_probs)
    result.prenorm_total *= probs[0] + probs[1] + probs[2];
  result.total_out_of_tolerance =
      std::abs(result.prenorm_total - 1.0) > 0.05;

  const AcreSpace space(num_objects);
  std::vector<double> logw(space.num_hypotheses());
  for (std::size_t h = 0; h < logw.size(); ++h) {
    const AcreRule rule = space.rule(h);
    double lw = 0.0;
    for (std::size_t obj = 0; obj < num_objects; ++obj)
      lw += std::log(
          state_probs[obj][static_cast<std::size_t>(rule.states[obj])]);
    logw[h] = lw;
  }
  result.belief = BeliefState::from_log_weights(space.id(), std::move(logw));
  return result;
}

std::string format_acre_example(const AcreExample& example,
                                std::span<const std::string> object_names) {
  std::string out = "[";
  bool first = true;
  for (std::size_t obj = 0; obj < object_names.size(); ++obj) {
    if (!(example.input_mask & (1u << obj))) continue;
    if (!first) out += ',';
    out += object_names[obj];
    first = false;
  }
  out += "] -> ";
  out += to_string(example.output);
  return out;
}

namespace {

std::string join_names(std::span<const std::string> names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

std::string rule_format_line(std::span<const std::string> names) {
  std::string out = "Rule: {";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i] + ":<on|off|und>";
  }
  out += "}";
  return out;
}

std::string rule_text(const AcreRule& rule,
                      std::span<const std::string> names) {
  std::string out = "Rule: {";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i] + ":" + to_string(rule.states[i]);
  }
  out += "}";
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw TemplateError(what);
}

}  // namespace

std::vector<ChatMessage> render_prompt(PromptKind kind,
                                       const PromptSlots& slots) {
  std::vector<ChatMessage> out;

  if (kind == PromptKind::kAcronym) {
    require(!slots.acronym_lines.empty(),
            "render_prompt: acronym template needs example lines");
    require(slots.batch_size > 0,
            "render_prompt: acronym template needs a batch size");
    out.push_back(ChatMessage{
        "system",
        "You brainstorm acronym examples. Each example is an acronym and a "
        "word list whose initials spell the acronym, written as:\n"
        "Acronym: <ACRONYM>; List: [\"word1\", \"word2\", ...]"});
    std::string user = "Here are some examples:\n";
    for (const std::string& line : slots.acronym_lines) user += line + "\n";
    user += "\nGenerate " + std::to_string(slots.batch_size) +
            " new examples in the same format, one per line.";
    out.push_back(ChatMessage{"user", std::move(user)});
    return out;
  }

  require(!slots.object_names.empty(),
          "render_prompt: reasoning templates need object names");
  if (kind != PromptKind::kGenerateExamples)
    require(!slots.examples.empty(),
            "render_prompt: reasoning templates need examples");
  const bool has_bias = slots.bias_position != BiasPosition::kNone;
  require(!has_bias || !slots.bias_sentence.empty(),
          "render_prompt: bias position set but the sentence slot is empty");

  std::string system =
      "You are playing a causal reasoning game. There are " +
      std::to_string(slots.object_names.size()) + " objects: " +
      join_names(slots.object_names) +
      ". Placing a non-empty subset of the objects on a detector sets a "
      "light to on, off, or und (undetermined). Each object's role is "
      "fixed by a hidden rule assigning one of on/off/und to every object.";
  out.push_back(ChatMessage{"system", std::move(system)});

  std::string user;
  if (slots.bias_position == BiasPosition::kBeforeExamples)
    user += slots.bias_sentence + "\n\n";
  if (kind == PromptKind::kGenerateExamples) {
    require(slots.rule.has_value(),
            "render_prompt: generate-examples template needs a rule");
    require(slots.rule->states.size() == slots.object_names.size(),
            "render_prompt: rule size does not match the object names");
    require(slots.batch_size > 0,
            "render_prompt: generate-examples template needs a batch size");
    user += "The rule is:\n" + rule_text(*slots.rule, slots.object_names) +
            "\n\nGenerate " + std::to_string(slots.batch_size) +
            " new examples consistent with the rule, one per line, in the "
            "format:\n[" +
            slots.object_names[0] + "] -> <on|off|und>";
    if (slots.bias_position == BiasPosition::kAfterExamples)
      user += "\n\n" + slots.bias_sentence;
    out.push_back(ChatMessage{"user", std::move(user)});
    return out;
  }

  user += "Here are some examples:\n";
  for (const AcreExample& e : slots.examples)
    user += format_acre_example(e, slots.object_names) + "\n";
  if (slots.bias_position == BiasPosition::kAfterExamples)
    user += "\n" + slots.bias_sentence + "\n";
  user += "\nInfer the rule. Reply with exactly one line in this format:\n" +
          rule_format_line(slots.object_names);
  out.push_back(ChatMessage{"user", std::move(user)});

  if (kind == PromptKind::kSelfRefine) {
    out.push_back(ChatMessage{
        "user",
        "Before answering, check your rule against every example above. If "
        "any example is not explained, revise the rule. Reply with the "
        "final rule in the same format."});
  } else if (kind == PromptKind::kHypoSearch) {
    require(!slots.feedback.empty(),
            "render_prompt: hypothesis-search template needs interpreter "
            "feedback");
    out.push_back(ChatMessage{
        "user", "An external interpreter evaluated your previous rule:\n" +
                    slots.feedback +
                    "\nPropose a rule consistent with all examples. Reply "
                    "with the rule in the same format."});
  }
  return out;
}

AcreRule parse_rule_response(const std::string& text,
                             std::span<const std::string> object_names) {
  const std::size_t brace_open = text.find('{');
  const std::size_t brace_close = text.find('}', brace_open);
  if (brace_open == std::string::npos || brace_close == std::string::npos)
    throw FormatError("parse_rule_response: no {...} rule body found", text);

  AcreRule rule;
  rule.states.assign(object_names.size(), LightState::kOff);
  std::vector<bool> seen(object_names.size(), false);

  std::string body = text.substr(brace_open + 1, brace_close - brace_open - 1);
  std::istringstream stream(body);
  std::string entry;
  while (std::getline(stream, entry, ',')) {
    const std::size_t colon = entry.find(':');
    if (colon == std::string::npos)
      throw FormatError("parse_rule_response: entry without ':' in rule",
                        text);
    const std::string name = trim(entry.substr(0, colon));
    const std::string value = to_lower(trim(entry.substr(colon + 1)));
    std::size_t obj = object_names.size();
    for (std::size_t i = 0; i < object_names.size(); ++i)
      if (object_names[i] == name) obj = i;
    if (obj == object_names.size())
      throw FormatError("parse_rule_response: unknown object '" + name + "'",
                        text);
    if (seen[obj])
      throw FormatError("parse_rule_response: object '" + name +
                            "' appears twice",
                        text);
    const auto state = state_of_token(value);
    if (!state.has_value())
      throw FormatError("parse_rule_response: bad state '" + value + "'",
                        text);
    rule.states[obj] = *state;
    seen[obj] = true;
  }
  for (std::size_t i = 0; i < object_names.size(); ++i)
    if (!seen[i])
      throw FormatError("parse_rule_response: object '" + object_names[i] +
                            "' missing from rule",
                        text);
  return rule;
}

std::vector<AcreExample> parse_examples_response(
    const std::string& text, std::span<const std::string> object_names) {
  std::vector<AcreExample> out;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t open = trimmed.find('[');
    const std::size_t close = trimmed.find(']', open);
    const std::size_t arrow = trimmed.find("->", close);
    if (open == std::string::npos || close == std::string::npos ||
        arrow == std::string::npos)
      throw FormatError("parse_examples_response: malformed line '" + line +
                            "'",
                        text);
    AcreExample e;
    std::istringstream items(trimmed.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string name = trim(item);
      if (name.empty()) continue;
      std::size_t obj = object_names.size();
      for (std::size_t i = 0; i < object_names.size(); ++i)
        if (object_names[i] == name) obj = i;
      if (obj == object_names.size())
        throw FormatError("parse_examples_response: unknown object '" + name +
                              "'",
                          text);
      e.input_mask |= 1u << obj;
    }
    if (e.input_mask == 0)
      throw FormatError("parse_examples_response: empty input list", text);
    const auto state = state_of_token(trimmed.substr(arrow + 2));
    if (!state.has_value())
      throw FormatError("parse_examples_response: bad output in '" + line +
                            "'",
                        text);
    e.output = *state;
    out.push_back(e);
  }
  return out;
}

AgentHandle AgentHandle::mock(const AcreSpace& space, BeliefState prior) {
  AgentHandle handle;
  handle.kind = Kind::kMockBayesian;
  handle.space = &space;
  handle.prior = std::move(prior);
  return handle;
}

AgentHandle AgentHandle::chat(EndpointConfig endpoint, DecodingParams decoding,
                              std::vector<std::string> object_names) {
  AgentHandle handle;
  handle.kind = Kind::kChatLlm;
  handle.endpoint = std::move(endpoint);
  handle.decoding = decoding;
  handle.object_names = std::move(object_names);
  return handle;
}

namespace {

std::pair<AcreRule, std::optional<BeliefState>> chat_propose(
    const AgentHandle& handle, std::span<const AcreExample> examples) {
  PromptSlots slots;
  slots.object_names = handle.object_names;
  slots.examples.assign(examples.begin(), examples.end());
  const std::vector<ChatMessage> messages =
      render_prompt(PromptKind::kImitationOnly, slots);

  std::string transcript;
  for (int attempt = 0; attempt <= handle.parse_retries; ++attempt) {
    const ChatExchange exchange = chat_call(
        handle.endpoint, messages, handle.decoding, handle.limiter.get());
    transcript += exchange.response_text + "\n";
    try {
      const AcreRule rule =
          parse_rule_response(exchange.response_text, handle.object_names);
      std::optional<BeliefState> posterior;
      if (exchange.logprobs_present) {
        posterior = extract_rule_posterior(exchange,
                                           handle.object_names.size())
                        .belief;
      }
      return {rule, posterior};
    } catch (const FormatError&) {
      continue;
    }
  }
  throw FormatError("agent_propose_rule: unparseable response after " +
                        std::to_string(handle.parse_retries + 1) + " attempts",
                    transcript);
}

}  // namespace

std::pair<AcreRule, std::optional<BeliefState>> agent_propose_rule(
    const AgentHandle& handle, std::span<const AcreExample> examples) {
  if (examples.empty())
    throw DomainError("agent_propose_rule: examples must be non-empty");
  if (handle.kind == AgentHandle::Kind::kMockBayesian) {
    if (handle.space == nullptr)
      throw MisuseError("agent_propose_rule: mock handle has no space");
    const BeliefState posterior =
        acre_posterior(*handle.space, handle.prior, examples);
    const std::size_t best = map_select(posterior);
    return {handle.space->rule(best), posterior};
  }
  return chat_propose(handle, examples);
}

ChatAcreAgent::ChatAcreAgent(AgentHandle handle, const AcreSpace& space)
    : handle_(std::move(handle)), space_(space) {
  if (handle_.kind != AgentHandle::Kind::kChatLlm)
    throw MisuseError("ChatAcreAgent: handle is not a chat handle");
  if (handle_.object_names.size() != space.num_objects())
    throw MisuseError("ChatAcreAgent: object names do not match the space");
}

void ChatAcreAgent::reset() {
  observed_.clear();
  belief_.reset();
}

void ChatAcreAgent::observe(std::span<const Example> data) {
  for (const Example& e : data) observed_.push_back(from_example(e));
}

const BeliefState& ChatAcreAgent::belief() const {
  if (!belief_.has_value())
    throw MisuseError("ChatAcreAgent: no belief available yet");
  return *belief_;
}

std::size_t ChatAcreAgent::select(const std::vector<bool>* admissible) {
  auto [rule, posterior] = agent_propose_rule(handle_, observed_);
  if (posterior.has_value()) belief_ = *posterior;

  if (admissible != nullptr) {
    // Re-propose with interpreter feedback while the mask rejects the
    // proposal; accept the final answer either way.
    for (int attempt = 0;
         attempt < handle_.parse_retries && !(*admissible)[rule.index()];
         ++attempt) {
      std::string failing;
      for (const AcreExample& e : observed_) {
        if (evaluate_rule(rule, e.input_mask) != e.output)
          failing += format_acre_example(e, handle_.object_names) +
                     " is not explained by your rule.\n";
      }
      if (failing.empty()) failing = "The rule was rejected.\n";
      PromptSlots slots;
      slots.object_names = handle_.object_names;
      slots.examples = observed_;
      slots.feedback = failing;
      const std::vector<ChatMessage> messages =
          render_prompt(PromptKind::kHypoSearch, slots);
      const ChatExchange exchange =
          chat_call(handle_.endpoint, messages, handle_.decoding,
                    handle_.limiter.get());
      try {
        rule = parse_rule_response(exchange.response_text,
                                   handle_.object_names);
        if (exchange.logprobs_present)
          belief_ = extract_rule_posterior(exchange,
                                           handle_.object_names.size())
                        .belief;
      } catch (const FormatError&) {
        break;
      }
    }
  }
  return rule.index();
}

std::vector<Example> ChatAcreAgent::generate(std::size_t h, std::size_t count,
                                             Rng& rng) {
  (void)rng;  // sampling happens on the model side
  PromptSlots slots;
  slots.object_names = handle_.object_names;
  slots.rule = space_.rule(h);
  slots.batch_size = count;
  const std::vector<ChatMessage> messages =
      render_prompt(PromptKind::kGenerateExamples, slots);

  std::string transcript;
  for (int attempt = 0; attempt <= handle_.parse_retries; ++attempt) {
    const ChatExchange exchange = chat_call(
        handle_.endpoint, messages, handle_.decoding, handle_.limiter.get());
    transcript += exchange.response_text + "\n";
    try {
      const std::vector<AcreExample> parsed = parse_examples_response(
          exchange.response_text, handle_.object_names);
      if (parsed.empty()) continue;
      std::vector<Example> out;
      out.reserve(parsed.size());
      for (const AcreExample& e : parsed) out.push_back(to_example(e));
      return out;
    } catch (const FormatError&) {
      continue;
    }
  }
  throw FormatError("ChatAcreAgent: unparseable example batch", transcript);
}

std::vector<Example> ChatAcreAgent::generate_marginal(std::size_t count,
                                                      Rng& rng) {
  (void)count;
  (void)rng;
  throw MisuseError(
      "ChatAcreAgent: posterior-predictive transmission is not available "
      "for chat agents; use map_then_sample");
}

}  // namespace ilsim
