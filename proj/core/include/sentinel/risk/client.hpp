// Copyright 2026 The Sentinel Authors
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

#pragma once

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

namespace sentinel::risk {

struct GenerationParams {
  double temperature = 0.2;
  int max_tokens = 1024;
  double top_p = 0.95;
  std::string model_name;

  // Throws kInvalidArgument.
  void Validate() const;
  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

struct ChatRequest {
  std::string system;
  std::string user;
  std::optional<std::vector<std::uint8_t>> image_png;
  GenerationParams params;
};

struct ChatResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency_ms = 0;
  std::string provider_id;
  int retry_count = 0;
};

struct ChatExchange {
  ChatRequest request;
  ChatResponse response;
};

// SHA-256 (hex) over model name, system and user text. Image bytes are
// excluded so transcripts survive encoder changes.
std::string RequestHash(const ChatRequest& request);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Errors: kAuthFailure, kRateLimited, kProviderError, kTimeout,
  // kEmptyResponse.
  virtual ChatExchange Complete(const ChatRequest& request) = 0;
};

struct RetryPolicy {
  int max_retries = 3;
  double base_delay_ms = 500;
  double max_delay_ms = 8000;
  // Each delay is stretched by a uniform factor in [1, 1 + jitter).
  double jitter = 0.25;
  std::function<void(double ms)> sleep;  // defaults to this_thread::sleep_for
};

struct ProviderConfig {
  std::string endpoint;  // full chat-completions URL
  std::string api_key;
  std::string model;
  int timeout_ms = 120000;

  // LLM_ENDPOINT, LLM_API_KEY and `model_var` (LLM_MODEL or JUDGE_MODEL).
  // Throws kInvalidArgument when the endpoint or model is unset.
  static ProviderConfig FromEnvironment(const char* model_var = "LLM_MODEL");
};

// OpenAI-compatible chat completions over HTTP(S), image sent as a data URL.
// Transient failures (429, 5xx, 408, timeouts, dropped connections) are
// retried with exponential backoff; 401/403 fail immediately.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(ProviderConfig config, RetryPolicy retry = {});
  ~HttpChatClient() override;

  ChatExchange Complete(const ChatRequest& request) override;

 private:
  ChatResponse Attempt(const ChatRequest& request);

  ProviderConfig config_;
  RetryPolicy retry_;
};

// Canned replies for deterministic runs. Transcript file: JSON array of
// {"request_hash": hex, "response": text} and/or {"index": n, "response": text};
// hash entries win, otherwise the n-th call (0-based) gets entry n.
// Unmatched requests fail with kProviderError.
class ScriptedChatClient final : public ChatClient {
 public:
  struct Entry {
    std::optional<std::string> request_hash;
    std::optional<std::size_t> index;
    std::string response;
  };

  explicit ScriptedChatClient(const std::filesystem::path& transcript,
                              std::string provider_id = "scripted");
  explicit ScriptedChatClient(std::vector<Entry> entries,
                              std::string provider_id = "scripted");

  ChatExchange Complete(const ChatRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::unordered_map<std::string, std::string> by_hash_;
  std::unordered_map<std::size_t, std::string> by_index_;
  std::string provider_id_;
  std::atomic<std::size_t> calls_{0};
};

// Bounds concurrent Complete calls through `inner` (default 4 in flight).
class BoundedChatClient final : public ChatClient {
 public:
  BoundedChatClient(std::shared_ptr<ChatClient> inner, std::size_t max_in_flight = 4);

  ChatExchange Complete(const ChatRequest& request) override;
  std::size_t high_water_mark() const;

 private:
  std::shared_ptr<ChatClient> inner_;
  std::size_t limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t high_water_ = 0;
};

}  // namespace sentinel::risk
