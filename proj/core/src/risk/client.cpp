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

#include "sentinel/risk/client.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <openssl/sha.h>

#include "common/http_util.hpp"
#include "sentinel/error.hpp"

namespace sentinel::risk {

using nlohmann::json;

void GenerationParams::Validate() const {
  if (!(temperature >= 0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  if (!(top_p > 0 && top_p <= 1)) throw Error(ErrorCode::kInvalidArgument, "top_p must be in (0, 1]");
  if (max_tokens <= 0) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be positive");
}

std::string RequestHash(const ChatRequest& request) {
  std::string material;
  material.reserve(request.system.size() + request.user.size() + 64);
  material += request.params.model_name;
  material += '\x1f';
  material += request.system;
  material += '\x1f';
  material += request.user;
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(material.data()), material.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    hex += kHex[b >> 4];
    hex += kHex[b & 0xF];
  }
  return hex;
}

namespace {

int CountWords(std::string_view text) {
  int n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::string Base64(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

bool IsTransient(ErrorCode code) {
  return code == ErrorCode::kRateLimited || code == ErrorCode::kProviderError ||
         code == ErrorCode::kTimeout;
}

std::string Getenv(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

// Non-retryable provider failure, e.g. a 400 for a malformed request.
struct PermanentError : Error {
  using Error::Error;
};

}  // namespace

ProviderConfig ProviderConfig::FromEnvironment(const char* model_var) {
  ProviderConfig cfg;
  cfg.endpoint = Getenv("LLM_ENDPOINT");
  cfg.api_key = Getenv("LLM_API_KEY");
  cfg.model = Getenv(model_var);
  if (cfg.endpoint.empty()) throw Error(ErrorCode::kInvalidArgument, "LLM_ENDPOINT is not set");
  if (cfg.model.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(model_var) + " is not set");
  }
  return cfg;
}

HttpChatClient::HttpChatClient(ProviderConfig config, RetryPolicy retry)
    : config_(std::move(config)), retry_(std::move(retry)) {
  (void)internal::SplitUrl(config_.endpoint);
  if (!retry_.sleep) {
    retry_.sleep = [](double ms) {
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    };
  }
}

HttpChatClient::~HttpChatClient() = default;

ChatResponse HttpChatClient::Attempt(const ChatRequest& request) {
  const auto url = internal::SplitUrl(config_.endpoint);
  httplib::Client client(url.origin);
  internal::SetTimeouts(client, config_.timeout_ms);

  json user_content = json::array();
  user_content.push_back({{"type", "text"}, {"text", request.user}});
  if (request.image_png) {
    user_content.push_back(
        {{"type", "image_url"},
         {"image_url", {{"url", "data:image/png;base64," + Base64(*request.image_png)}}}});
  }
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", std::move(user_content)}});

  const std::string model =
      request.params.model_name.empty() ? config_.model : request.params.model_name;
  const json body = {{"model", model},
                     {"messages", std::move(messages)},
                     {"temperature", request.params.temperature},
                     {"top_p", request.params.top_p},
                     {"max_tokens", request.params.max_tokens}};

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  const double latency = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Error(ErrorCode::kTimeout, "provider did not answer: " + httplib::to_string(err));
    }
    throw Error(ErrorCode::kProviderError, "provider request failed: " + httplib::to_string(err));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw Error(ErrorCode::kAuthFailure, "provider rejected credentials (HTTP " +
                                             std::to_string(status) + ")");
  }
  if (status == 429) throw Error(ErrorCode::kRateLimited, "provider rate limit (HTTP 429)");
  if (status == 408) throw Error(ErrorCode::kTimeout, "provider timed out (HTTP 408)");
  if (status >= 500) {
    throw Error(ErrorCode::kProviderError, "provider error HTTP " + std::to_string(status));
  }
  if (status != 200) {
    throw PermanentError(ErrorCode::kProviderError,
                         "provider refused request (HTTP " + std::to_string(status) + ")");
  }

  ChatResponse response;
  response.latency_ms = latency;
  try {
    const json reply = json::parse(res->body);
    const auto& message = reply.at("choices").at(0).at("message");
    const auto& content = message.at("content");
    if (content.is_string()) {
      response.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.value("type", "") == "text") response.text += part.value("text", "");
      }
    }
    if (auto usage = reply.find("usage"); usage != reply.end()) {
      response.prompt_tokens = usage->value("prompt_tokens", 0);
      response.completion_tokens = usage->value("completion_tokens", 0);
    }
    response.provider_id = reply.value("model", model);
  } catch (const json::exception& e) {
    throw PermanentError(ErrorCode::kProviderError,
                         std::string("unexpected provider reply: ") + e.what());
  }
  if (response.text.empty()) {
    throw PermanentError(ErrorCode::kEmptyResponse, "provider returned no text");
  }
  return response;
}

ChatExchange HttpChatClient::Complete(const ChatRequest& request) {
  request.params.Validate();
  std::mt19937_64 jitter_rng(std::random_device{}());
  std::uniform_real_distribution<double> jitter(0.0, retry_.jitter);
  for (int attempt = 0;; ++attempt) {
    try {
      ChatExchange ex{request, Attempt(request)};
      ex.response.retry_count = attempt;
      return ex;
    } catch (const PermanentError& e) {
      throw static_cast<const Error&>(e);
    } catch (const Error& e) {
      if (!IsTransient(e.code()) || attempt >= retry_.max_retries) throw;
      const double delay =
          std::min(retry_.max_delay_ms, retry_.base_delay_ms * std::pow(2.0, attempt));
      retry_.sleep(delay * (1.0 + jitter(jitter_rng)));
    }
  }
}

ScriptedChatClient::ScriptedChatClient(std::vector<Entry> entries, std::string provider_id)
    : provider_id_(std::move(provider_id)) {
  for (auto& e : entries) {
    if (e.request_hash) by_hash_[*e.request_hash] = e.response;
    if (e.index) by_index_[*e.index] = e.response;
  }
}

namespace {

std::vector<ScriptedChatClient::Entry> ReadTranscript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open transcript " + path.string());
  std::vector<ScriptedChatClient::Entry> entries;
  try {
    const json j = json::parse(in);
    const json& list = j.is_object() ? j.at("entries") : j;
    for (const auto& item : list) {
      ScriptedChatClient::Entry e;
      if (item.contains("request_hash")) e.request_hash = item.at("request_hash").get<std::string>();
      if (item.contains("index")) e.index = item.at("index").get<std::size_t>();
      e.response = item.at("response").get<std::string>();
      entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return entries;
}

}  // namespace

ScriptedChatClient::ScriptedChatClient(const std::filesystem::path& transcript,
                                       std::string provider_id)
    : ScriptedChatClient(ReadTranscript(transcript), std::move(provider_id)) {}

ChatExchange ScriptedChatClient::Complete(const ChatRequest& request) {
  const std::size_t call = calls_.fetch_add(1);
  const std::string* text = nullptr;
  if (auto it = by_hash_.find(RequestHash(request)); it != by_hash_.end()) {
    text = &it->second;
  } else if (auto jt = by_index_.find(call); jt != by_index_.end()) {
    text = &jt->second;
  }
  if (text == nullptr) {
    throw Error(ErrorCode::kProviderError,
                "transcript has no reply for request " + RequestHash(request));
  }
  ChatExchange ex;
  ex.request = request;
  ex.response.text = *text;
  ex.response.prompt_tokens = CountWords(request.system) + CountWords(request.user);
  ex.response.completion_tokens = CountWords(*text);
  ex.response.provider_id = provider_id_;
  return ex;
}

BoundedChatClient::BoundedChatClient(std::shared_ptr<ChatClient> inner, std::size_t max_in_flight)
    : inner_(std::move(inner)), limit_(max_in_flight) {
  if (limit_ == 0) throw Error(ErrorCode::kInvalidArgument, "in-flight limit must be positive");
}

ChatExchange BoundedChatClient::Complete(const ChatRequest& request) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return in_flight_ < limit_; });
    ++in_flight_;
    high_water_ = std::max(high_water_, in_flight_);
  }
  struct Release {
    BoundedChatClient* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};
  return inner_->Complete(request);
}

std::size_t BoundedChatClient::high_water_mark() const {
  std::lock_guard lock(mu_);
  return high_water_;
}

}  // namespace sentinel::risk
