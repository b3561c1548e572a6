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

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "sentinel/error.hpp"
#include "sentinel/risk/client.hpp"
#include "support/support.hpp"

namespace sentinel::risk {
namespace {

ChatRequest Request(std::string user, std::string model = "m") {
  ChatRequest r;
  r.system = "sys";
  r.user = std::move(user);
  r.params.model_name = std::move(model);
  return r;
}

TEST(RequestHash, CoversModelSystemAndUserButNotImage) {
  const auto base = Request("hello");
  const std::string h = RequestHash(base);
  EXPECT_EQ(h.size(), 64u);
  EXPECT_NE(RequestHash(Request("hello!")), h);
  EXPECT_NE(RequestHash(Request("hello", "other")), h);
  auto sys = base;
  sys.system = "other";
  EXPECT_NE(RequestHash(sys), h);
  auto img = base;
  img.image_png = std::vector<std::uint8_t>{1, 2, 3};
  EXPECT_EQ(RequestHash(img), h);
  // Field boundaries matter: moving text between fields changes the hash.
  ChatRequest shifted;
  shifted.system = "sysh";
  shifted.user = "ello";
  shifted.params.model_name = "m";
  EXPECT_NE(RequestHash(shifted), h);
}

TEST(Scripted, HashEntriesWinOverIndex) {
  const auto req = Request("q");
  ScriptedChatClient client({{RequestHash(req), std::nullopt, "by hash"},
                             {std::nullopt, 0, "first"},
                             {std::nullopt, 2, "third"}},
                            "script");
  EXPECT_EQ(client.Complete(Request("x")).response.text, "first");
  EXPECT_EQ(client.Complete(req).response.text, "by hash");
  // The hash hit still consumed call index 1.
  const auto third = client.Complete(Request("y"));
  EXPECT_EQ(third.response.text, "third");
  EXPECT_EQ(client.calls(), 3u);
  EXPECT_EQ(third.response.provider_id, "script");
  try {
    client.Complete(Request("z"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProviderError);
  }
}

TEST(Scripted, ReadsTranscriptFile) {
  testing::TempDir dir;
  testing::WriteText(dir / "t.json", R"([{"index": 0, "response": "zero"}])");
  ScriptedChatClient client(dir / "t.json");
  EXPECT_EQ(client.Complete(Request("a")).response.text, "zero");
  testing::WriteText(dir / "bad.json", R"([{"index": 0}])");
  EXPECT_THROW(ScriptedChatClient(dir / "bad.json"), Error);
  EXPECT_THROW(ScriptedChatClient(dir / "absent.json"), Error);
}

class SlowClient final : public ChatClient {
 public:
  ChatExchange Complete(const ChatRequest& request) override {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    ++served;
    return {request, {"ok", 0, 0, 5, "slow", 0}};
  }
  std::atomic<int> served{0};
};

TEST(Bounded, NeverExceedsLimit) {
  auto inner = std::make_shared<SlowClient>();
  BoundedChatClient bounded(inner, 3);
  std::vector<std::thread> threads;
  for (int t = 0; t < 12; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 4; ++i) bounded.Complete(Request("q"));
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(inner->served, 48);
  EXPECT_LE(bounded.high_water_mark(), 3u);
  EXPECT_GE(bounded.high_water_mark(), 1u);
  EXPECT_THROW(BoundedChatClient(inner, 0), Error);
}

TEST(ProviderConfig, FromEnvironment) {
  ::setenv("LLM_ENDPOINT", "http://127.0.0.1:1/v1/chat/completions", 1);
  ::setenv("LLM_API_KEY", "k", 1);
  ::setenv("JUDGE_MODEL", "judge-x", 1);
  ::unsetenv("LLM_MODEL");
  const auto cfg = ProviderConfig::FromEnvironment("JUDGE_MODEL");
  EXPECT_EQ(cfg.model, "judge-x");
  EXPECT_EQ(cfg.api_key, "k");
  EXPECT_THROW(ProviderConfig::FromEnvironment(), Error);
  ::unsetenv("LLM_ENDPOINT");
  EXPECT_THROW(ProviderConfig::FromEnvironment("JUDGE_MODEL"), Error);
  ::unsetenv("LLM_API_KEY");
  ::unsetenv("JUDGE_MODEL");
}

TEST(HttpChatClient, RejectsMalformedEndpoint) {
  ProviderConfig cfg;
  cfg.endpoint = "not a url";
  cfg.model = "m";
  EXPECT_THROW(HttpChatClient{cfg}, Error);
}

}  // namespace
}  // namespace sentinel::risk
