// Copyright 2026 The refvos Authors.
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

#include <functional>
#include <memory>
#include <string>

namespace refvos {

// Connection and decoding settings for the language-model endpoint.
struct ReasonerConfig {
  std::string endpoint_url = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model = "llama-3-8b-instruct";
  double temperature = 0.7;
  double top_p = 0.95;
  int top_k = 0;
  // top_k is not part of every chat-completion dialect; only sent when set.
  bool send_top_k = true;
  int retry_budget = 3;
  bool offline = true;
  // Name of the environment variable holding the bearer credential.
  std::string api_key_env = "REFVOS_API_KEY";
  int timeout_seconds = 60;

  // Throws InputError when temperature < 0 or retry_budget < 0.
  void validate() const;
};

// One-shot completion of a single user prompt. Implementations throw
// BackendError on transport or protocol failure.
class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Chat-completion request body for `prompt` under `config`.
std::string build_chat_request(const ReasonerConfig& config,
                               const std::string& prompt);
// Extracts choices[0].message.content. Throws BackendError.
std::string parse_chat_response(const std::string& body);

class HttpChatEndpoint final : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(ReasonerConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  ReasonerConfig config_;
};

// Adapts a callable; handy for tests and scripted replays.
class FunctionChatEndpoint final : public ChatEndpoint {
 public:
  explicit FunctionChatEndpoint(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

}  // namespace refvos
