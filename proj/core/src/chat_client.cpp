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

#include "refvos/chat_client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "refvos/error.hpp"

namespace refvos {

using nlohmann::json;

void ReasonerConfig::validate() const {
  if (!(temperature >= 0.0)) throw ValidationError("temperature", "must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ValidationError("top_p", "must be in (0, 1]");
  if (top_k < 0) throw ValidationError("top_k", "must be >= 0");
  if (retry_budget < 0) throw ValidationError("retry_budget", "must be >= 0");
  if (timeout_seconds < 1) throw ValidationError("timeout_seconds", "must be >= 1");
}

std::string build_chat_request(const ReasonerConfig& config,
                               const std::string& prompt) {
  json body = {
      {"model", config.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config.temperature},
      {"top_p", config.top_p},
      {"stream", false},
  };
  if (config.send_top_k) body["top_k"] = config.top_k;
  return body.dump();
}

std::string parse_chat_response(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw BackendError(std::string("endpoint returned non-JSON body: ") + e.what());
  }
  if (j.contains("error")) throw BackendError("endpoint error: " + j["error"].dump());
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw BackendError("endpoint response missing choices[0].message.content");
  }
}

HttpChatEndpoint::HttpChatEndpoint(ReasonerConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

std::string HttpChatEndpoint::complete(const std::string& prompt) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint_url, m, url_re)) {
    throw BackendError("malformed endpoint url: " + config_.endpoint_url);
  }
  const std::string origin = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/v1/chat/completions";

  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path, headers, build_chat_request(config_, prompt),
                         "application/json");
  if (!res) {
    throw BackendError("endpoint request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("endpoint returned HTTP " + std::to_string(res->status));
  }
  return parse_chat_response(res->body);
}

}  // namespace refvos
