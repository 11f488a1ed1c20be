// Copyright 2026 The tdg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Network drafting client. Kept apart from authoring.hpp so that only
// callers that need it pull in cpp-httplib.

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "tdg/authoring.hpp"

namespace tdg {

/// POSTs {"prompt": ...} to the endpoint with a bearer credential and
/// returns the response body verbatim.
class HttpDraftClient : public TemplateDraftClient {
 public:
  HttpDraftClient(std::string endpoint, std::string key, std::chrono::seconds timeout = std::chrono::seconds(60))
      : endpoint_(std::move(endpoint)), key_(std::move(key)), timeout_(timeout) {}

  /// Reads TDG_LLM_ENDPOINT and TDG_LLM_KEY.
  static HttpDraftClient from_environment() {
    const char* endpoint = std::getenv("TDG_LLM_ENDPOINT");
    const char* key = std::getenv("TDG_LLM_KEY");
    if (!endpoint || !*endpoint) {
      throw AuthoringError(AuthoringError::Kind::endpoint_unavailable, "TDG_LLM_ENDPOINT is not set");
    }
    return HttpDraftClient(endpoint, key ? key : "");
  }

  std::string draft(const DraftRequest& req) override {
    const auto [base, path] = split_url(endpoint_);
    std::unique_ptr<httplib::Client> cli;
    try {
      cli = std::make_unique<httplib::Client>(base);
    } catch (const std::exception& e) {
      throw AuthoringError(AuthoringError::Kind::endpoint_unavailable, "bad endpoint '" + endpoint_ + "': " + e.what());
    }
    if (!cli->is_valid()) {
      throw AuthoringError(AuthoringError::Kind::endpoint_unavailable, "unsupported endpoint '" + endpoint_ + "'");
    }
    cli->set_connection_timeout(timeout_);
    cli->set_read_timeout(timeout_);
    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);
    const std::string body = nlohmann::json{{"prompt", drafting_prompt(req)}}.dump();
    auto res = cli->Post(path, headers, body, "application/json");
    if (!res) {
      throw AuthoringError(AuthoringError::Kind::endpoint_unavailable,
                           "request to '" + endpoint_ + "' failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      throw AuthoringError(AuthoringError::Kind::endpoint_unavailable,
                           "endpoint returned HTTP " + std::to_string(res->status));
    }
    if (res->body.empty()) {
      throw AuthoringError(AuthoringError::Kind::empty_response, "endpoint returned an empty body");
    }
    return res->body;
  }

 private:
  // "http://host:port/path" -> {"http://host:port", "/path"}
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto from = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', from);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
  }

  std::string endpoint_;
  std::string key_;
  std::chrono::seconds timeout_;
};

}  // namespace tdg
