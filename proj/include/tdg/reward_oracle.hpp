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

// Line-delimited JSON reward oracle for external training loops.
//
// Request (one per line):
//   {"code": "...", "nl": "..." (optional), "reject_reward": 0 | -1 (optional),
//    "expected": <int> (optional), "id": <any> (optional, echoed back)}
// Response (one per line, same order):
//   {"id": ..., "verdict": "accepted" | "rejected", "category": "...",
//    "detail": "...", "result": <int>, "result_raw": <number>, "reward": 1 | 0 | -1}
// `category` and `detail` appear only for rejections, `result` and
// `result_raw` only for acceptances. A malformed request yields
// {"id": ..., "error": "..."} and the stream continues.

#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tdg/verifier.hpp"

namespace tdg {

struct OracleOptions {
  int default_reject_reward = 0;
  bool nl_check = true;
  std::uint64_t step_budget = sol::kDefaultStepBudget;
};

inline std::string handle_reward_request(std::string_view line, const OracleOptions& opts = {}) {
  nlohmann::ordered_json response;
  nlohmann::json req;
  auto error = [&](const std::string& msg) {
    response["error"] = msg;
    return response.dump();
  };
  try {
    req = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    return error(std::string("invalid JSON: ") + e.what());
  }
  if (!req.is_object()) return error("request must be a JSON object");
  if (req.contains("id")) response["id"] = req["id"];
  for (const auto& [key, value] : req.items()) {
    if (key != "code" && key != "nl" && key != "reject_reward" && key != "expected" && key != "id") {
      return error("unknown request field '" + key + "'");
    }
  }
  if (!req.contains("code") || !req["code"].is_string()) return error("'code' must be a string");
  std::optional<std::string> nl;
  if (req.contains("nl") && !req["nl"].is_null()) {
    if (!req["nl"].is_string()) return error("'nl' must be a string or null");
    nl = req["nl"].get<std::string>();
  }
  int reject = opts.default_reject_reward;
  if (req.contains("reject_reward")) {
    const auto& r = req["reject_reward"];
    if (!r.is_number_integer() || (r.get<std::int64_t>() != 0 && r.get<std::int64_t>() != -1)) {
      return error("'reject_reward' must be 0 or -1");
    }
    reject = static_cast<int>(r.get<std::int64_t>());
  }
  VerifyOptions vo;
  vo.step_budget = opts.step_budget;
  vo.nl_check = opts.nl_check;
  if (req.contains("expected") && !req["expected"].is_null()) {
    if (!req["expected"].is_number_integer()) return error("'expected' must be an integer");
    vo.expected = req["expected"].get<std::int64_t>();
  }

  const std::string code = req["code"].get<std::string>();
  const Verdict v = verify(code, nl ? std::optional<std::string_view>(*nl) : std::nullopt, vo);
  response["verdict"] = v.accepted ? "accepted" : "rejected";
  if (v.accepted) {
    response["result"] = v.result_rounded;
    if (v.result_raw.is_int()) {
      response["result_raw"] = v.result_raw.as_int();
    } else {
      response["result_raw"] = v.result_raw.as_double();
    }
  } else {
    response["category"] = std::string(category_name(v.category));
    response["detail"] = v.detail;
  }
  response["reward"] = reward(v, RewardConfig::with_reject(reject));
  return response.dump();
}

/// Answers each non-blank input line with one output line, flushing after
/// every response. Returns the number of requests answered.
inline std::size_t serve_reward(std::istream& in, std::ostream& out, const OracleOptions& opts = {}) {
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle_reward_request(line, opts) << '\n';
    out.flush();
    ++n;
  }
  return n;
}

}  // namespace tdg
