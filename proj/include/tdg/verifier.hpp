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

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tdg/numeric.hpp"
#include "tdg/solver_lang.hpp"

namespace tdg {

enum class RejectCategory {
  parse_failure,
  execution_error,
  missing_result,
  non_finite,
  nl_mismatch,
  budget_exceeded,
  answer_mismatch,  // only when an expected answer is supplied
};

inline constexpr RejectCategory kAllRejectCategories[] = {
    RejectCategory::parse_failure, RejectCategory::execution_error, RejectCategory::missing_result,
    RejectCategory::non_finite,    RejectCategory::nl_mismatch,     RejectCategory::budget_exceeded,
    RejectCategory::answer_mismatch,
};

inline std::string_view category_name(RejectCategory c) {
  switch (c) {
    case RejectCategory::parse_failure: return "ParseFailure";
    case RejectCategory::execution_error: return "ExecutionError";
    case RejectCategory::missing_result: return "MissingResult";
    case RejectCategory::non_finite: return "NonFinite";
    case RejectCategory::nl_mismatch: return "NlMismatch";
    case RejectCategory::budget_exceeded: return "BudgetExceeded";
    case RejectCategory::answer_mismatch: return "AnswerMismatch";
  }
  return "?";
}

inline std::optional<RejectCategory> category_from_name(std::string_view name) {
  for (RejectCategory c : kAllRejectCategories) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

struct Verdict {
  bool accepted = false;
  Number result_raw;               // accepted only
  std::int64_t result_rounded = 0; // accepted only
  RejectCategory category = RejectCategory::parse_failure;  // rejected only
  std::string detail;

  static Verdict accept(Number raw, std::int64_t rounded) {
    Verdict v;
    v.accepted = true;
    v.result_raw = raw;
    v.result_rounded = rounded;
    return v;
  }
  static Verdict reject(RejectCategory c, std::string detail) {
    Verdict v;
    v.category = c;
    v.detail = std::move(detail);
    return v;
  }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct VerifyOptions {
  std::uint64_t step_budget = sol::kDefaultStepBudget;
  bool nl_check = true;
  /// Answer the code must reproduce (e.g. a template's own verified result).
  std::optional<std::int64_t> expected;
};

class NoNumberFound : public std::runtime_error {
 public:
  NoNumberFound() : std::runtime_error("no integer found in natural-language solution") {}
};

/// Returns the last integer literal in `text`. Digit runs may use commas as
/// thousands separators ("1,250"); runs with a fractional part ("2.50") are
/// not integers and are skipped. A '-' directly before the digits is a sign
/// unless it follows a letter, digit or closing bracket. Every other
/// character, including math delimiters such as '$', is ignored.
inline std::int64_t extract_final_number(std::string_view text) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  auto alnum = [&](char c) {
    return digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  std::optional<std::int64_t> last;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!digit(text[i]) || (i > 0 && (digit(text[i - 1]) || text[i - 1] == '.'))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::string digits;
    std::size_t j = i;
    std::size_t group = 0;
    while (j < text.size() && digit(text[j])) {
      digits += text[j++];
      ++group;
    }
    // Thousands groups: ",ddd" not followed by another digit.
    while (group <= 3 && j + 3 < text.size() && text[j] == ',' && digit(text[j + 1]) && digit(text[j + 2]) &&
           digit(text[j + 3]) && (j + 4 >= text.size() || !digit(text[j + 4]))) {
      digits.append(text.substr(j + 1, 3));
      j += 4;
    }
    const bool fractional = j + 1 < text.size() && text[j] == '.' && digit(text[j + 1]);
    if (fractional) {
      j += 1;
      while (j < text.size() && digit(text[j])) ++j;
      i = j;
      continue;
    }
    bool negative = false;
    if (start > 0 && text[start - 1] == '-') {
      const bool glued = start >= 2 && (alnum(text[start - 2]) || text[start - 2] == ')' || text[start - 2] == ']');
      negative = !glued;
    }
    std::int64_t value = 0;
    auto r = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (r.ec == std::errc{}) last = negative ? -value : value;
    i = j;
  }
  if (!last) throw NoNumberFound();
  return *last;
}

/// Total: every input maps to exactly one Verdict, nothing is thrown.
inline Verdict verify(std::string_view code_source, std::optional<std::string_view> nl_solution,
                      const VerifyOptions& opts = {}) {
  sol::Program prog;
  try {
    prog = sol::parse_program(code_source);
  } catch (const sol::SyntaxError& e) {
    return Verdict::reject(RejectCategory::parse_failure, e.what());
  }
  sol::ExecOutcome out;
  try {
    out = sol::execute(prog, opts.step_budget);
  } catch (const sol::ExecError& e) {
    switch (e.kind()) {
      case sol::ExecError::Kind::missing_result: return Verdict::reject(RejectCategory::missing_result, e.what());
      case sol::ExecError::Kind::non_finite_result: return Verdict::reject(RejectCategory::non_finite, e.what());
      case sol::ExecError::Kind::budget_exceeded: return Verdict::reject(RejectCategory::budget_exceeded, e.what());
      default: return Verdict::reject(RejectCategory::execution_error, e.what());
    }
  } catch (const std::exception& e) {
    return Verdict::reject(RejectCategory::execution_error, e.what());
  }
  if (opts.expected && *opts.expected != out.result_rounded) {
    return Verdict::reject(RejectCategory::answer_mismatch, "expected " + std::to_string(*opts.expected) + " got " +
                                                                std::to_string(out.result_rounded));
  }
  if (opts.nl_check && nl_solution) {
    std::int64_t claimed = 0;
    try {
      claimed = extract_final_number(*nl_solution);
    } catch (const NoNumberFound&) {
      return Verdict::reject(RejectCategory::nl_mismatch,
                             "expected " + std::to_string(out.result_rounded) + " got no number");
    }
    if (claimed != out.result_rounded) {
      return Verdict::reject(RejectCategory::nl_mismatch, "expected " + std::to_string(out.result_rounded) +
                                                              " got " + std::to_string(claimed));
    }
  }
  return Verdict::accept(out.result_raw, out.result_rounded);
}

struct RewardConfig {
  static constexpr int kAcceptReward = 1;
  int reject_reward = 0;  // 0 or -1

  static RewardConfig with_reject(int reject) {
    if (reject != 0 && reject != -1) throw std::invalid_argument("reject_reward must be 0 or -1");
    return RewardConfig{reject};
  }
};

inline int reward(const Verdict& v, const RewardConfig& cfg = {}) {
  return v.accepted ? RewardConfig::kAcceptReward : cfg.reject_reward;
}

}  // namespace tdg
