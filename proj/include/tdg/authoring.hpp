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

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tdg/lexicon.hpp"
#include "tdg/pipeline.hpp"
#include "tdg/sampler.hpp"
#include "tdg/template_file.hpp"
#include "tdg/verifier.hpp"

namespace tdg {

struct DraftRequest {
  std::string topic;
  std::string difficulty;
  std::vector<std::string> required_slots;  // lexicon categories
};

class AuthoringError : public std::runtime_error {
 public:
  enum class Kind { endpoint_unavailable, empty_response };

  AuthoringError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Narrow interface to an external text-generation endpoint.
class TemplateDraftClient {
 public:
  virtual ~TemplateDraftClient() = default;
  /// Raw candidate template source. Throws AuthoringError.
  virtual std::string draft(const DraftRequest& req) = 0;
};

/// Prompt sent to a network drafting client. Requests all three texts.
inline std::string drafting_prompt(const DraftRequest& req) {
  std::string p =
      "Write one meta-template for grade-school math word problems as a single JSON object.\n"
      "Keys: id, params, lexicon_slots, constraint, problem_template, nl_solution_template, "
      "code_solution_template.\n"
      "- params: list of {\"name\", \"int_range\": [lo, hi]} or {\"name\", \"choice\": [...]} or "
      "{\"name\", \"float_choice\": [...]}.\n"
      "- lexicon_slots: list of {\"name\", \"category\"}.\n"
      "- constraint: boolean expression over params using < <= == != >= > and, or, not; or null.\n"
      "- Texts may be strings or arrays of lines and use {expr} placeholders with + - * / and "
      "parentheses, optional :.Nf formatting, name.split('sep')[i] and name.sanitize(). Write {{ and }} "
      "for literal braces.\n"
      "- code_solution_template: straight-line assignments only (name = arithmetic expression), "
      "# comments allowed, and it must assign the final answer to `result`.\n"
      "- nl_solution_template: a step-by-step explanation whose last integer is the final answer.\n"
      "Topic: " + req.topic + "\n";
  if (!req.difficulty.empty()) p += "Difficulty: " + req.difficulty + "\n";
  if (!req.required_slots.empty()) {
    p += "Use these lexicon categories:";
    for (const auto& s : req.required_slots) p += " " + s;
    p += "\n";
  }
  p += "Reply with the JSON object only.\n";
  return p;
}

namespace fixtures {

inline constexpr std::string_view kTwoMonthSales = R"tdg({
  "id": "two_month_sales",
  "params": [
    {
      "name": "half_amount",
      "int_range": [
        5,
        250
      ]
    },
    {
      "name": "subsequent_ratio",
      "float_choice": [
        0.5,
        1.5,
        2.0,
        2.5
      ]
    },
    {
      "name": "year",
      "int_range": [
        2010,
        2024
      ]
    }
  ],
  "lexicon_slots": [
    {
      "name": "first",
      "category": "first_name"
    },
    {
      "name": "last",
      "category": "last_name"
    },
    {
      "name": "item",
      "category": "item"
    },
    {
      "name": "month",
      "category": "month_pair"
    },
    {
      "name": "place",
      "category": "place"
    },
    {
      "name": "county",
      "category": "county"
    }
  ],
  "constraint": null,
  "problem_template": "{first} {last} sold {half_amount * 2} {item} in {month.split(' and ')[0]}, {year} at {place} in {county}. In {month.split(' and ')[1]}, they sold {subsequent_ratio * 100:.0f}% of the amount sold in the previous month. How many {item} did {first} {last} sell in total during {month}?",
  "nl_solution_template": "In {month.split(' and ')[0]}, {first} {last} sold {half_amount * 2} {item}. In {month.split(' and ')[1]}, they sold {subsequent_ratio * 100:.0f}% of that amount, which is ${half_amount * 2} \\times {subsequent_ratio} = {half_amount * 2 * subsequent_ratio:.0f}$ {item}. In total, {first} {last} sold ${half_amount * 2} + {half_amount * 2 * subsequent_ratio:.0f} = {half_amount * 2 + half_amount * 2 * subsequent_ratio:.0f}$ {item} during {month}.",
  "code_solution_template": [
    "# Number of {item} sold by {first} {last} in {month.split(' and ')[0]}, {year}",
    "{item.sanitize()}_sold_in_{month.split(' ')[0].sanitize()} = {half_amount * 2}",
    "# Sales ratio for the next month",
    "{item.sanitize()}_ratio = {subsequent_ratio}",
    "# Calculating the amount of {item} sold in {month.split(' and ')[1]}",
    "{item.sanitize()}_sold_in_{month.split(' and ')[1].sanitize()} = {item.sanitize()}_sold_in_{month.split(' ')[0].sanitize()} * {item.sanitize()}_ratio",
    "# Calculating the total number of {item} sold during {month}",
    "total_{item.sanitize()} = {item.sanitize()}_sold_in_{month.split(' ')[0].sanitize()} + {item.sanitize()}_sold_in_{month.split(' and ')[1].sanitize()}",
    "",
    "result = total_{item.sanitize()}"
  ]
}
)tdg";

inline constexpr std::string_view kEmilyApples = R"tdg({
  "id": "emily_apples",
  "params": [
    {
      "name": "initial",
      "int_range": [
        5,
        60
      ]
    },
    {
      "name": "multiplier",
      "int_range": [
        2,
        6
      ]
    },
    {
      "name": "given",
      "int_range": [
        1,
        40
      ]
    }
  ],
  "lexicon_slots": [
    {
      "name": "name",
      "category": "first_name"
    },
    {
      "name": "item",
      "category": "item"
    }
  ],
  "constraint": "given < initial + initial * multiplier",
  "problem_template": "{name} has {initial} {item}. {name} buys {multiplier} times more {item} and then gives away {given} {item} to a friend. How many {item} does {name} have now?",
  "nl_solution_template": "{name} starts with {initial} {item}. {name} purchases {multiplier} times more, meaning ${initial} \\times {multiplier} = {initial * multiplier}$ {item}. This brings the total to ${initial} + {initial * multiplier} = {initial + initial * multiplier}$. After giving away {given} {item}, {name} is left with ${initial + initial * multiplier} - {given} = {initial + initial * multiplier - given}$. Thus, {name} has {initial + initial * multiplier - given} {item} remaining.",
  "code_solution_template": [
    "# Initial number of {item} {name} has",
    "initial_{item.sanitize()} = {initial}",
    "",
    "# {name} buys {multiplier} times more {item}",
    "{item.sanitize()}_bought = initial_{item.sanitize()} * {multiplier}",
    "",
    "# Total {item} after buying more",
    "total_{item.sanitize()} = initial_{item.sanitize()} + {item.sanitize()}_bought",
    "",
    "# {name} gives away {given} {item}",
    "{item.sanitize()}_given_away = {given}",
    "",
    "# {item} {name} has now",
    "{item.sanitize()}_now = total_{item.sanitize()} - {item.sanitize()}_given_away",
    "",
    "result = {item.sanitize()}_now  # {name} has {initial + initial * multiplier - given} {item} now"
  ]
}
)tdg";

}  // namespace fixtures

/// Offline client. Picks a bundled template by topic keywords; the same
/// request always yields the same text.
class StubDraftClient : public TemplateDraftClient {
 public:
  std::string draft(const DraftRequest& req) override {
    std::string topic = req.topic;
    std::transform(topic.begin(), topic.end(), topic.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto has = [&](std::string_view w) { return topic.find(w) != std::string::npos; };
    if (has("sales") && has("month")) return std::string(fixtures::kTwoMonthSales);
    if (has("apple")) return std::string(fixtures::kEmilyApples);
    throw AuthoringError(AuthoringError::Kind::empty_response, "no bundled template for topic '" + req.topic + "'");
  }
};

inline std::string draft_template(const DraftRequest& req, TemplateDraftClient& client) {
  if (req.topic.empty()) throw std::invalid_argument("draft topic must not be empty");
  std::string out = client.draft(req);
  if (out.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw AuthoringError(AuthoringError::Kind::empty_response, "drafting endpoint returned an empty response");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dry-run audit.

struct TemplateReport {
  std::string template_id;
  bool parse_ok = false;
  std::string parse_error;
  std::vector<Violation> violations;
  std::vector<std::string> missing_categories;
  std::uint64_t attempted = 0;
  std::uint64_t verified = 0;
  std::uint64_t constraint_exhausted = 0;  // instances whose constraint was never met
  RejectionTally rejected;
  bool admitted = false;
};

struct AuditOptions {
  std::uint64_t max_attempts = kDefaultMaxAttempts;
  VerifyOptions verify;
  unsigned jobs = 1;
};

/// Parses, validates and dry-runs `n_dry_run` instances (index i uses
/// derive_instance_seed(seed, id, i), the generator's first attempt). No
/// retries, so admission implies a clean generation run with the same seed.
inline TemplateReport audit_template(std::string_view source, const Lexicon& lex, std::uint64_t n_dry_run = 100,
                                     std::uint64_t seed = 0, const AuditOptions& opts = {}) {
  if (n_dry_run < 1) throw std::invalid_argument("n_dry_run must be at least 1");
  TemplateReport report;
  MetaTemplate tpl;
  try {
    tpl = parse_template_unvalidated(source);
  } catch (const TemplateError& e) {
    report.parse_error = e.what();
    return report;
  }
  report.parse_ok = true;
  report.template_id = tpl.id;
  report.violations = validate_references(tpl);
  for (const auto& slot : tpl.lexicon_slots) {
    if (!lex.has_category(slot.category)) report.missing_categories.push_back(slot.category);
  }
  if (!report.violations.empty() || !report.missing_categories.empty()) return report;

  struct Cycle {
    bool satisfied = false;
    InstantiationResult result;
  };
  std::vector<Cycle> cycles(n_dry_run);
  detail::parallel_for(0, n_dry_run, opts.jobs, [&](std::uint64_t i) {
    SampleResult s = try_sample_binding(tpl, lex, derive_instance_seed(seed, tpl.id, i), opts.max_attempts);
    if (!s.binding) return;
    cycles[i].satisfied = true;
    cycles[i].result = instantiate(tpl, *s.binding, i, opts.verify);
  });
  report.attempted = n_dry_run;
  for (const auto& c : cycles) {
    if (!c.satisfied) {
      ++report.constraint_exhausted;
    } else if (c.result.record) {
      ++report.verified;
    } else {
      report.rejected.add(c.result);
    }
  }
  report.admitted = report.verified == report.attempted;
  return report;
}

inline nlohmann::ordered_json report_to_json(const TemplateReport& r) {
  nlohmann::ordered_json j;
  j["template_id"] = r.template_id;
  j["parse_ok"] = r.parse_ok;
  if (!r.parse_error.empty()) j["parse_error"] = r.parse_error;
  auto& v = j["violations"] = nlohmann::ordered_json::array();
  for (const auto& x : r.violations) v.push_back(x.message);
  j["missing_categories"] = r.missing_categories;
  j["attempted"] = r.attempted;
  j["verified"] = r.verified;
  j["constraint_exhausted"] = r.constraint_exhausted;
  auto& rej = j["rejected"] = nlohmann::ordered_json::object();
  for (RejectCategory c : kAllRejectCategories) rej[std::string(category_name(c))] = r.rejected.count(c);
  rej[std::string(kRenderErrorCategory)] = r.rejected.render_errors;
  j["admitted"] = r.admitted;
  return j;
}

}  // namespace tdg
