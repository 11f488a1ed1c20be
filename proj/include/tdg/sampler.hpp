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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdg/lexicon.hpp"
#include "tdg/numeric.hpp"
#include "tdg/rng.hpp"
#include "tdg/template_dsl.hpp"

namespace tdg {

/// One concrete assignment of a template's params and lexicon slots, in
/// declaration order.
struct Binding {
  std::vector<std::pair<std::string, Number>> params;
  std::vector<std::pair<std::string, std::string>> slots;
  std::uint64_t instance_seed = 0;

  const Number* param(std::string_view name) const {
    for (const auto& [n, v] : params) {
      if (n == name) return &v;
    }
    return nullptr;
  }

  const std::string* slot(std::string_view name) const {
    for (const auto& [n, v] : slots) {
      if (n == name) return &v;
    }
    return nullptr;
  }

  friend bool operator==(const Binding&, const Binding&) = default;
};

class Unsatisfiable : public std::runtime_error {
 public:
  Unsatisfiable(std::string template_id, std::uint64_t attempts)
      : std::runtime_error("template '" + template_id + "': constraint unsatisfied after " +
                           std::to_string(attempts) + " attempts"),
        template_id_(std::move(template_id)),
        attempts_(attempts) {}

  const std::string& template_id() const { return template_id_; }
  std::uint64_t attempts() const { return attempts_; }

 private:
  std::string template_id_;
  std::uint64_t attempts_;
};

inline constexpr std::uint64_t kDefaultMaxAttempts = 100;

/// seed = mix64(FNV-1a64(le64(global_seed) || template_id || 0x00 || le64(index)))
inline std::uint64_t derive_instance_seed(std::uint64_t global_seed, std::string_view template_id,
                                          std::uint64_t instance_index) {
  Fnv1a64 h;
  h.update_u64(global_seed).update(template_id).update_byte(0).update_u64(instance_index);
  return mix64(h.digest());
}

/// Seed of the k-th draw substream (k = 0, 1, ...) of one instance seed.
inline std::uint64_t substream_seed(std::uint64_t instance_seed, std::uint64_t k) {
  return mix64(instance_seed + (k + 1) * kGoldenGamma);
}

/// Seed used for the n-th retry (n >= 1) of an instance whose first draw
/// used `base_seed`.
inline std::uint64_t retry_seed(std::uint64_t base_seed, std::uint64_t attempt) {
  return mix64(base_seed ^ mix64(attempt));
}

// ---------------------------------------------------------------------------
// Numeric evaluation over params (constraints and numeric placeholders).

struct NumericEval {
  std::optional<Number> value;
  ArithFault fault = ArithFault::none;
  std::string unbound;  // name of an unbound or text-valued reference
};

template <typename Lookup>
NumericEval eval_numeric(const ExprPtr& e, const Lookup& lookup) {
  switch (e->kind) {
    case Expr::Kind::ref: {
      const Number* v = lookup(e->name);
      if (!v) return {std::nullopt, ArithFault::none, e->name};
      return {*v, ArithFault::none, {}};
    }
    case Expr::Kind::literal: return {e->value, ArithFault::none, {}};
    case Expr::Kind::paren: return eval_numeric(e->lhs, lookup);
    case Expr::Kind::negate: {
      NumericEval inner = eval_numeric(e->lhs, lookup);
      if (!inner.value) return inner;
      ArithResult r = apply_negate(*inner.value);
      if (r.fault != ArithFault::none) return {std::nullopt, r.fault, {}};
      return {r.value, ArithFault::none, {}};
    }
    case Expr::Kind::binary: {
      NumericEval l = eval_numeric(e->lhs, lookup);
      if (!l.value) return l;
      NumericEval r = eval_numeric(e->rhs, lookup);
      if (!r.value) return r;
      ArithResult out = apply_binary(e->op, *l.value, *r.value);
      if (out.fault != ArithFault::none) return {std::nullopt, out.fault, {}};
      return {out.value, ArithFault::none, {}};
    }
    case Expr::Kind::split:
    case Expr::Kind::sanitize: return {std::nullopt, ArithFault::none, "<text method>"};
  }
  return {};
}

inline bool compare_numbers(CmpOp op, const Number& a, const Number& b) {
  int ord = 0;
  if (a.is_int() && b.is_int()) {
    ord = a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
  } else {
    const double x = a.as_double();
    const double y = b.as_double();
    ord = x < y ? -1 : (x > y ? 1 : 0);
  }
  switch (op) {
    case CmpOp::lt: return ord < 0;
    case CmpOp::le: return ord <= 0;
    case CmpOp::eq: return ord == 0;
    case CmpOp::ne: return ord != 0;
    case CmpOp::ge: return ord >= 0;
    case CmpOp::gt: return ord > 0;
  }
  return false;
}

namespace detail {

// Returns nullopt when evaluation hit an arithmetic fault.
template <typename Lookup>
std::optional<bool> eval_condition(const ConditionPtr& c, const Lookup& lookup) {
  switch (c->kind) {
    case Condition::Kind::compare: {
      NumericEval l = eval_numeric(c->lhs, lookup);
      NumericEval r = l.value ? eval_numeric(c->rhs, lookup) : NumericEval{};
      if (!l.unbound.empty() || !r.unbound.empty()) {
        throw std::invalid_argument("constraint refers to unbound parameter '" +
                                    (l.unbound.empty() ? r.unbound : l.unbound) + "'");
      }
      if (!l.value || !r.value) return std::nullopt;
      return compare_numbers(c->cmp, *l.value, *r.value);
    }
    case Condition::Kind::conjunction: {
      auto l = eval_condition(c->children[0], lookup);
      if (!l) return std::nullopt;
      if (!*l) return false;
      return eval_condition(c->children[1], lookup);
    }
    case Condition::Kind::disjunction: {
      auto l = eval_condition(c->children[0], lookup);
      if (!l) return std::nullopt;
      if (*l) return true;
      return eval_condition(c->children[1], lookup);
    }
    case Condition::Kind::negation: {
      auto inner = eval_condition(c->children[0], lookup);
      if (!inner) return std::nullopt;
      return !*inner;
    }
    case Condition::Kind::group: return eval_condition(c->children[0], lookup);
  }
  return std::nullopt;
}

}  // namespace detail

/// Short-circuit evaluation. An arithmetic fault (division by zero,
/// overflow, non-finite value) in any evaluated comparison makes the whole
/// constraint false. Mixed Int/Float comparisons are done in binary64.
template <typename Params>
bool eval_constraint(const ConditionPtr& expr, const Params& params) {
  auto lookup = [&](std::string_view name) -> const Number* {
    for (const auto& [n, v] : params) {
      if (n == name) return &v;
    }
    return nullptr;
  };
  return detail::eval_condition(expr, lookup).value_or(false);
}

// ---------------------------------------------------------------------------
// Sampling.

struct SampleResult {
  std::optional<Binding> binding;
  std::uint64_t attempts = 0;  // draws consumed, <= max_attempts
};

inline Number draw_param(const ParamSpec& p, Xoshiro256& rng) {
  switch (p.domain) {
    case ParamSpec::Domain::int_range: return Number::integer(rng.in_range(p.range.lo, p.range.hi));
    case ParamSpec::Domain::choice: return p.choice.values[rng.below(p.choice.values.size())];
    case ParamSpec::Domain::float_choice:
      return Number::real(p.float_choice.values[rng.below(p.float_choice.values.size())]);
  }
  return {};
}

/// Bounded rejection sampling. Draw k uses the generator seeded with
/// substream_seed(instance_seed, k): params are drawn in declaration order,
/// the constraint is tested, and on success the slot terms are drawn from
/// the same generator.
inline SampleResult try_sample_binding(const MetaTemplate& tpl, const Lexicon& lex, std::uint64_t instance_seed,
                                       std::uint64_t max_attempts = kDefaultMaxAttempts) {
  if (max_attempts == 0) throw std::invalid_argument("max_attempts must be at least 1");
  SampleResult out;
  for (std::uint64_t k = 0; k < max_attempts; ++k) {
    ++out.attempts;
    Xoshiro256 rng(substream_seed(instance_seed, k));
    Binding b;
    b.instance_seed = instance_seed;
    b.params.reserve(tpl.params.size());
    for (const auto& p : tpl.params) b.params.emplace_back(p.name, draw_param(p, rng));
    if (tpl.constraint && !eval_constraint(tpl.constraint->root, b.params)) continue;
    b.slots.reserve(tpl.lexicon_slots.size());
    for (const auto& s : tpl.lexicon_slots) b.slots.emplace_back(s.name, draw_term(lex, s.category, rng));
    out.binding = std::move(b);
    return out;
  }
  return out;
}

/// Throws Unsatisfiable when every one of `max_attempts` draws violates the
/// constraint.
inline Binding sample_binding(const MetaTemplate& tpl, const Lexicon& lex, std::uint64_t instance_seed,
                              std::uint64_t max_attempts = kDefaultMaxAttempts) {
  SampleResult r = try_sample_binding(tpl, lex, instance_seed, max_attempts);
  if (!r.binding) throw Unsatisfiable(tpl.id, r.attempts);
  return std::move(*r.binding);
}

}  // namespace tdg
