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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "tdg/lexicon.hpp"
#include "tdg/sampler.hpp"
#include "tdg/template_dsl.hpp"

namespace tdg {

class RenderError : public std::runtime_error {
 public:
  enum class Kind { unbound_name, split_index_out_of_range, type_mismatch, arithmetic, sanitize_failed };

  RenderError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  RenderError(const RenderError& inner, std::string template_id, Target target, std::size_t segment)
      : std::runtime_error("template '" + template_id + "', " + std::string(target_name(target)) + " segment " +
                           std::to_string(segment) + ": " + inner.what()),
        kind_(inner.kind_),
        template_id_(std::move(template_id)),
        target_(target),
        segment_(segment) {}

  Kind kind() const { return kind_; }
  const std::string& template_id() const { return template_id_; }
  Target target() const { return target_; }
  std::size_t segment() const { return segment_; }

 private:
  Kind kind_;
  std::string template_id_;
  Target target_ = Target::problem;
  std::size_t segment_ = 0;
};

struct RenderedInstance {
  std::string template_id;
  std::string problem;
  std::string nl_solution;
  std::string code_source;
  Binding binding;
};

namespace detail {

using RenderValue = std::variant<Number, std::string>;

inline const char* fault_name(ArithFault f) {
  switch (f) {
    case ArithFault::division_by_zero: return "division by zero";
    case ArithFault::int_overflow: return "integer overflow";
    case ArithFault::non_finite: return "non-finite value";
    case ArithFault::none: break;
  }
  return "arithmetic fault";
}

inline RenderValue eval_value(const ExprPtr& e, const Binding& b) {
  auto as_number = [&](const ExprPtr& sub) -> Number {
    RenderValue v = eval_value(sub, b);
    if (auto* n = std::get_if<Number>(&v)) return *n;
    throw RenderError(RenderError::Kind::type_mismatch, "arithmetic on text value '" + std::get<std::string>(v) + "'");
  };
  auto as_text = [&](const ExprPtr& sub, const char* method) -> std::string {
    RenderValue v = eval_value(sub, b);
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    throw RenderError(RenderError::Kind::type_mismatch, std::string(method) + "() applied to a number");
  };
  auto check = [](const ArithResult& r) {
    if (r.fault != ArithFault::none) throw RenderError(RenderError::Kind::arithmetic, fault_name(r.fault));
    return r.value;
  };

  switch (e->kind) {
    case Expr::Kind::ref:
      if (const Number* n = b.param(e->name)) return *n;
      if (const std::string* s = b.slot(e->name)) return *s;
      throw RenderError(RenderError::Kind::unbound_name, "unbound name '" + e->name + "'");
    case Expr::Kind::literal: return e->value;
    case Expr::Kind::paren: return eval_value(e->lhs, b);
    case Expr::Kind::negate: return check(apply_negate(as_number(e->lhs)));
    case Expr::Kind::binary: {
      const Number l = as_number(e->lhs);
      const Number r = as_number(e->rhs);
      return check(apply_binary(e->op, l, r));
    }
    case Expr::Kind::split: {
      const std::string text = as_text(e->lhs, "split");
      std::size_t start = 0;
      std::int64_t piece = 0;
      for (;;) {
        const std::size_t at = text.find(e->delimiter, start);
        if (piece == e->index) return text.substr(start, at == std::string::npos ? std::string::npos : at - start);
        if (at == std::string::npos) break;
        start = at + e->delimiter.size();
        ++piece;
      }
      throw RenderError(RenderError::Kind::split_index_out_of_range,
                        "split(" + detail::quote_single(e->delimiter) + ")[" + std::to_string(e->index) +
                            "] out of range: '" + text + "' has " + std::to_string(piece + 1) + " piece(s)");
    }
    case Expr::Kind::sanitize: {
      const std::string text = as_text(e->lhs, "sanitize");
      try {
        return sanitize_identifier(text);
      } catch (const LexiconError& err) {
        throw RenderError(RenderError::Kind::sanitize_failed, err.what());
      }
    }
  }
  throw RenderError(RenderError::Kind::type_mismatch, "malformed expression");
}

}  // namespace detail

/// Evaluates one placeholder. Numbers use the format spec (shortest
/// round-trip by default, fixed decimals with half-to-even ties otherwise);
/// text passes through unchanged.
inline std::string eval_placeholder(const ExprPtr& expr, const FormatSpec& fmt, const Binding& binding) {
  detail::RenderValue v = detail::eval_value(expr, binding);
  if (auto* s = std::get_if<std::string>(&v)) {
    if (fmt.decimals) throw RenderError(RenderError::Kind::type_mismatch, "numeric format applied to text '" + *s + "'");
    return *s;
  }
  const Number& n = std::get<Number>(v);
  return fmt.decimals ? format_fixed(n, *fmt.decimals) : format_default(n);
}

inline std::string render_text(const MetaTemplate& tpl, Target target, const Binding& binding) {
  std::string out;
  const auto& segments = tpl.text(target).segments;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    if (!seg.is_placeholder) {
      out += seg.literal.text;
      continue;
    }
    try {
      out += eval_placeholder(seg.placeholder.placeholder.expr, seg.placeholder.placeholder.format, binding);
    } catch (const RenderError& e) {
      throw RenderError(e, tpl.id, target, i);
    }
  }
  return out;
}

inline RenderedInstance render_instance(const MetaTemplate& tpl, const Binding& binding) {
  RenderedInstance out;
  out.template_id = tpl.id;
  out.problem = render_text(tpl, Target::problem, binding);
  out.nl_solution = render_text(tpl, Target::nl_solution, binding);
  out.code_source = render_text(tpl, Target::code_solution, binding);
  out.binding = binding;
  return out;
}

}  // namespace tdg
