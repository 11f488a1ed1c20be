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

// Template file format (`.tdg.json`): one JSON object per template.
//
//   {
//     "id": "two_month_sales",
//     "params": [
//       {"name": "half_amount", "int_range": [5, 250]},
//       {"name": "ratio", "float_choice": [0.5, 1.5]},
//       {"name": "boxes", "choice": [2, 3, 4]}
//     ],
//     "lexicon_slots": [{"name": "item", "category": "item"}],
//     "constraint": "half_amount * 2 > boxes",      (optional, may be null)
//     "problem_template": "...",                     (string or array of lines)
//     "nl_solution_template": "...",
//     "code_solution_template": ["line 1", "line 2"]
//   }
//
// Arrays of lines are joined with "\n". Unknown keys are rejected.

#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tdg/template_dsl.hpp"

namespace tdg {

namespace detail {

using ordered_json = nlohmann::ordered_json;

/// Best-effort position of the first occurrence of `"key"` in the source.
inline std::pair<std::size_t, std::size_t> locate_key(std::string_view source, std::string_view key) {
  const std::string needle = "\"" + std::string(key) + "\"";
  const std::size_t at = source.find(needle);
  if (at == std::string_view::npos) return {1, 1};
  return line_col(source, at);
}

inline TemplateError file_error(std::string_view source, std::string_view key, const std::string& msg,
                                TemplateError::Kind kind = TemplateError::Kind::syntax, std::string name = {}) {
  auto [line, col] = locate_key(source, key);
  return TemplateError(kind, msg, line, col, std::move(name));
}

/// File line holding line `text_line` (1-based) of a text field. Array
/// elements are located by their encoded form after the key; a plain string
/// is on the key's line.
inline std::size_t text_line_in_file(std::string_view source, const ordered_json& doc, std::string_view key,
                                     std::size_t text_line) {
  const std::string needle = "\"" + std::string(key) + "\"";
  std::size_t at = source.find(needle);
  if (at == std::string_view::npos) return 1;
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_array() || text_line == 0 || text_line > it->size()) {
    return line_col(source, at).first;
  }
  at += needle.size();
  for (std::size_t k = 0; k < text_line; ++k) {
    const std::size_t next = source.find((*it)[k].dump(), at);
    if (next == std::string_view::npos) return line_col(source, at).first;
    at = next + (k + 1 < text_line ? (*it)[k].dump().size() : 0);
  }
  return line_col(source, at).first;
}

inline std::string read_text_field(std::string_view source, const ordered_json& doc, std::string_view key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw file_error(source, "id", "missing field '" + std::string(key) + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_array()) {
    std::string out;
    bool first = true;
    for (const auto& line : *it) {
      if (!line.is_string()) throw file_error(source, key, "'" + std::string(key) + "' lines must be strings");
      if (!first) out += '\n';
      out += line.get<std::string>();
      first = false;
    }
    return out;
  }
  throw file_error(source, key, "'" + std::string(key) + "' must be a string or an array of strings");
}

inline Number json_number(const ordered_json& v) {
  if (v.is_number_integer()) return Number::integer(v.get<std::int64_t>());
  return Number::real(v.get<double>());
}

inline void check_name(std::string_view source, const std::string& name, std::string_view key) {
  if (!is_identifier(name)) {
    throw file_error(source, key, "'" + name + "' is not a valid identifier");
  }
  if (is_keyword(name)) throw file_error(source, key, "'" + name + "' is a reserved word");
}

inline ParamSpec parse_param(std::string_view source, const ordered_json& p) {
  if (!p.is_object()) throw file_error(source, "params", "each param must be an object");
  ParamSpec spec;
  int domains = 0;
  for (const auto& [key, value] : p.items()) {
    if (key == "name") {
      if (!value.is_string()) throw file_error(source, "params", "param name must be a string");
      spec.name = value.get<std::string>();
    } else if (key == "int_range") {
      ++domains;
      if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
          !value[1].is_number_integer()) {
        throw file_error(source, "int_range", "int_range must be [lo, hi] with integer bounds");
      }
      spec.domain = ParamSpec::Domain::int_range;
      spec.range = {value[0].get<std::int64_t>(), value[1].get<std::int64_t>()};
      if (spec.range.lo > spec.range.hi) throw file_error(source, "int_range", "int_range requires lo <= hi");
    } else if (key == "choice" || key == "float_choice") {
      ++domains;
      if (!value.is_array() || value.empty()) throw file_error(source, key, key + " must be a nonempty array");
      for (const auto& v : value) {
        if (!v.is_number()) throw file_error(source, key, key + " entries must be numbers");
        const Number n = json_number(v);
        if (!std::isfinite(n.as_double())) throw file_error(source, key, key + " entries must be finite");
        if (key == "choice") {
          spec.choice.values.push_back(n);
        } else {
          spec.float_choice.values.push_back(n.as_double());
        }
      }
      spec.domain = key == "choice" ? ParamSpec::Domain::choice : ParamSpec::Domain::float_choice;
    } else {
      throw file_error(source, key, "unknown param key '" + key + "'");
    }
  }
  if (spec.name.empty()) throw file_error(source, "params", "param is missing 'name'");
  if (domains != 1) {
    throw file_error(source, spec.name, "param '" + spec.name + "' needs exactly one of int_range, choice, float_choice");
  }
  check_name(source, spec.name, spec.name);
  return spec;
}

inline ordered_json text_to_json(const std::string& text) {
  if (text.find('\n') == std::string::npos) return text;
  ordered_json lines = ordered_json::array();
  std::size_t start = 0;
  for (;;) {
    const std::size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl - start));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return lines;
}

}  // namespace detail

/// Parses a template file without checking references or types. Throws
/// TemplateError (syntax or duplicate_name).
inline MetaTemplate parse_template_unvalidated(std::string_view source) {
  using detail::ordered_json;
  ordered_json doc;
  try {
    doc = ordered_json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_col(source, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    throw TemplateError(TemplateError::Kind::syntax, "invalid JSON: " + msg, line, col);
  }
  if (!doc.is_object()) throw TemplateError(TemplateError::Kind::syntax, "template must be a JSON object", 1, 1);

  static const std::set<std::string> known = {"id",         "params",           "lexicon_slots",
                                              "constraint", "problem_template", "nl_solution_template",
                                              "code_solution_template"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw detail::file_error(source, key, "unknown template key '" + key + "'");
  }

  MetaTemplate tpl;
  const auto id = doc.find("id");
  if (id == doc.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw detail::file_error(source, "id", "template 'id' must be a nonempty string");
  }
  tpl.id = id->get<std::string>();

  std::set<std::string> names;
  auto claim = [&](const std::string& name) {
    if (!names.insert(name).second) {
      throw detail::file_error(source, name, "duplicate name '" + name + "'", TemplateError::Kind::duplicate_name,
                               name);
    }
  };

  if (const auto params = doc.find("params"); params != doc.end() && !params->is_null()) {
    if (!params->is_array()) throw detail::file_error(source, "params", "'params' must be an array");
    for (const auto& p : *params) {
      tpl.params.push_back(detail::parse_param(source, p));
      claim(tpl.params.back().name);
    }
  }
  if (const auto slots = doc.find("lexicon_slots"); slots != doc.end() && !slots->is_null()) {
    if (!slots->is_array()) throw detail::file_error(source, "lexicon_slots", "'lexicon_slots' must be an array");
    for (const auto& s : *slots) {
      if (!s.is_object() || s.size() != 2 || !s.contains("name") || !s.contains("category") ||
          !s["name"].is_string() || !s["category"].is_string()) {
        throw detail::file_error(source, "lexicon_slots",
                                 "each lexicon slot must be {\"name\": ..., \"category\": ...}");
      }
      LexiconSlot slot{s["name"].get<std::string>(), s["category"].get<std::string>()};
      detail::check_name(source, slot.name, slot.name);
      if (slot.category.empty()) throw detail::file_error(source, slot.name, "slot category must be nonempty");
      claim(slot.name);
      tpl.lexicon_slots.push_back(std::move(slot));
    }
  }
  if (const auto c = doc.find("constraint"); c != doc.end() && !c->is_null()) {
    if (!c->is_string()) throw detail::file_error(source, "constraint", "'constraint' must be a string or null");
    Constraint constraint;
    constraint.source = c->get<std::string>();
    try {
      constraint.root = parse_constraint(constraint.source);
    } catch (const TemplateError& e) {
      throw TemplateError(e.kind(), std::string("constraint: ") + e.what(), e.line(), e.column(), e.name());
    }
    tpl.constraint = std::move(constraint);
  }
  for (Target t : kAllTargets) {
    const std::string text = detail::read_text_field(source, doc, target_name(t));
    TemplateText parsed;
    try {
      parsed = parse_template_text(text);
    } catch (const TemplateError& e) {
      std::string msg = e.what();
      if (e.line() != 0) msg = msg.substr(msg.find(": ") + 2);
      // Position becomes the file line; the column stays relative to the text line.
      const std::size_t line = detail::text_line_in_file(source, doc, target_name(t), e.line());
      throw TemplateError(e.kind(), std::string(target_name(t)) + ": " + msg, line, e.column(), e.name());
    }
    switch (t) {
      case Target::problem: tpl.problem_template = std::move(parsed); break;
      case Target::nl_solution: tpl.nl_solution_template = std::move(parsed); break;
      case Target::code_solution: tpl.code_solution_template = std::move(parsed); break;
    }
  }
  return tpl;
}

/// Parses and validates a template file. Any reference or type violation is
/// raised as a TemplateError.
inline MetaTemplate parse_template(std::string_view source) {
  MetaTemplate tpl = parse_template_unvalidated(source);
  const auto violations = validate_references(tpl);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    const auto kind = v.kind == Violation::Kind::undeclared_reference ? TemplateError::Kind::undeclared_reference
                                                                      : TemplateError::Kind::type_mismatch;
    auto [line, col] = detail::locate_key(source, v.location);
    throw TemplateError(kind, v.location + ": " + v.message, line, col, v.name);
  }
  return tpl;
}

/// Serializes a template from its AST. Texts and the constraint are printed
/// in canonical spelling, so the output is stable for structurally equal
/// templates.
inline std::string template_to_json(const MetaTemplate& tpl, int indent = 2) {
  using detail::ordered_json;
  ordered_json doc;
  doc["id"] = tpl.id;
  ordered_json params = ordered_json::array();
  for (const auto& p : tpl.params) {
    ordered_json j;
    j["name"] = p.name;
    switch (p.domain) {
      case ParamSpec::Domain::int_range: j["int_range"] = {p.range.lo, p.range.hi}; break;
      case ParamSpec::Domain::choice: {
        ordered_json values = ordered_json::array();
        for (const auto& v : p.choice.values) {
          if (v.is_int()) {
            values.push_back(v.as_int());
          } else {
            values.push_back(v.as_double());
          }
        }
        j["choice"] = values;
        break;
      }
      case ParamSpec::Domain::float_choice: j["float_choice"] = p.float_choice.values; break;
    }
    params.push_back(j);
  }
  doc["params"] = params;
  ordered_json slots = ordered_json::array();
  for (const auto& s : tpl.lexicon_slots) slots.push_back({{"name", s.name}, {"category", s.category}});
  doc["lexicon_slots"] = slots;
  doc["constraint"] = tpl.constraint ? ordered_json(to_string(tpl.constraint->root)) : ordered_json(nullptr);
  for (Target t : kAllTargets) doc[std::string(target_name(t))] = detail::text_to_json(tpl.text(t).canonical_source());
  return doc.dump(indent);
}

}  // namespace tdg
