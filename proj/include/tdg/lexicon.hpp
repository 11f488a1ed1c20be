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
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tdg/rng.hpp"

namespace tdg {

class LexiconError : public std::runtime_error {
 public:
  enum class Kind { syntax, empty_category, duplicate_term, unknown_category, empty_result };

  LexiconError(Kind kind, const std::string& message, std::string category = {}, std::string term = {})
      : std::runtime_error(message), kind_(kind), category_(std::move(category)), term_(std::move(term)) {}

  Kind kind() const { return kind_; }
  const std::string& category() const { return category_; }
  const std::string& term() const { return term_; }

 private:
  Kind kind_;
  std::string category_;
  std::string term_;
};

/// Categorized term lists. Categories and terms keep file order.
class Lexicon {
 public:
  using Category = std::pair<std::string, std::vector<std::string>>;

  Lexicon() = default;

  /// Adds a category, enforcing nonempty, deduplicated, nonempty-term lists.
  void add_category(std::string name, std::vector<std::string> terms) {
    if (name.empty()) throw LexiconError(LexiconError::Kind::syntax, "category names must be nonempty");
    if (index_.count(name)) {
      throw LexiconError(LexiconError::Kind::syntax, "category '" + name + "' defined twice", name);
    }
    if (terms.empty()) {
      throw LexiconError(LexiconError::Kind::empty_category, "category '" + name + "' has no terms", name);
    }
    std::unordered_set<std::string> seen;
    for (const auto& t : terms) {
      if (t.empty()) {
        throw LexiconError(LexiconError::Kind::syntax, "category '" + name + "' contains an empty term", name);
      }
      if (!seen.insert(t).second) {
        throw LexiconError(LexiconError::Kind::duplicate_term,
                           "category '" + name + "' lists '" + t + "' more than once", name, t);
      }
    }
    index_.emplace(name, categories_.size());
    categories_.emplace_back(std::move(name), std::move(terms));
  }

  bool has_category(std::string_view name) const { return index_.count(std::string(name)) != 0; }

  const std::vector<std::string>& terms(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) {
      throw LexiconError(LexiconError::Kind::unknown_category, "unknown lexicon category '" + std::string(name) + "'",
                         std::string(name));
    }
    return categories_[it->second].second;
  }

  const std::vector<Category>& categories() const { return categories_; }

 private:
  std::vector<Category> categories_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Lexicon file: a JSON object mapping category -> array of strings.
inline Lexicon load_lexicon(std::string_view source) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw LexiconError(LexiconError::Kind::syntax, std::string("invalid lexicon JSON: ") + e.what());
  }
  if (!doc.is_object()) throw LexiconError(LexiconError::Kind::syntax, "lexicon must be a JSON object");
  Lexicon lex;
  for (const auto& [category, terms] : doc.items()) {
    if (!terms.is_array()) {
      throw LexiconError(LexiconError::Kind::syntax, "category '" + category + "' must be an array", category);
    }
    std::vector<std::string> list;
    list.reserve(terms.size());
    for (const auto& t : terms) {
      if (!t.is_string()) {
        throw LexiconError(LexiconError::Kind::syntax, "category '" + category + "' must contain strings", category);
      }
      list.push_back(t.get<std::string>());
    }
    lex.add_category(category, std::move(list));
  }
  return lex;
}

inline std::string lexicon_to_json(const Lexicon& lex) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [name, terms] : lex.categories()) doc[name] = terms;
  return doc.dump();
}

/// Uniform draw from a category using the caller's generator.
inline const std::string& draw_term(const Lexicon& lex, std::string_view category, Xoshiro256& rng) {
  const auto& list = lex.terms(category);
  return list[rng.below(list.size())];
}

/// Spaces become underscores, anything outside [A-Za-z0-9_] is dropped, and
/// a leading digit gets an underscore prefix.
inline std::string sanitize_identifier(std::string_view term) {
  std::string out;
  out.reserve(term.size() + 1);
  for (char c : term) {
    if (c == ' ') {
      out += '_';
    } else if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_') {
      out += c;
    }
  }
  if (out.empty()) {
    throw LexiconError(LexiconError::Kind::empty_result,
                       "'" + std::string(term) + "' has no identifier characters", {}, std::string(term));
  }
  if (out[0] >= '0' && out[0] <= '9') out.insert(out.begin(), '_');
  return out;
}

}  // namespace tdg
