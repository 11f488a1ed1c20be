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
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdg/numeric.hpp"

namespace tdg {

/// Error raised while parsing templates or placeholder/constraint
/// expressions. `line` and `column` are 1-based positions within the text
/// being parsed (0 when the error has no meaningful position).
class TemplateError : public std::runtime_error {
 public:
  enum class Kind {
    syntax,
    undeclared_reference,
    duplicate_name,
    unknown_method,
    bad_format_spec,
    type_mismatch,
  };

  TemplateError(Kind kind, const std::string& message, std::size_t line = 0,
                std::size_t column = 0, std::string name = {})
      : std::runtime_error(decorate(message, line, column)),
        kind_(kind),
        line_(line),
        column_(column),
        name_(std::move(name)) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& name() const { return name_; }

 private:
  static std::string decorate(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  Kind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Expression AST shared by placeholders and constraint arithmetic.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { ref, literal, binary, negate, paren, split, sanitize };

  Kind kind = Kind::literal;
  std::string name;            // ref
  Number value;                // literal
  BinaryOp op = BinaryOp::add; // binary
  ExprPtr lhs;                 // binary lhs; sole operand of unary/method nodes
  ExprPtr rhs;                 // binary rhs
  std::string delimiter;       // split
  std::int64_t index = 0;      // split
  std::size_t offset = 0;      // byte offset in the parsed source; ignored by ==

  static ExprPtr make_ref(std::string name, std::size_t offset = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::ref;
    e->name = std::move(name);
    e->offset = offset;
    return e;
  }
  static ExprPtr make_literal(Number v, std::size_t offset = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::literal;
    e->value = v;
    e->offset = offset;
    return e;
  }
  static ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, std::size_t offset = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::binary;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    e->offset = offset;
    return e;
  }
  static ExprPtr make_unary(Kind kind, ExprPtr operand, std::size_t offset = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs = std::move(operand);
    e->offset = offset;
    return e;
  }
  static ExprPtr make_split(ExprPtr operand, std::string delimiter, std::int64_t index,
                            std::size_t offset = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::split;
    e->lhs = std::move(operand);
    e->delimiter = std::move(delimiter);
    e->index = index;
    e->offset = offset;
    return e;
  }
};

inline bool same_structure(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::ref: return a->name == b->name;
    case Expr::Kind::literal: return a->value == b->value;
    case Expr::Kind::binary:
      return a->op == b->op && same_structure(a->lhs, b->lhs) && same_structure(a->rhs, b->rhs);
    case Expr::Kind::negate:
    case Expr::Kind::paren:
    case Expr::Kind::sanitize: return same_structure(a->lhs, b->lhs);
    case Expr::Kind::split:
      return a->delimiter == b->delimiter && a->index == b->index && same_structure(a->lhs, b->lhs);
  }
  return false;
}

/// Placeholder format: default rendering or fixed decimals (0..6).
struct FormatSpec {
  std::optional<int> decimals;

  friend bool operator==(const FormatSpec&, const FormatSpec&) = default;
};

inline constexpr int kMaxFixedDecimals = 6;

// ---------------------------------------------------------------------------
// Constraint AST.

enum class CmpOp { lt, le, eq, ne, ge, gt };

inline std::string_view cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
    case CmpOp::ge: return ">=";
    case CmpOp::gt: return ">";
  }
  return "?";
}

struct Condition;
using ConditionPtr = std::shared_ptr<const Condition>;

struct Condition {
  enum class Kind { compare, conjunction, disjunction, negation, group };

  Kind kind = Kind::compare;
  CmpOp cmp = CmpOp::eq;
  ExprPtr lhs;
  ExprPtr rhs;
  std::vector<ConditionPtr> children;  // 2 for and/or, 1 for not/group
};

inline bool same_structure(const ConditionPtr& a, const ConditionPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == Condition::Kind::compare) {
    return a->cmp == b->cmp && same_structure(a->lhs, b->lhs) && same_structure(a->rhs, b->rhs);
  }
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!same_structure(a->children[i], b->children[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tokenizer shared by the placeholder and constraint grammars.

namespace detail {

struct Token {
  enum class Kind { ident, number, string, symbol, end };
  Kind kind = Kind::end;
  std::string text;
  Number number;
  std::size_t offset = 0;
};

inline bool is_keyword(std::string_view s) { return s == "and" || s == "or" || s == "not"; }

/// Converts a byte offset into a 1-based (line, column) pair.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline TemplateError syntax_at(std::string_view source, std::size_t offset, const std::string& msg) {
  auto [line, col] = line_col(source, offset);
  return TemplateError(TemplateError::Kind::syntax, msg, line, col);
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9'); };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    Token tok;
    tok.offset = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.kind = Token::Kind::ident;
      tok.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c >= '0' && c <= '9') {
      const std::size_t len = scan_number_literal(src.substr(i));
      auto value = parse_number_literal(src.substr(i, len));
      if (!value) throw syntax_at(src, i, "numeric literal out of range");
      tok.kind = Token::Kind::number;
      tok.text = std::string(src.substr(i, len));
      tok.number = *value;
      i += len;
    } else if (c == '\'' || c == '"') {
      const char quote = c;
      std::size_t j = i + 1;
      std::string value;
      bool closed = false;
      while (j < src.size()) {
        if (src[j] == '\\' && j + 1 < src.size()) {
          value += src[j + 1];
          j += 2;
          continue;
        }
        if (src[j] == quote) {
          closed = true;
          ++j;
          break;
        }
        value += src[j++];
      }
      if (!closed) throw syntax_at(src, i, "unterminated string literal");
      tok.kind = Token::Kind::string;
      tok.text = std::move(value);
      i = j;
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "==", "!="};
      tok.kind = Token::Kind::symbol;
      bool matched = false;
      for (auto s : two) {
        if (src.substr(i, 2) == s) {
          tok.text = std::string(s);
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        static constexpr std::string_view one = "+-*/()[].<>=";
        if (one.find(c) == std::string_view::npos) {
          throw syntax_at(src, i, std::string("unexpected character '") + c + "'");
        }
        tok.text = std::string(1, c);
        ++i;
      }
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.offset = src.size();
  out.push_back(end);
  return out;
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view source) : src_(source), toks_(tokenize(source)) {}

  ExprPtr parse_full_expression() {
    ExprPtr e = additive();
    expect_end();
    return e;
  }

  ConditionPtr parse_full_condition() {
    ConditionPtr c = disjunction();
    expect_end();
    return c;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_symbol(std::string_view s) const {
    return peek().kind == Token::Kind::symbol && peek().text == s;
  }
  bool at_keyword(std::string_view s) const {
    return peek().kind == Token::Kind::ident && peek().text == s;
  }
  const Token& advance() { return toks_[pos_++]; }

  TemplateError error_here(const std::string& msg) const { return syntax_at(src_, peek().offset, msg); }

  void expect_symbol(std::string_view s) {
    if (!at_symbol(s)) throw error_here("expected '" + std::string(s) + "'" + found());
    ++pos_;
  }

  void expect_end() {
    if (peek().kind != Token::Kind::end) throw error_here("unexpected trailing input" + found());
  }

  std::string found() const {
    if (peek().kind == Token::Kind::end) return ", found end of input";
    return ", found '" + peek().text + "'";
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (at_symbol("+") || at_symbol("-")) {
      const Token& t = advance();
      ExprPtr rhs = multiplicative();
      lhs = Expr::make_binary(t.text == "+" ? BinaryOp::add : BinaryOp::sub, lhs, rhs, t.offset);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while (at_symbol("*") || at_symbol("/")) {
      const Token& t = advance();
      ExprPtr rhs = unary();
      lhs = Expr::make_binary(t.text == "*" ? BinaryOp::mul : BinaryOp::div, lhs, rhs, t.offset);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at_symbol("-")) {
      const std::size_t off = advance().offset;
      return Expr::make_unary(Expr::Kind::negate, unary(), off);
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (at_symbol(".")) {
      ++pos_;
      if (peek().kind != Token::Kind::ident) throw error_here("expected method name" + found());
      const Token& method = advance();
      if (method.text == "split") {
        expect_symbol("(");
        if (peek().kind != Token::Kind::string) throw error_here("split expects a string delimiter" + found());
        std::string delim = advance().text;
        if (delim.empty()) throw syntax_at(src_, toks_[pos_ - 1].offset, "split delimiter must be nonempty");
        expect_symbol(")");
        expect_symbol("[");
        if (peek().kind != Token::Kind::number || !peek().number.is_int()) {
          throw error_here("split index must be a non-negative integer literal" + found());
        }
        const std::int64_t idx = advance().number.as_int();
        expect_symbol("]");
        e = Expr::make_split(e, std::move(delim), idx, method.offset);
      } else if (method.text == "sanitize") {
        expect_symbol("(");
        expect_symbol(")");
        e = Expr::make_unary(Expr::Kind::sanitize, e, method.offset);
      } else {
        auto [line, col] = line_col(src_, method.offset);
        throw TemplateError(TemplateError::Kind::unknown_method, "unknown method '" + method.text + "'",
                            line, col, method.text);
      }
    }
    return e;
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::ident:
        if (is_keyword(t.text)) throw error_here("reserved word '" + t.text + "' used as a name");
        ++pos_;
        return Expr::make_ref(t.text, t.offset);
      case Token::Kind::number:
        ++pos_;
        return Expr::make_literal(t.number, t.offset);
      case Token::Kind::symbol:
        if (t.text == "(") {
          ++pos_;
          ExprPtr inner = additive();
          expect_symbol(")");
          return Expr::make_unary(Expr::Kind::paren, inner, t.offset);
        }
        break;
      default:
        break;
    }
    throw error_here("expected a name, number or '('" + found());
  }

  ConditionPtr disjunction() {
    ConditionPtr lhs = conjunction();
    while (at_keyword("or")) {
      ++pos_;
      auto c = std::make_shared<Condition>();
      c->kind = Condition::Kind::disjunction;
      c->children = {lhs, conjunction()};
      lhs = c;
    }
    return lhs;
  }

  ConditionPtr conjunction() {
    ConditionPtr lhs = negation();
    while (at_keyword("and")) {
      ++pos_;
      auto c = std::make_shared<Condition>();
      c->kind = Condition::Kind::conjunction;
      c->children = {lhs, negation()};
      lhs = c;
    }
    return lhs;
  }

  ConditionPtr negation() {
    if (at_keyword("not")) {
      ++pos_;
      auto c = std::make_shared<Condition>();
      c->kind = Condition::Kind::negation;
      c->children = {negation()};
      return c;
    }
    if (at_symbol("(")) {
      // Either a parenthesised arithmetic operand of a comparison or a
      // grouped condition; try the comparison first and backtrack.
      const std::size_t saved = pos_;
      try {
        return comparison();
      } catch (const TemplateError&) {
        pos_ = saved;
      }
      ++pos_;
      auto c = std::make_shared<Condition>();
      c->kind = Condition::Kind::group;
      c->children = {disjunction()};
      expect_symbol(")");
      return c;
    }
    return comparison();
  }

  ConditionPtr comparison() {
    ExprPtr lhs = additive();
    static constexpr std::pair<std::string_view, CmpOp> ops[] = {
        {"<", CmpOp::lt}, {"<=", CmpOp::le}, {"=", CmpOp::eq},  {"==", CmpOp::eq},
        {"!=", CmpOp::ne}, {">=", CmpOp::ge}, {">", CmpOp::gt},
    };
    for (auto [sym, op] : ops) {
      if (at_symbol(sym)) {
        ++pos_;
        auto c = std::make_shared<Condition>();
        c->kind = Condition::Kind::compare;
        c->cmp = op;
        c->lhs = lhs;
        c->rhs = additive();
        return c;
      }
    }
    throw error_here("expected a comparison operator" + found());
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline std::string quote_single(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Placeholder and constraint entry points.

struct Placeholder {
  ExprPtr expr;
  FormatSpec format;
};

/// Parses the interior of a `{...}` placeholder: `expr [":" ".<n>f"]`.
inline Placeholder parse_placeholder(std::string_view source) {
  // Locate a top-level ':' outside string literals.
  std::size_t colon = std::string_view::npos;
  char quote = 0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const char c = source[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ':') {
      colon = i;
      break;
    }
  }
  Placeholder out;
  const std::string_view expr_src = source.substr(0, colon);
  out.expr = detail::ExprParser(expr_src).parse_full_expression();
  if (colon != std::string_view::npos) {
    const std::string_view spec = source.substr(colon + 1);
    const bool well_formed = spec.size() == 3 && spec[0] == '.' && spec[2] == 'f' && spec[1] >= '0' &&
                             spec[1] <= '0' + kMaxFixedDecimals;
    if (!well_formed) {
      auto [line, col] = detail::line_col(source, colon + 1);
      throw TemplateError(TemplateError::Kind::bad_format_spec,
                          "bad format spec '" + std::string(spec) + "' (expected .0f through .6f)", line, col,
                          std::string(spec));
    }
    out.format.decimals = spec[1] - '0';
  }
  return out;
}

inline ConditionPtr parse_constraint(std::string_view source) {
  return detail::ExprParser(source).parse_full_condition();
}

inline std::string to_string(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::ref: return e->name;
    case Expr::Kind::literal: return format_default(e->value);
    case Expr::Kind::binary:
      return to_string(e->lhs) + " " + op_symbol(e->op) + " " + to_string(e->rhs);
    case Expr::Kind::negate: return "-" + to_string(e->lhs);
    case Expr::Kind::paren: return "(" + to_string(e->lhs) + ")";
    case Expr::Kind::split:
      return to_string(e->lhs) + ".split(" + detail::quote_single(e->delimiter) + ")[" +
             std::to_string(e->index) + "]";
    case Expr::Kind::sanitize: return to_string(e->lhs) + ".sanitize()";
  }
  return {};
}

inline std::string to_string(const ConditionPtr& c) {
  switch (c->kind) {
    case Condition::Kind::compare:
      return to_string(c->lhs) + " " + std::string(cmp_symbol(c->cmp)) + " " + to_string(c->rhs);
    case Condition::Kind::conjunction: return to_string(c->children[0]) + " and " + to_string(c->children[1]);
    case Condition::Kind::disjunction: return to_string(c->children[0]) + " or " + to_string(c->children[1]);
    case Condition::Kind::negation: return "not " + to_string(c->children[0]);
    case Condition::Kind::group: return "(" + to_string(c->children[0]) + ")";
  }
  return {};
}

inline std::string to_string(const Placeholder& p) {
  std::string s = to_string(p.expr);
  if (p.format.decimals) s += ":." + std::to_string(*p.format.decimals) + "f";
  return s;
}

// ---------------------------------------------------------------------------
// Template text: literal runs and `{...}` placeholders.

struct LiteralSegment {
  std::string source;  // as written, with `{{` / `}}` escapes
  std::string text;    // unescaped
};

struct PlaceholderSegment {
  std::string source;  // interior of the braces, as written
  Placeholder placeholder;
  std::size_t offset = 0;  // byte offset of the opening brace
};

struct Segment {
  bool is_placeholder = false;
  LiteralSegment literal;
  PlaceholderSegment placeholder;
};

struct TemplateText {
  std::vector<Segment> segments;

  /// Concatenates the segments as written; equals the parsed source.
  std::string source() const {
    std::string out;
    for (const auto& s : segments) {
      if (s.is_placeholder) {
        out += '{';
        out += s.placeholder.source;
        out += '}';
      } else {
        out += s.literal.source;
      }
    }
    return out;
  }

  /// Re-renders the source from the AST in canonical spelling.
  std::string canonical_source() const {
    std::string out;
    for (const auto& s : segments) {
      if (s.is_placeholder) {
        out += '{' + to_string(s.placeholder.placeholder) + '}';
      } else {
        for (char c : s.literal.text) {
          out += c;
          if (c == '{' || c == '}') out += c;
        }
      }
    }
    return out;
  }
};

inline bool same_structure(const TemplateText& a, const TemplateText& b) {
  if (a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    const Segment& x = a.segments[i];
    const Segment& y = b.segments[i];
    if (x.is_placeholder != y.is_placeholder) return false;
    if (x.is_placeholder) {
      if (!same_structure(x.placeholder.placeholder.expr, y.placeholder.placeholder.expr) ||
          x.placeholder.placeholder.format != y.placeholder.placeholder.format) {
        return false;
      }
    } else if (x.literal.text != y.literal.text) {
      return false;
    }
  }
  return true;
}

/// Parses text with `{expr[:fmt]}` placeholders; `{{` and `}}` are literal
/// braces. Error positions are relative to `source`.
inline TemplateText parse_template_text(std::string_view source) {
  TemplateText out;
  LiteralSegment pending;
  auto flush = [&] {
    if (pending.source.empty()) return;
    Segment s;
    s.literal = std::move(pending);
    out.segments.push_back(std::move(s));
    pending = {};
  };
  std::size_t i = 0;
  while (i < source.size()) {
    const char c = source[i];
    if (c == '{' && i + 1 < source.size() && source[i + 1] == '{') {
      pending.source += "{{";
      pending.text += '{';
      i += 2;
    } else if (c == '}' && i + 1 < source.size() && source[i + 1] == '}') {
      pending.source += "}}";
      pending.text += '}';
      i += 2;
    } else if (c == '}') {
      throw detail::syntax_at(source, i, "unmatched '}' (write '}}' for a literal brace)");
    } else if (c == '{') {
      std::size_t j = i + 1;
      char quote = 0;
      bool closed = false;
      for (; j < source.size(); ++j) {
        const char d = source[j];
        if (quote) {
          if (d == '\\') {
            ++j;
          } else if (d == quote) {
            quote = 0;
          }
        } else if (d == '\'' || d == '"') {
          quote = d;
        } else if (d == '{') {
          break;
        } else if (d == '}') {
          closed = true;
          break;
        }
      }
      if (!closed) throw detail::syntax_at(source, i, "unbalanced '{' in template text");
      const std::string_view interior = source.substr(i + 1, j - i - 1);
      Placeholder ph;
      try {
        ph = parse_placeholder(interior);
      } catch (const TemplateError& e) {
        // Re-anchor the position from the placeholder to the whole text.
        std::size_t rel = 0;
        if (e.line() != 0) {
          std::size_t line = 1;
          for (std::size_t k = 0; k < interior.size() && line < e.line(); ++k) {
            if (interior[k] == '\n') {
              ++line;
              rel = k + 1;
            }
          }
          rel += e.column() - 1;
        }
        auto [line, col] = detail::line_col(source, i + 1 + rel);
        std::string msg = e.what();
        if (e.line() != 0) msg = msg.substr(msg.find(": ") + 2);
        throw TemplateError(e.kind(), msg + " in placeholder '{" + std::string(interior) + "}'", line, col,
                            e.name());
      }
      flush();
      Segment s;
      s.is_placeholder = true;
      s.placeholder.source = std::string(interior);
      s.placeholder.placeholder = std::move(ph);
      s.placeholder.offset = i;
      out.segments.push_back(std::move(s));
      i = j + 1;
    } else {
      pending.source += c;
      pending.text += c;
      ++i;
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Meta-template.

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct Choice {
  std::vector<Number> values;
};

struct FloatChoice {
  std::vector<double> values;
};

struct ParamSpec {
  enum class Domain { int_range, choice, float_choice };

  std::string name;
  Domain domain = Domain::int_range;
  IntRange range;
  Choice choice;
  FloatChoice float_choice;

  bool contains(const Number& v) const {
    switch (domain) {
      case Domain::int_range: return v.is_int() && v.as_int() >= range.lo && v.as_int() <= range.hi;
      case Domain::choice:
        for (const auto& c : choice.values) {
          if (c == v) return true;
        }
        return false;
      case Domain::float_choice:
        if (v.is_int()) return false;
        for (double d : float_choice.values) {
          if (Number::real(d) == v) return true;
        }
        return false;
    }
    return false;
  }
};

struct LexiconSlot {
  std::string name;
  std::string category;
};

struct Constraint {
  std::string source;
  ConditionPtr root;
};

enum class Target { problem, nl_solution, code_solution };

inline std::string_view target_name(Target t) {
  switch (t) {
    case Target::problem: return "problem_template";
    case Target::nl_solution: return "nl_solution_template";
    case Target::code_solution: return "code_solution_template";
  }
  return "?";
}

struct MetaTemplate {
  std::string id;
  std::vector<ParamSpec> params;
  std::vector<LexiconSlot> lexicon_slots;
  std::optional<Constraint> constraint;
  TemplateText problem_template;
  TemplateText nl_solution_template;
  TemplateText code_solution_template;

  const TemplateText& text(Target t) const {
    switch (t) {
      case Target::problem: return problem_template;
      case Target::nl_solution: return nl_solution_template;
      case Target::code_solution: return code_solution_template;
    }
    return problem_template;
  }

  const ParamSpec* find_param(std::string_view name) const {
    for (const auto& p : params) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  const LexiconSlot* find_slot(std::string_view name) const {
    for (const auto& s : lexicon_slots) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

inline constexpr Target kAllTargets[] = {Target::problem, Target::nl_solution, Target::code_solution};

inline bool same_structure(const MetaTemplate& a, const MetaTemplate& b) {
  if (a.id != b.id || a.params.size() != b.params.size() || a.lexicon_slots.size() != b.lexicon_slots.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    const ParamSpec& x = a.params[i];
    const ParamSpec& y = b.params[i];
    if (x.name != y.name || x.domain != y.domain) return false;
    switch (x.domain) {
      case ParamSpec::Domain::int_range:
        if (x.range.lo != y.range.lo || x.range.hi != y.range.hi) return false;
        break;
      case ParamSpec::Domain::choice:
        if (x.choice.values != y.choice.values) return false;
        break;
      case ParamSpec::Domain::float_choice:
        if (x.float_choice.values.size() != y.float_choice.values.size()) return false;
        for (std::size_t k = 0; k < x.float_choice.values.size(); ++k) {
          if (!(Number::real(x.float_choice.values[k]) == Number::real(y.float_choice.values[k]))) return false;
        }
        break;
    }
  }
  for (std::size_t i = 0; i < a.lexicon_slots.size(); ++i) {
    if (a.lexicon_slots[i].name != b.lexicon_slots[i].name ||
        a.lexicon_slots[i].category != b.lexicon_slots[i].category) {
      return false;
    }
  }
  if (a.constraint.has_value() != b.constraint.has_value()) return false;
  if (a.constraint && !same_structure(a.constraint->root, b.constraint->root)) return false;
  for (Target t : kAllTargets) {
    if (!same_structure(a.text(t), b.text(t))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Reference validation and type checking.

struct Violation {
  enum class Kind { undeclared_reference, type_mismatch };

  Kind kind = Kind::undeclared_reference;
  std::string name;      // offending symbol (or method) name
  std::string location;  // field the violation was found in
  std::string message;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.kind == b.kind && a.name == b.name;
  }
};

namespace detail {

enum class ValueType { numeric, text, unknown };

class ReferenceChecker {
 public:
  ReferenceChecker(const MetaTemplate& tpl, std::vector<Violation>& out) : tpl_(tpl), out_(out) {}

  ValueType infer(const ExprPtr& e, std::string_view where, bool params_only) {
    switch (e->kind) {
      case Expr::Kind::ref: {
        if (tpl_.find_param(e->name)) return ValueType::numeric;
        if (!params_only && tpl_.find_slot(e->name)) return ValueType::text;
        report(Violation::Kind::undeclared_reference, e->name, where,
               params_only ? "constraint refers to undeclared parameter '" + e->name + "'"
                           : "reference to undeclared name '" + e->name + "'");
        return ValueType::unknown;
      }
      case Expr::Kind::literal: return ValueType::numeric;
      case Expr::Kind::binary: {
        const ValueType l = infer(e->lhs, where, params_only);
        const ValueType r = infer(e->rhs, where, params_only);
        if (l == ValueType::text || r == ValueType::text) {
          report(Violation::Kind::type_mismatch, std::string(1, op_symbol(e->op)), where,
                 "arithmetic applied to a text operand");
        }
        return ValueType::numeric;
      }
      case Expr::Kind::negate:
        if (infer(e->lhs, where, params_only) == ValueType::text) {
          report(Violation::Kind::type_mismatch, "-", where, "negation applied to a text operand");
        }
        return ValueType::numeric;
      case Expr::Kind::paren: return infer(e->lhs, where, params_only);
      case Expr::Kind::split:
      case Expr::Kind::sanitize: {
        const char* method = e->kind == Expr::Kind::split ? "split" : "sanitize";
        if (params_only) {
          report(Violation::Kind::type_mismatch, method, where, "text methods are not allowed in constraints");
        }
        if (infer(e->lhs, where, params_only) == ValueType::numeric) {
          report(Violation::Kind::type_mismatch, method, where,
                 std::string(method) + "() applied to a numeric operand");
        }
        return ValueType::text;
      }
    }
    return ValueType::unknown;
  }

  void check(const ConditionPtr& c, std::string_view where) {
    if (c->kind == Condition::Kind::compare) {
      infer(c->lhs, where, true);
      infer(c->rhs, where, true);
      return;
    }
    for (const auto& child : c->children) check(child, where);
  }

 private:
  void report(Violation::Kind kind, std::string name, std::string_view where, std::string message) {
    Violation v{kind, std::move(name), std::string(where), std::move(message)};
    for (const auto& existing : out_) {
      if (existing == v) return;
    }
    out_.push_back(std::move(v));
  }

  const MetaTemplate& tpl_;
  std::vector<Violation>& out_;
};

}  // namespace detail

/// Returns every unresolved reference and type error in `tpl`, each
/// (kind, name) reported once. Empty means the template is well-formed.
inline std::vector<Violation> validate_references(const MetaTemplate& tpl) {
  std::vector<Violation> out;
  detail::ReferenceChecker checker(tpl, out);
  if (tpl.constraint) checker.check(tpl.constraint->root, "constraint");
  for (Target t : kAllTargets) {
    for (const auto& seg : tpl.text(t).segments) {
      if (seg.is_placeholder) checker.infer(seg.placeholder.placeholder.expr, target_name(t), false);
    }
  }
  return out;
}

}  // namespace tdg
