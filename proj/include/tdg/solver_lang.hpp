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

// Straight-line arithmetic solution language.
//
//   program    := { line }
//   line       := [ assignment ] [ comment ] newline
//   assignment := identifier "=" expr
//   expr       := term { ("+" | "-") term }
//   term       := unary { ("*" | "/") unary }
//   unary      := "-" unary | primary
//   primary    := number | identifier | "(" expr ")"
//   comment    := "#" { any character except newline }
//
// One statement per line; leading whitespace is ignored. There are no
// loops, branches, calls, strings or I/O, so every program terminates.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdg/numeric.hpp"

namespace tdg::sol {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { number, variable, negate, binary, paren };

  Kind kind = Kind::number;
  Number value;                 // number
  std::string name;             // variable
  BinaryOp op = BinaryOp::add;  // binary
  NodePtr lhs;                  // binary lhs; operand of negate/paren
  NodePtr rhs;

  static NodePtr number(Number v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::number;
    n->value = v;
    return n;
  }
  static NodePtr variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->name = std::move(name);
    return n;
  }
  static NodePtr unary(Kind kind, NodePtr operand) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(operand);
    return n;
  }
  static NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::binary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }
};

struct Assignment {
  std::string target;
  NodePtr expr;
  std::size_t line = 0;
};

struct Comment {
  std::size_t line = 0;
  std::string text;  // without the leading '#'
};

struct Program {
  std::vector<Assignment> statements;
  std::vector<Comment> comments;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ExecError : public std::runtime_error {
 public:
  enum class Kind { undefined_variable, division_by_zero, int_overflow, non_finite_result, missing_result, budget_exceeded };

  ExecError(Kind kind, std::size_t statement, const std::string& message)
      : std::runtime_error("statement " + std::to_string(statement) + ": " + message),
        kind_(kind),
        statement_(statement) {}

  Kind kind() const { return kind_; }
  /// Index of the failing statement; the statement count for errors raised
  /// after the last statement (missing or unroundable result).
  std::size_t statement() const { return statement_; }

 private:
  Kind kind_;
  std::size_t statement_;
};

struct ExecOutcome {
  std::map<std::string, Number> env;
  Number result_raw;
  std::int64_t result_rounded = 0;
  std::uint64_t steps_used = 0;
};

inline constexpr std::uint64_t kDefaultStepBudget = 10'000;
inline constexpr std::string_view kResultVariable = "result";

namespace detail {

inline bool is_reserved(std::string_view s) {
  static constexpr std::string_view words[] = {
      "False", "None",  "True",   "and",    "as",     "assert", "async",  "await",    "break",
      "class", "continue", "def", "del",    "elif",   "else",   "except", "finally",  "for",
      "from",  "global", "if",    "import", "in",     "is",     "lambda", "nonlocal", "not",
      "or",    "pass",  "raise",  "return", "try",    "while",  "with",   "yield",    "print"};
  for (auto w : words) {
    if (w == s) return true;
  }
  return false;
}

struct Tok {
  enum class Kind { ident, number, symbol, end };
  Kind kind = Kind::end;
  std::string text;
  Number number;
  std::size_t column = 0;
};

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line) : line_(line) { lex(text); }

  Assignment parse() {
    Assignment a;
    a.line = line_;
    if (peek().kind != Tok::Kind::ident) fail("expected an assignment target");
    if (is_reserved(peek().text)) {
      fail("'" + peek().text + "' is not allowed: only assignments of arithmetic expressions are supported");
    }
    a.target = advance().text;
    if (!at("=")) fail("expected '=' after '" + a.target + "'");
    ++pos_;
    a.expr = expr();
    if (peek().kind != Tok::Kind::end) fail("unexpected '" + peek().text + "' after expression");
    return a;
  }

 private:
  void lex(std::string_view s) {
    std::size_t i = 0;
    auto ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9'); };
    while (i < s.size()) {
      const char c = s[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      Tok t;
      t.column = i + 1;
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < s.size() && ident_char(s[j])) ++j;
        t.kind = Tok::Kind::ident;
        t.text = std::string(s.substr(i, j - i));
        i = j;
      } else if (c >= '0' && c <= '9') {
        const std::size_t len = scan_number_literal(s.substr(i));
        auto v = parse_number_literal(s.substr(i, len));
        if (!v) throw SyntaxError(line_, i + 1, "numeric literal out of range");
        if (i + len < s.size() && ident_char(s[i + len])) {
          throw SyntaxError(line_, i + len + 1, "malformed numeric literal");
        }
        t.kind = Tok::Kind::number;
        t.text = std::string(s.substr(i, len));
        t.number = *v;
        i += len;
      } else if (std::string_view("+-*/()=").find(c) != std::string_view::npos) {
        t.kind = Tok::Kind::symbol;
        t.text = std::string(1, c);
        ++i;
      } else {
        throw SyntaxError(line_, i + 1, std::string("unexpected character '") + c + "'");
      }
      toks_.push_back(std::move(t));
    }
    Tok end;
    end.column = s.size() + 1;
    toks_.push_back(end);
  }

  const Tok& peek() const { return toks_[pos_]; }
  const Tok& advance() { return toks_[pos_++]; }
  bool at(std::string_view sym) const { return peek().kind == Tok::Kind::symbol && peek().text == sym; }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, peek().column, msg); }

  NodePtr expr() {
    NodePtr lhs = term();
    while (at("+") || at("-")) {
      const BinaryOp op = advance().text == "+" ? BinaryOp::add : BinaryOp::sub;
      lhs = Node::binary(op, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (at("*") || at("/")) {
      const BinaryOp op = advance().text == "*" ? BinaryOp::mul : BinaryOp::div;
      lhs = Node::binary(op, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (at("-")) {
      ++pos_;
      return Node::unary(Node::Kind::negate, unary());
    }
    return primary();
  }

  NodePtr primary() {
    const Tok& t = peek();
    if (t.kind == Tok::Kind::number) {
      ++pos_;
      return Node::number(t.number);
    }
    if (t.kind == Tok::Kind::ident) {
      if (is_reserved(t.text)) fail("'" + t.text + "' is not allowed in expressions");
      ++pos_;
      return Node::variable(t.text);
    }
    if (at("(")) {
      ++pos_;
      NodePtr inner = expr();
      if (!at(")")) fail("expected ')'");
      ++pos_;
      return Node::unary(Node::Kind::paren, inner);
    }
    if (t.kind == Tok::Kind::end) fail("expected an expression, found end of line");
    fail("expected an expression, found '" + t.text + "'");
  }

  std::size_t line_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
};

class Interpreter {
 public:
  Interpreter(std::uint64_t budget, ExecOutcome& out) : budget_(budget), out_(out) {}

  Number eval(const NodePtr& n, std::size_t stmt) {
    if (out_.steps_used >= budget_) {
      throw ExecError(ExecError::Kind::budget_exceeded, stmt,
                      "step budget of " + std::to_string(budget_) + " exhausted");
    }
    ++out_.steps_used;
    switch (n->kind) {
      case Node::Kind::number: return n->value;
      case Node::Kind::variable: {
        const auto it = vars_.find(n->name);
        if (it == vars_.end()) {
          throw ExecError(ExecError::Kind::undefined_variable, stmt, "undefined variable '" + n->name + "'");
        }
        return it->second;
      }
      case Node::Kind::paren: return eval(n->lhs, stmt);
      case Node::Kind::negate: return check(apply_negate(eval(n->lhs, stmt)), stmt);
      case Node::Kind::binary: {
        const Number l = eval(n->lhs, stmt);
        const Number r = eval(n->rhs, stmt);
        return check(apply_binary(n->op, l, r), stmt);
      }
    }
    return {};
  }

  void assign(const std::string& name, Number v) {
    vars_[name] = v;
    out_.env[name] = v;
  }

  const Number* lookup(std::string_view name) const {
    const auto it = vars_.find(std::string(name));
    return it == vars_.end() ? nullptr : &it->second;
  }

 private:
  static Number check(const ArithResult& r, std::size_t stmt) {
    switch (r.fault) {
      case ArithFault::none: return r.value;
      case ArithFault::division_by_zero: throw ExecError(ExecError::Kind::division_by_zero, stmt, "division by zero");
      case ArithFault::int_overflow: throw ExecError(ExecError::Kind::int_overflow, stmt, "integer overflow");
      case ArithFault::non_finite: throw ExecError(ExecError::Kind::non_finite_result, stmt, "non-finite value");
    }
    return r.value;
  }

  std::uint64_t budget_;
  ExecOutcome& out_;
  std::unordered_map<std::string, Number> vars_;
};

}  // namespace detail

inline Program parse_program(std::string_view source) {
  Program prog;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    const std::size_t nl = source.find('\n', start);
    std::string_view line = source.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      prog.comments.push_back({line_no, std::string(line.substr(hash + 1))});
      line = line.substr(0, hash);
    }
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      prog.statements.push_back(detail::LineParser(line, line_no).parse());
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return prog;
}

/// Runs the program. Every expression node evaluated costs one step. The
/// variable `result` must be assigned; its value is rounded half-to-even.
inline ExecOutcome execute(const Program& prog, std::uint64_t step_budget = kDefaultStepBudget) {
  if (step_budget == 0) throw std::invalid_argument("step_budget must be at least 1");
  ExecOutcome out;
  detail::Interpreter interp(step_budget, out);
  for (std::size_t i = 0; i < prog.statements.size(); ++i) {
    const Assignment& a = prog.statements[i];
    interp.assign(a.target, interp.eval(a.expr, i));
  }
  const std::size_t end = prog.statements.size();
  const Number* result = interp.lookup(kResultVariable);
  if (!result) throw ExecError(ExecError::Kind::missing_result, end, "no value assigned to 'result'");
  out.result_raw = *result;
  const auto rounded = round_half_even(*result);
  if (!rounded) throw ExecError(ExecError::Kind::int_overflow, end, "result does not fit in a 64-bit integer");
  out.result_rounded = *rounded;
  return out;
}

namespace detail {

inline bool well_formed(const NodePtr& n) {
  if (!n) return false;
  switch (n->kind) {
    case Node::Kind::number: return n->value.is_int() || std::isfinite(n->value.as_double());
    case Node::Kind::variable: return is_identifier(n->name) && !is_reserved(n->name);
    case Node::Kind::negate:
    case Node::Kind::paren: return well_formed(n->lhs);
    case Node::Kind::binary: return well_formed(n->lhs) && well_formed(n->rhs);
  }
  return false;
}

}  // namespace detail

/// Static check for programs built outside parse_program: every statement
/// is an assignment to a valid identifier of a well-formed arithmetic tree.
/// Use-before-assignment is left to execute().
inline bool check_straight_line(const Program& prog) {
  for (const auto& a : prog.statements) {
    if (!is_identifier(a.target) || detail::is_reserved(a.target)) return false;
    if (!detail::well_formed(a.expr)) return false;
  }
  return true;
}

inline std::string to_source(const NodePtr& n) {
  switch (n->kind) {
    case Node::Kind::number: return format_default(n->value);
    case Node::Kind::variable: return n->name;
    case Node::Kind::negate: return "-" + to_source(n->lhs);
    case Node::Kind::paren: return "(" + to_source(n->lhs) + ")";
    case Node::Kind::binary: return to_source(n->lhs) + " " + op_symbol(n->op) + " " + to_source(n->rhs);
  }
  return {};
}

/// Statements only, one per line.
inline std::string to_source(const Program& prog) {
  std::string out;
  for (const auto& a : prog.statements) out += a.target + " = " + to_source(a.expr) + "\n";
  return out;
}

}  // namespace tdg::sol
