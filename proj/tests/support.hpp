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

// Shared fixtures, independent oracles and property generators for the
// unit suites and the acceptance binary.

#include <bit>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdg/tdg.hpp"

namespace tdg::testing {

inline std::filesystem::path data_dir() { return TDG_DATA_DIR; }
inline std::filesystem::path docs_dir() { return TDG_DOCS_DIR; }
inline std::filesystem::path template_dir() { return data_dir() / "templates"; }
inline std::filesystem::path broken_dir() { return data_dir() / "broken"; }

inline std::string emily_source() { return read_file(template_dir() / "01_emily_apples.tdg.json"); }
inline std::string sales_source() { return read_file(template_dir() / "02_two_month_sales.tdg.json"); }
inline MetaTemplate emily() { return parse_template(emily_source()); }
inline Lexicon bundled_lexicon() { return load_lexicon_file(data_dir() / "lexicon.json"); }

/// Binding behind the worked example: 15 apples, 3 times more, 5 given away.
inline Binding emily_binding() {
  Binding b;
  b.params = {{"initial", Number::integer(15)}, {"multiplier", Number::integer(3)}, {"given", Number::integer(5)}};
  b.slots = {{"name", "Emily"}, {"item", "apples"}};
  return b;
}

inline Lexicon small_lexicon() {
  Lexicon lex;
  lex.add_category("first_name", {"Emily", "Liam", "Ava"});
  lex.add_category("item", {"apples", "granny smith apples", "pears"});
  lex.add_category("month_pair", {"January and February", "June and July"});
  return lex;
}

inline std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tdg_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

// ---------------------------------------------------------------------------
// Brute-force evaluator for the solution language. Shares nothing with the
// library: it splits lines by hand, converts each expression to postfix
// with a shunting-yard pass and evaluates the postfix form with 128-bit
// overflow checks.

namespace oracle {

struct Value {
  bool is_int = true;
  std::int64_t i = 0;
  double d = 0.0;
};

inline bool same_bits(const Value& v, const Number& n) {
  if (v.is_int != n.is_int()) return false;
  if (v.is_int) return v.i == n.as_int();
  const double x = n.as_double();
  return std::memcmp(&x, &v.d, sizeof x) == 0;
}

struct Outcome {
  std::string error;  // empty on success: undefined, div0, overflow, nonfinite, missing, syntax
  Value result;
  std::int64_t rounded = 0;
  std::map<std::string, Value> env;
};

inline std::optional<std::int64_t> round_even(double x) {
  const int old = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x);
  std::fesetround(old);
  if (!(r > -9.3e18 && r < 9.3e18)) return std::nullopt;
  const long double lr = r;
  if (lr >= 9223372036854775808.0L || lr < -9223372036854775808.0L) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

inline Outcome run(const std::string& source) {
  Outcome out;
  std::map<std::string, Value>& env = out.env;
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : source) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    lines.push_back(cur);
  }
  struct Tok {
    char kind;  // 'n' number, 'v' variable, 'u' unary minus, or one of + - * / ( )
    Value num;
    std::string name;
  };
  auto prec = [](char op) { return op == 'u' ? 3 : (op == '*' || op == '/') ? 2 : 1; };
  for (std::string line : lines) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) return Outcome{"syntax", {}, 0, {}};
    std::string target = line.substr(0, eq);
    target.erase(0, target.find_first_not_of(" \t"));
    target.erase(target.find_last_not_of(" \t") + 1);
    const std::string rhs = line.substr(eq + 1);
    // Tokenize.
    std::vector<Tok> toks;
    for (std::size_t i = 0; i < rhs.size();) {
      const char c = rhs[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        bool flt = false;
        while (j < rhs.size() && std::isdigit(static_cast<unsigned char>(rhs[j]))) ++j;
        if (j < rhs.size() && rhs[j] == '.') {
          flt = true;
          ++j;
          while (j < rhs.size() && std::isdigit(static_cast<unsigned char>(rhs[j]))) ++j;
        }
        if (j < rhs.size() && (rhs[j] == 'e' || rhs[j] == 'E')) {
          flt = true;
          ++j;
          if (rhs[j] == '+' || rhs[j] == '-') ++j;
          while (j < rhs.size() && std::isdigit(static_cast<unsigned char>(rhs[j]))) ++j;
        }
        Tok t{'n', {}, {}};
        const std::string text = rhs.substr(i, j - i);
        if (flt) {
          t.num.is_int = false;
          t.num.d = std::strtod(text.c_str(), nullptr);
        } else {
          t.num.i = std::stoll(text);
        }
        toks.push_back(t);
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < rhs.size() && (std::isalnum(static_cast<unsigned char>(rhs[j])) || rhs[j] == '_')) ++j;
        toks.push_back({'v', {}, rhs.substr(i, j - i)});
        i = j;
      } else {
        char k = c;
        if (c == '-' && (toks.empty() || (toks.back().kind != 'n' && toks.back().kind != 'v' && toks.back().kind != ')'))) {
          k = 'u';
        }
        toks.push_back({k, {}, {}});
        ++i;
      }
    }
    // Shunting-yard to postfix. Unary minus is right-associative.
    std::vector<Tok> postfix, ops;
    for (const Tok& t : toks) {
      if (t.kind == 'n' || t.kind == 'v') {
        postfix.push_back(t);
      } else if (t.kind == '(') {
        ops.push_back(t);
      } else if (t.kind == ')') {
        while (!ops.empty() && ops.back().kind != '(') {
          postfix.push_back(ops.back());
          ops.pop_back();
        }
        if (ops.empty()) return Outcome{"syntax", {}, 0, {}};
        ops.pop_back();
      } else if (t.kind == 'u') {
        ops.push_back(t);
      } else {
        while (!ops.empty() && ops.back().kind != '(' && prec(ops.back().kind) >= prec(t.kind)) {
          postfix.push_back(ops.back());
          ops.pop_back();
        }
        ops.push_back(t);
      }
    }
    while (!ops.empty()) {
      postfix.push_back(ops.back());
      ops.pop_back();
    }
    // Evaluate.
    std::vector<Value> st;
    auto fail = [&](const char* e) {
      Outcome o;
      o.error = e;
      return o;
    };
    for (const Tok& t : postfix) {
      if (t.kind == 'n') {
        st.push_back(t.num);
      } else if (t.kind == 'v') {
        auto it = env.find(t.name);
        if (it == env.end()) return fail("undefined");
        st.push_back(it->second);
      } else if (t.kind == 'u') {
        Value a = st.back();
        if (a.is_int) {
          if (a.i == INT64_MIN) return fail("overflow");
          a.i = -a.i;
        } else {
          a.d = -a.d;
        }
        st.back() = a;
      } else {
        const Value b = st.back();
        st.pop_back();
        const Value a = st.back();
        st.pop_back();
        Value r;
        if (a.is_int && b.is_int && t.kind != '/') {
          __int128 x = a.i, y = b.i, z = 0;
          if (t.kind == '+') z = x + y;
          if (t.kind == '-') z = x - y;
          if (t.kind == '*') z = x * y;
          if (z > INT64_MAX || z < INT64_MIN) return fail("overflow");
          r.i = static_cast<std::int64_t>(z);
        } else {
          const double x = a.is_int ? static_cast<double>(a.i) : a.d;
          const double y = b.is_int ? static_cast<double>(b.i) : b.d;
          r.is_int = false;
          if (t.kind == '+') r.d = x + y;
          if (t.kind == '-') r.d = x - y;
          if (t.kind == '*') r.d = x * y;
          if (t.kind == '/') {
            if (y == 0.0) return fail("div0");
            r.d = x / y;
          }
          if (std::isnan(r.d) || std::isinf(r.d)) return fail("nonfinite");
        }
        st.push_back(r);
      }
    }
    env[target] = st.back();
  }
  auto it = env.find("result");
  if (it == env.end()) {
    Outcome o;
    o.error = "missing";
    return o;
  }
  out.result = it->second;
  if (out.result.is_int) {
    out.rounded = out.result.i;
  } else {
    auto r = round_even(out.result.d);
    if (!r) {
      Outcome o;
      o.error = "overflow";
      return o;
    }
    out.rounded = *r;
  }
  return out;
}

inline std::string error_name(sol::ExecError::Kind k) {
  switch (k) {
    case sol::ExecError::Kind::undefined_variable: return "undefined";
    case sol::ExecError::Kind::division_by_zero: return "div0";
    case sol::ExecError::Kind::int_overflow: return "overflow";
    case sol::ExecError::Kind::non_finite_result: return "nonfinite";
    case sol::ExecError::Kind::missing_result: return "missing";
    case sol::ExecError::Kind::budget_exceeded: return "budget";
  }
  return "?";
}

/// Empty string when the library and the oracle agree on `source`.
inline std::string compare_with_interpreter(const std::string& source) {
  const Outcome want = run(source);
  std::string got_error;
  sol::ExecOutcome got;
  try {
    got = sol::execute(sol::parse_program(source));
  } catch (const sol::SyntaxError&) {
    got_error = "syntax";
  } catch (const sol::ExecError& e) {
    got_error = error_name(e.kind());
  }
  if (got_error != want.error) return "error '" + got_error + "' vs oracle '" + want.error + "'";
  if (!want.error.empty()) return {};
  if (!same_bits(want.result, got.result_raw)) return "result_raw differs: " + format_default(got.result_raw);
  if (want.rounded != got.result_rounded) return "result_rounded differs";
  if (want.env.size() != got.env.size()) return "environment size differs";
  for (const auto& [k, v] : want.env) {
    auto it = got.env.find(k);
    if (it == got.env.end() || !same_bits(v, it->second)) return "variable '" + k + "' differs";
  }
  return {};
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Property generators. All randomness comes from std::mt19937_64 so the
// generators do not depend on the library RNG.

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<std::int64_t>(v.size()) - 1))];
  }
  std::string space() { return chance(0.3) ? (chance(0.5) ? "  " : "") : " "; }

  // -- solution programs -----------------------------------------------------

  std::string program_literal() {
    static const std::vector<std::string> floats = {"0.5", "0.25", "1.5", "2.0", "3.75", "0.1", "1e3", "2.5e-1", "7.125"};
    if (chance(0.02)) return "4611686018427387904";
    if (chance(0.25)) return pick(floats);
    return std::to_string(range(0, 30));
  }

  std::string program_expr(const std::vector<std::string>& vars, int depth) {
    const int roll = static_cast<int>(range(0, 9));
    if (depth <= 0 || roll < 3) {
      if (!vars.empty() && chance(0.6)) return chance(0.01) ? "undefined_name" : pick(vars);
      return program_literal();
    }
    if (roll == 3) return "-" + program_expr(vars, depth - 1);
    if (roll == 4) return "(" + space() + program_expr(vars, depth - 1) + space() + ")";
    static const std::vector<std::string> ops = {"+", "-", "*", "/"};
    return program_expr(vars, depth - 1) + space() + pick(ops) + space() + program_expr(vars, depth - 1);
  }

  /// Random straight-line program, occasionally with faults.
  std::string program() {
    std::vector<std::string> vars;
    std::string src;
    const int n = static_cast<int>(range(1, 8));
    for (int i = 0; i < n; ++i) {
      if (chance(0.15)) src += "# step " + std::to_string(i) + "\n";
      if (chance(0.1)) src += "\n";
      std::string name = chance(0.2) && !vars.empty() ? pick(vars) : "v" + std::to_string(i);
      src += (chance(0.1) ? "    " : "") + name + space() + "=" + space() + program_expr(vars, 3);
      if (chance(0.1)) src += "  # note";
      src += "\n";
      vars.push_back(name);
    }
    if (!chance(0.02)) src += "result = " + program_expr(vars, 2) + "\n";
    return src;
  }

  // -- templates -------------------------------------------------------------

  static int precedence(const ExprPtr& e) {
    if (e->kind != Expr::Kind::binary) return 3;
    return (e->op == BinaryOp::add || e->op == BinaryOp::sub) ? 1 : 2;
  }

  ExprPtr paren(ExprPtr e) { return Expr::make_unary(Expr::Kind::paren, std::move(e)); }

  ExprPtr numeric_expr(const std::vector<std::string>& params, int depth) {
    const int roll = static_cast<int>(range(0, 9));
    if (depth <= 0 || roll < 3) {
      if (!params.empty() && chance(0.6)) return Expr::make_ref(pick(params));
      if (chance(0.3)) {
        static const std::vector<double> fl = {0.5, 2.25, 100.0, 1e22, 0.125, 3.5};
        return Expr::make_literal(Number::real(pick(fl)));
      }
      return Expr::make_literal(Number::integer(range(0, 1000)));
    }
    if (roll == 3) {
      ExprPtr inner = numeric_expr(params, depth - 1);
      if (inner->kind == Expr::Kind::binary) inner = paren(inner);
      return Expr::make_unary(Expr::Kind::negate, inner);
    }
    if (roll == 4) return paren(numeric_expr(params, depth - 1));
    static const std::vector<BinaryOp> ops = {BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div};
    const BinaryOp op = pick(ops);
    const int p = (op == BinaryOp::add || op == BinaryOp::sub) ? 1 : 2;
    ExprPtr l = numeric_expr(params, depth - 1);
    ExprPtr r = numeric_expr(params, depth - 1);
    if (precedence(l) < p) l = paren(l);
    if (precedence(r) <= p) r = paren(r);
    return Expr::make_binary(op, l, r);
  }

  ExprPtr text_expr(const std::vector<std::string>& slots) {
    static const std::vector<std::string> delims = {" and ", " ", "-", "\"", ", "};
    ExprPtr e = Expr::make_ref(pick(slots));
    if (chance(0.4)) e = Expr::make_split(e, pick(delims), range(0, 2));
    if (chance(0.4)) e = Expr::make_unary(Expr::Kind::sanitize, e);
    return e;
  }

  // Independent printer with random spacing.
  std::string print(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::ref: return e->name;
      case Expr::Kind::literal:
        if (e->value.is_int()) return std::to_string(e->value.as_int());
        if (e->value.as_double() == 1e22) return chance(0.5) ? "1e22" : "1E+22";
        if (e->value.as_double() == 100.0) return chance(0.5) ? "100.0" : "1e2";
        return format_shortest(e->value.as_double());
      case Expr::Kind::binary:
        return print(e->lhs) + space() + op_symbol(e->op) + space() + print(e->rhs);
      case Expr::Kind::negate: return "-" + print(e->lhs);
      case Expr::Kind::paren: return "(" + space() + print(e->lhs) + space() + ")";
      case Expr::Kind::split: {
        std::string q = e->delimiter.find('"') != std::string::npos ? "'" : (chance(0.5) ? "'" : "\"");
        return print(e->lhs) + ".split(" + q + e->delimiter + q + ")[" + std::to_string(e->index) + "]";
      }
      case Expr::Kind::sanitize: return print(e->lhs) + ".sanitize()";
    }
    return {};
  }

  ConditionPtr condition(const std::vector<std::string>& params, int depth) {
    auto make = [](Condition::Kind k, std::vector<ConditionPtr> children) {
      auto c = std::make_shared<Condition>();
      c->kind = k;
      c->children = std::move(children);
      return ConditionPtr(c);
    };
    auto group = [&](ConditionPtr c) { return make(Condition::Kind::group, {std::move(c)}); };
    const int roll = static_cast<int>(range(0, 5));
    if (depth <= 0 || roll < 2) {
      auto c = std::make_shared<Condition>();
      c->kind = Condition::Kind::compare;
      c->cmp = static_cast<CmpOp>(range(0, 5));
      c->lhs = numeric_expr(params, 2);
      c->rhs = numeric_expr(params, 2);
      return c;
    }
    if (roll == 2) {
      ConditionPtr inner = condition(params, depth - 1);
      if (inner->kind == Condition::Kind::conjunction || inner->kind == Condition::Kind::disjunction) inner = group(inner);
      return make(Condition::Kind::negation, {inner});
    }
    if (roll == 3) return group(condition(params, depth - 1));
    const bool is_and = roll == 4;
    ConditionPtr l = condition(params, depth - 1);
    ConditionPtr r = condition(params, depth - 1);
    // `and` binds tighter than `or`; both associate to the left.
    if (is_and && l->kind == Condition::Kind::disjunction) l = group(l);
    if (r->kind == Condition::Kind::disjunction || (is_and && r->kind == Condition::Kind::conjunction) ||
        (!is_and && r->kind == Condition::Kind::disjunction)) {
      r = group(r);
    }
    if (!is_and && r->kind == Condition::Kind::conjunction && chance(0.5)) r = group(r);
    return make(is_and ? Condition::Kind::conjunction : Condition::Kind::disjunction, {l, r});
  }

  std::string print(const ConditionPtr& c) {
    static const char* syms[] = {"<", "<=", "==", "!=", ">=", ">"};
    switch (c->kind) {
      case Condition::Kind::compare: {
        std::string sym = syms[static_cast<int>(c->cmp)];
        if (c->cmp == CmpOp::eq && chance(0.5)) sym = "=";
        return print(c->lhs) + space() + sym + space() + print(c->rhs);
      }
      case Condition::Kind::conjunction: return print(c->children[0]) + " and " + print(c->children[1]);
      case Condition::Kind::disjunction: return print(c->children[0]) + " or " + print(c->children[1]);
      case Condition::Kind::negation: return "not " + print(c->children[0]);
      case Condition::Kind::group: return "(" + print(c->children[0]) + ")";
    }
    return {};
  }

  struct GeneratedText {
    std::string source;
    std::vector<Placeholder> placeholders;  // in order
  };

  GeneratedText text(const std::vector<std::string>& params, const std::vector<std::string>& slots) {
    static const std::vector<std::string> literals = {"Emily has ", " apples.", " and ", "$", " \\times ", "{{", "}}",
                                                      "\n", "café ", "% off", " = ", "\"quoted\" ", "x", "\t"};
    GeneratedText out;
    const int n = static_cast<int>(range(1, 7));
    for (int i = 0; i < n; ++i) {
      if (chance(0.5)) {
        out.source += pick(literals);
        continue;
      }
      Placeholder p;
      if (!slots.empty() && chance(0.3)) {
        p.expr = text_expr(slots);
      } else {
        p.expr = numeric_expr(params, 3);
        if (chance(0.3)) p.format.decimals = static_cast<int>(range(0, kMaxFixedDecimals));
      }
      out.source += "{" + space() + print(p.expr);
      if (p.format.decimals) out.source += ":." + std::to_string(*p.format.decimals) + "f";
      out.source += "}";
      out.placeholders.push_back(p);
    }
    return out;
  }

  struct GeneratedTemplate {
    std::string source;  // JSON
    std::optional<ConditionPtr> constraint;
    std::vector<GeneratedText> texts;  // problem, nl, code
  };

  GeneratedTemplate template_source(int serial) {
    GeneratedTemplate out;
    nlohmann::ordered_json j;
    j["id"] = "prop_" + std::to_string(serial);
    std::vector<std::string> params, slots;
    nlohmann::ordered_json pj = nlohmann::ordered_json::array();
    const int np = static_cast<int>(range(0, 4));
    for (int i = 0; i < np; ++i) {
      const std::string name = "p" + std::to_string(i) + (chance(0.5) ? "_amount" : "");
      params.push_back(name);
      nlohmann::ordered_json p;
      p["name"] = name;
      const int kind = static_cast<int>(range(0, 2));
      if (kind == 0) {
        const auto lo = range(-50, 50);
        p["int_range"] = {lo, lo + range(0, 100)};
      } else if (kind == 1) {
        nlohmann::ordered_json c = nlohmann::ordered_json::array();
        for (int k = 0, m = static_cast<int>(range(1, 4)); k < m; ++k) {
          if (chance(0.3)) {
            c.push_back(0.5 * static_cast<double>(range(1, 9)));
          } else {
            c.push_back(range(-5, 20));
          }
        }
        p["choice"] = c;
      } else {
        nlohmann::ordered_json c = nlohmann::ordered_json::array();
        for (int k = 0, m = static_cast<int>(range(1, 4)); k < m; ++k) c.push_back(0.25 * static_cast<double>(range(1, 12)));
        p["float_choice"] = c;
      }
      pj.push_back(p);
    }
    j["params"] = pj;
    nlohmann::ordered_json sj = nlohmann::ordered_json::array();
    const int ns = static_cast<int>(range(0, 3));
    for (int i = 0; i < ns; ++i) {
      const std::string name = "s" + std::to_string(i);
      slots.push_back(name);
      sj.push_back({{"name", name}, {"category", chance(0.5) ? "item" : "month_pair"}});
    }
    j["lexicon_slots"] = sj;
    if (!params.empty() && chance(0.6)) {
      out.constraint = condition(params, 3);
      j["constraint"] = print(*out.constraint);
    } else {
      j["constraint"] = nullptr;
    }
    for (const char* key : {"problem_template", "nl_solution_template", "code_solution_template"}) {
      GeneratedText t = text(params, slots);
      j[key] = t.source;
      out.texts.push_back(std::move(t));
    }
    out.source = j.dump(2);
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

/// Checks that `source` parses, re-serializes from the AST, and parses to a
/// structurally equal template whose placeholders match the generator's
/// trees. Returns an empty string on success.
inline std::string template_round_trip(const Gen::GeneratedTemplate& g) {
  MetaTemplate first;
  try {
    first = parse_template(g.source);
  } catch (const std::exception& e) {
    return std::string("first parse failed: ") + e.what() + "\n" + g.source;
  }
  for (std::size_t t = 0; t < 3; ++t) {
    const auto& segs = first.text(kAllTargets[t]).segments;
    std::size_t k = 0;
    for (const auto& s : segs) {
      if (!s.is_placeholder) continue;
      if (k >= g.texts[t].placeholders.size()) return "extra placeholder in " + std::string(target_name(kAllTargets[t]));
      const Placeholder& want = g.texts[t].placeholders[k++];
      if (!same_structure(want.expr, s.placeholder.placeholder.expr) || !(want.format == s.placeholder.placeholder.format)) {
        return "placeholder mismatch: '" + s.placeholder.source + "'";
      }
    }
    if (k != g.texts[t].placeholders.size()) return "missing placeholder";
  }
  if (g.constraint && !same_structure(*g.constraint, first.constraint->root)) {
    return "constraint mismatch: " + first.constraint->source;
  }
  const std::string rendered = template_to_json(first);
  MetaTemplate second;
  try {
    second = parse_template(rendered);
  } catch (const std::exception& e) {
    return std::string("second parse failed: ") + e.what() + "\n" + rendered;
  }
  if (!same_structure(first, second)) return "structure changed after re-rendering:\n" + rendered;
  if (template_to_json(second) != rendered) return "rendering is not a fixed point";
  return {};
}

// ---------------------------------------------------------------------------
// Minimal JSON Schema validator: the keywords docs/record.schema.json uses.

inline int compare_numbers(const nlohmann::json& a, const nlohmann::json& b) {
  auto wide = [](const nlohmann::json& v) -> __int128 {
    return v.is_number_unsigned() ? static_cast<__int128>(v.get<std::uint64_t>()) : v.get<std::int64_t>();
  };
  if (a.is_number_integer() && b.is_number_integer()) {
    const __int128 x = wide(a), y = wide(b);
    return x < y ? -1 : x > y ? 1 : 0;
  }
  const double x = a.get<double>(), y = b.get<double>();
  return x < y ? -1 : x > y ? 1 : 0;
}

inline std::vector<std::string> schema_errors(const nlohmann::json& schema, const nlohmann::json& v,
                                              const std::string& at = "$") {
  std::vector<std::string> errs;
  auto err = [&](const std::string& m) { errs.push_back(at + ": " + m); };
  if (schema.contains("const") && v != schema["const"]) err("const mismatch");
  if (schema.contains("type")) {
    const std::string t = schema["type"];
    const bool ok = (t == "object" && v.is_object()) || (t == "string" && v.is_string()) ||
                    (t == "integer" && v.is_number_integer()) || (t == "boolean" && v.is_boolean()) ||
                    (t == "number" && v.is_number());
    if (!ok) {
      err("expected " + t);
      return errs;
    }
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (schema.contains("minLength") && s.size() < schema["minLength"].get<std::size_t>()) err("too short");
    if (schema.contains("pattern") && !std::regex_search(s, std::regex(schema["pattern"].get<std::string>()))) {
      err("pattern mismatch");
    }
  }
  if (v.is_number()) {
    if (schema.contains("minimum") && compare_numbers(v, schema["minimum"]) < 0) err("below minimum");
    if (schema.contains("maximum") && compare_numbers(v, schema["maximum"]) > 0) err("above maximum");
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto& k : schema["required"]) {
        if (!v.contains(k.get<std::string>())) err("missing " + k.get<std::string>());
      }
    }
    const auto& props = schema.contains("properties") ? schema["properties"] : nlohmann::json::object();
    for (const auto& [k, sub] : v.items()) {
      if (props.contains(k)) {
        auto more = schema_errors(props[k], sub, at + "." + k);
        errs.insert(errs.end(), more.begin(), more.end());
      } else if (schema.value("additionalProperties", true) == false) {
        err("unexpected property " + k);
      }
    }
  }
  return errs;
}

inline nlohmann::json record_schema() { return nlohmann::json::parse(read_file(docs_dir() / "record.schema.json")); }

/// Validates every non-blank line; returns the first error or "".
inline std::string validate_jsonl(const std::string& path, const nlohmann::json& schema, std::size_t* count = nullptr) {
  std::ifstream in(path);
  if (!in) return "cannot open " + path;
  std::string line;
  std::size_t n = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto errs = schema_errors(schema, nlohmann::json::parse(line));
    if (!errs.empty()) return "line " + std::to_string(line_no) + ": " + errs.front();
    ++n;
  }
  if (count) *count = n;
  return {};
}

}  // namespace tdg::testing
