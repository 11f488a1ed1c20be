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
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace tdg {

/// Tagged numeric value shared by templates, constraints and the solution
/// language. Floats are always finite once stored.
class Number {
 public:
  constexpr Number() = default;

  static constexpr Number integer(std::int64_t v) { return Number{v}; }
  static constexpr Number real(double v) { return Number{v, 0}; }

  constexpr bool is_int() const { return is_int_; }
  constexpr std::int64_t as_int() const { return int_; }
  constexpr double as_double() const {
    return is_int_ ? static_cast<double>(int_) : real_;
  }

  // Tag and value must match; floats compare bitwise so that -0.0 != 0.0
  // and the oracle checks stay bit-exact.
  friend bool operator==(const Number& a, const Number& b) {
    if (a.is_int_ != b.is_int_) return false;
    if (a.is_int_) return a.int_ == b.int_;
    return std::signbit(a.real_) == std::signbit(b.real_) && a.real_ == b.real_;
  }

 private:
  constexpr explicit Number(std::int64_t v) : is_int_(true), int_(v) {}
  constexpr Number(double v, int) : is_int_(false), real_(v) {}

  bool is_int_ = true;
  std::int64_t int_ = 0;
  double real_ = 0.0;
};

enum class BinaryOp { add, sub, mul, div };

inline char op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
  }
  return '?';
}

enum class ArithFault { none, division_by_zero, int_overflow, non_finite };

struct ArithResult {
  Number value;
  ArithFault fault = ArithFault::none;
};

/// Int op Int stays Int (checked) except division, which always yields a
/// Float. Anything touching a Float is computed in binary64.
inline ArithResult apply_binary(BinaryOp op, const Number& a, const Number& b) {
  if (a.is_int() && b.is_int() && op != BinaryOp::div) {
    std::int64_t out = 0;
    bool overflow = false;
    switch (op) {
      case BinaryOp::add: overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &out); break;
      case BinaryOp::sub: overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &out); break;
      case BinaryOp::mul: overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &out); break;
      case BinaryOp::div: break;
    }
    if (overflow) return {Number{}, ArithFault::int_overflow};
    return {Number::integer(out)};
  }
  const double x = a.as_double();
  const double y = b.as_double();
  double out = 0.0;
  switch (op) {
    case BinaryOp::add: out = x + y; break;
    case BinaryOp::sub: out = x - y; break;
    case BinaryOp::mul: out = x * y; break;
    case BinaryOp::div:
      if (y == 0.0) return {Number{}, ArithFault::division_by_zero};
      out = x / y;
      break;
  }
  if (!std::isfinite(out)) return {Number{}, ArithFault::non_finite};
  return {Number::real(out)};
}

inline ArithResult apply_negate(const Number& a) {
  if (a.is_int()) {
    std::int64_t out = 0;
    if (__builtin_sub_overflow(std::int64_t{0}, a.as_int(), &out)) {
      return {Number{}, ArithFault::int_overflow};
    }
    return {Number::integer(out)};
  }
  return {Number::real(-a.as_double())};
}

/// Round half to even. Returns nullopt when the rounded value does not fit
/// in a signed 64-bit integer.
inline std::optional<std::int64_t> round_half_even(const Number& v) {
  if (v.is_int()) return v.as_int();
  const double x = v.as_double();
  if (!std::isfinite(x)) return std::nullopt;
  double r = std::floor(x);
  const double diff = x - r;  // exact for |x| < 2^52; zero above
  if (diff > 0.5) {
    r += 1.0;
  } else if (diff == 0.5 && std::fmod(r, 2.0) != 0.0) {
    r += 1.0;
  }
  // 2^63 is exactly representable; anything at or above it overflows.
  if (r >= 9223372036854775808.0 || r < -9223372036854775808.0) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

/// Shortest round-trip decimal; always contains '.' or an exponent so that
/// reparsing yields a Float again.
inline std::string format_shortest(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string format_default(const Number& v) {
  if (v.is_int()) return std::to_string(v.as_int());
  return format_shortest(v.as_double());
}

/// Fixed-point rendering with `decimals` digits. Ties resolve half-to-even
/// against the exact binary value (printf semantics).
inline std::string format_fixed(const Number& v, int decimals) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v.as_double(), std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

/// Parses the numeric literal grammar shared by both languages:
///   digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ]
/// A literal without fraction or exponent is an Int. Returns nullopt for
/// anything else, including out-of-range values.
inline std::optional<Number> parse_number_literal(std::string_view text) {
  std::size_t i = 0;
  auto digits = [&] {
    const std::size_t start = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    return i > start;
  };
  if (!digits()) return std::nullopt;
  bool is_float = false;
  if (i < text.size() && text[i] == '.') {
    ++i;
    if (!digits()) return std::nullopt;
    is_float = true;
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
    if (!digits()) return std::nullopt;
    is_float = true;
  }
  if (i != text.size()) return std::nullopt;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!is_float) {
    std::int64_t v = 0;
    auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc{} || r.ptr != last) return std::nullopt;
    return Number::integer(v);
  }
  double d = 0.0;
  auto r = std::from_chars(first, last, d);
  if (r.ec != std::errc{} || r.ptr != last || !std::isfinite(d)) return std::nullopt;
  return Number::real(d);
}

/// Length of the longest numeric-literal prefix of `text` (0 if none).
inline std::size_t scan_number_literal(std::string_view text) {
  std::size_t i = 0;
  auto digits = [&](std::size_t from) {
    std::size_t j = from;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    return j;
  };
  i = digits(0);
  if (i == 0) return 0;
  if (i < text.size() && text[i] == '.') {
    const std::size_t j = digits(i + 1);
    if (j > i + 1) i = j;
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
    const std::size_t k = digits(j);
    if (k > j) i = k;
  }
  return i;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!alpha(c) && !digit(c)) return false;
  }
  return true;
}

}  // namespace tdg
