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

// JSONL dataset records and corpus statistics.
//
// Each line is one JSON object with the keys, in this order:
//   id, template_id, instance_index, seed, problem, solution_code,
//   solution_nl, result, verified
// No other keys are written or accepted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tdg/solver_lang.hpp"

namespace tdg {

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { io, schema, invariant_violation, empty_corpus };

  DatasetError(Kind kind, const std::string& message, std::size_t line = 0, std::string field = {})
      : std::runtime_error(message), kind_(kind), line_(line), field_(std::move(field)) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  /// Offending field for schema errors; record id for invariant violations.
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string field_;
};

struct DatasetRecord {
  std::string id;
  std::string template_id;
  std::uint64_t instance_index = 0;
  std::uint64_t seed = 0;
  std::string problem;
  std::string solution_code;
  std::string solution_nl;
  std::int64_t result = 0;
  bool verified = true;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

inline std::string record_id(std::string_view template_id, std::uint64_t index) {
  return std::string(template_id) + "#" + std::to_string(index);
}

inline constexpr std::string_view kRecordFields[] = {"id",      "template_id",   "instance_index",
                                                     "seed",    "problem",       "solution_code",
                                                     "solution_nl", "result",    "verified"};

/// Throws DatasetError(invariant_violation) naming the record id.
inline void check_record_invariants(const DatasetRecord& r) {
  auto fail = [&](const std::string& why) {
    throw DatasetError(DatasetError::Kind::invariant_violation, "record '" + r.id + "': " + why, 0, r.id);
  };
  if (!r.verified) fail("verified must be true");
  if (r.template_id.empty()) fail("template_id is empty");
  if (r.id != record_id(r.template_id, r.instance_index)) fail("id must be '<template_id>#<instance_index>'");
  if (r.problem.empty()) fail("problem is empty");
  if (r.solution_nl.empty()) fail("solution_nl is empty");
  try {
    const auto out = sol::execute(sol::parse_program(r.solution_code));
    if (out.result_rounded != r.result) {
      fail("result " + std::to_string(r.result) + " differs from re-execution " + std::to_string(out.result_rounded));
    }
  } catch (const DatasetError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("solution_code does not execute: ") + e.what());
  }
}

inline std::string record_to_json_line(const DatasetRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["template_id"] = r.template_id;
  j["instance_index"] = r.instance_index;
  j["seed"] = r.seed;
  j["problem"] = r.problem;
  j["solution_code"] = r.solution_code;
  j["solution_nl"] = r.solution_nl;
  j["result"] = r.result;
  j["verified"] = r.verified;
  return j.dump();
}

namespace detail {

inline DatasetError schema_error(std::size_t line, const std::string& field, const std::string& why) {
  return DatasetError(DatasetError::Kind::schema,
                      "line " + std::to_string(line) + ": field '" + field + "': " + why, line, field);
}

}  // namespace detail

inline DatasetRecord record_from_json_line(std::string_view text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw detail::schema_error(line, "<line>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw detail::schema_error(line, "<line>", "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kRecordFields), std::end(kRecordFields), key) == std::end(kRecordFields)) {
      throw detail::schema_error(line, key, "unknown field");
    }
  }
  auto get = [&](std::string_view key) -> const nlohmann::json& {
    const auto it = j.find(key);
    if (it == j.end()) throw detail::schema_error(line, std::string(key), "missing");
    return *it;
  };
  auto text_field = [&](std::string_view key, bool nonempty) {
    const auto& v = get(key);
    if (!v.is_string()) throw detail::schema_error(line, std::string(key), "expected a string");
    std::string s = v.get<std::string>();
    if (nonempty && s.empty()) throw detail::schema_error(line, std::string(key), "must be nonempty");
    return s;
  };
  auto unsigned_field = [&](std::string_view key) {
    const auto& v = get(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw detail::schema_error(line, std::string(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };

  DatasetRecord r;
  r.id = text_field("id", true);
  r.template_id = text_field("template_id", true);
  r.instance_index = unsigned_field("instance_index");
  r.seed = unsigned_field("seed");
  r.problem = text_field("problem", true);
  r.solution_code = text_field("solution_code", true);
  r.solution_nl = text_field("solution_nl", true);
  const auto& result = get("result");
  if (!result.is_number_integer() ||
      (result.is_number_unsigned() && result.get<std::uint64_t>() > std::uint64_t(std::numeric_limits<std::int64_t>::max()))) {
    throw detail::schema_error(line, "result", "expected a 64-bit integer");
  }
  r.result = result.get<std::int64_t>();
  const auto& verified = get("verified");
  if (!verified.is_boolean() || !verified.get<bool>()) throw detail::schema_error(line, "verified", "must be true");
  r.verified = true;
  if (r.id != record_id(r.template_id, r.instance_index)) {
    throw detail::schema_error(line, "id", "must equal '<template_id>#<instance_index>'");
  }
  return r;
}

/// Streams records to a JSONL file, checking invariants and id uniqueness.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw DatasetError(DatasetError::Kind::io, "cannot open '" + path + "' for writing");
  }

  void write(const DatasetRecord& r) {
    check_record_invariants(r);
    if (!ids_.insert(r.id).second) {
      throw DatasetError(DatasetError::Kind::invariant_violation, "duplicate record id '" + r.id + "'", 0, r.id);
    }
    out_ << record_to_json_line(r) << '\n';
    if (!out_) throw DatasetError(DatasetError::Kind::io, "write to '" + path_ + "' failed");
    ++count_;
  }

  std::size_t count() const { return count_; }

  void close() {
    out_.close();
    if (out_.fail()) throw DatasetError(DatasetError::Kind::io, "closing '" + path_ + "' failed");
  }

 private:
  std::ofstream out_;
  std::string path_;
  std::unordered_set<std::string> ids_;
  std::size_t count_ = 0;
};

template <typename Range>
std::size_t write_records(const Range& records, const std::string& path) {
  JsonlWriter w(path);
  for (const DatasetRecord& r : records) w.write(r);
  w.close();
  return w.count();
}

/// Blank lines (including a trailing one) are skipped; everything else must
/// match the schema exactly. Record ids must be unique within the file.
inline std::vector<DatasetRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::io, "cannot open '" + path + "'");
  std::vector<DatasetRecord> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    DatasetRecord r = record_from_json_line(line, line_no);
    if (!ids.insert(r.id).second) throw detail::schema_error(line_no, "id", "duplicate id '" + r.id + "'");
    out.push_back(std::move(r));
  }
  if (in.bad()) throw DatasetError(DatasetError::Kind::io, "read from '" + path + "' failed");
  return out;
}

// ---------------------------------------------------------------------------
// Statistics.

/// Exact single-pass moments over non-negative integer lengths: the sum and
/// the sum of squares are accumulated in integers, so
///   mean = S / n,  std = sqrt(n*Q - S^2) / n   (population)
/// with no rounding until the final division. Shards merge by adding S, Q
/// and n and taking min/max.
struct LengthStats {
  std::uint64_t count = 0;
  std::uint64_t min = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max = 0;
  std::uint64_t sum = 0;
  unsigned __int128 sum_squares = 0;

  void add(std::uint64_t x) {
    ++count;
    min = std::min(min, x);
    max = std::max(max, x);
    sum += x;
    sum_squares += static_cast<unsigned __int128>(x) * x;
  }

  void merge(const LengthStats& o) {
    count += o.count;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    sum += o.sum;
    sum_squares += o.sum_squares;
  }

  double mean() const { return count ? static_cast<double>(sum) / static_cast<double>(count) : 0.0; }

  /// n*Q - S^2, exact.
  unsigned __int128 scaled_variance() const {
    const unsigned __int128 s = sum;
    return static_cast<unsigned __int128>(count) * sum_squares - s * s;
  }

  double stddev() const {
    if (count == 0) return 0.0;
    return std::sqrt(static_cast<double>(scaled_variance())) / static_cast<double>(count);
  }
};

/// Whitespace tokens: maximal runs of non-space bytes (space, \t, \n, \v,
/// \f, \r separate).
inline std::uint64_t count_whitespace_tokens(std::string_view s) {
  std::uint64_t n = 0;
  bool in_token = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

/// Characters are Unicode code points (UTF-8 lead bytes).
inline std::uint64_t count_code_points(std::string_view s) {
  std::uint64_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

enum class TextField { problem, solution_code, solution_nl };

inline constexpr TextField kTextFields[] = {TextField::problem, TextField::solution_code, TextField::solution_nl};

inline std::string_view field_key(TextField f) {
  switch (f) {
    case TextField::problem: return "problem";
    case TextField::solution_code: return "solution_code";
    case TextField::solution_nl: return "solution_nl";
  }
  return "?";
}

inline const std::string& field_text(const DatasetRecord& r, TextField f) {
  switch (f) {
    case TextField::problem: return r.problem;
    case TextField::solution_code: return r.solution_code;
    case TextField::solution_nl: return r.solution_nl;
  }
  return r.problem;
}

struct FieldStats {
  LengthStats tokens;
  LengthStats chars;
};

struct CorpusStats {
  std::uint64_t records = 0;
  std::uint64_t templates = 0;
  FieldStats fields[3];

  const FieldStats& field(TextField f) const { return fields[static_cast<int>(f)]; }
};

class StatsAccumulator {
 public:
  void add(const DatasetRecord& r) {
    ++stats_.records;
    template_ids_.insert(r.template_id);
    for (TextField f : kTextFields) {
      const std::string& text = field_text(r, f);
      stats_.fields[static_cast<int>(f)].tokens.add(count_whitespace_tokens(text));
      stats_.fields[static_cast<int>(f)].chars.add(count_code_points(text));
    }
  }

  void merge(const StatsAccumulator& o) {
    stats_.records += o.stats_.records;
    template_ids_.insert(o.template_ids_.begin(), o.template_ids_.end());
    for (int i = 0; i < 3; ++i) {
      stats_.fields[i].tokens.merge(o.stats_.fields[i].tokens);
      stats_.fields[i].chars.merge(o.stats_.fields[i].chars);
    }
  }

  CorpusStats finish() const {
    if (stats_.records == 0) throw DatasetError(DatasetError::Kind::empty_corpus, "no records to summarize");
    CorpusStats out = stats_;
    out.templates = template_ids_.size();
    return out;
  }

 private:
  CorpusStats stats_;
  std::unordered_set<std::string> template_ids_;
};

template <typename Range>
CorpusStats compute_stats(const Range& records) {
  StatsAccumulator acc;
  for (const DatasetRecord& r : records) acc.add(r);
  return acc.finish();
}

inline std::string format_stats_table(const CorpusStats& s) {
  struct Row {
    std::string metric;
    std::string value;
  };
  std::vector<Row> rows;
  auto fixed2 = [](double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
  };
  rows.push_back({"Number of source templates", std::to_string(s.templates)});
  rows.push_back({"Total number of problems", std::to_string(s.records)});
  const std::pair<TextField, const char*> labels[] = {
      {TextField::problem, "Problem"},
      {TextField::solution_code, "Code solution"},
      {TextField::solution_nl, "Natural language solution"},
  };
  for (const char* unit : {"tokens", "chars"}) {
    for (auto [f, label] : labels) {
      const LengthStats& ls = std::string_view(unit) == "tokens" ? s.field(f).tokens : s.field(f).chars;
      rows.push_back({std::string(label) + " length range (" + unit + ")",
                      "[" + std::to_string(ls.min) + ", " + std::to_string(ls.max) + "]"});
      rows.push_back({std::string(label) + " length average (" + unit + ")",
                      fixed2(ls.mean()) + " ± " + fixed2(ls.stddev())});
    }
  }
  std::size_t width = std::string_view("Metric").size();
  for (const auto& r : rows) width = std::max(width, r.metric.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "Metric" << "  Value\n";
  os << std::string(width, '-') << "  " << std::string(16, '-') << '\n';
  for (const auto& r : rows) os << std::left << std::setw(static_cast<int>(width)) << r.metric << "  " << r.value << '\n';
  os << "(tokens = whitespace-separated tokens; chars = Unicode code points; ± is the population std)\n";
  return os.str();
}

inline nlohmann::ordered_json stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["templates"] = s.templates;
  j["records"] = s.records;
  for (TextField f : kTextFields) {
    nlohmann::ordered_json fj;
    for (const char* unit : {"tokens", "chars"}) {
      const LengthStats& ls = std::string_view(unit) == "tokens" ? s.field(f).tokens : s.field(f).chars;
      fj[unit] = {{"min", ls.min}, {"max", ls.max}, {"mean", ls.mean()}, {"std", ls.stddev()}};
    }
    j[std::string(field_key(f))] = fj;
  }
  return j;
}

}  // namespace tdg
