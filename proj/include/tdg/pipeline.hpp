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
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tdg/dataset_io.hpp"
#include "tdg/lexicon.hpp"
#include "tdg/renderer.hpp"
#include "tdg/rng.hpp"
#include "tdg/sampler.hpp"
#include "tdg/template_dsl.hpp"
#include "tdg/template_file.hpp"
#include "tdg/verifier.hpp"

namespace tdg {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(const std::string& message, std::string template_id = {}, std::string category = {})
      : std::runtime_error(message), template_id_(std::move(template_id)), category_(std::move(category)) {}

  const std::string& template_id() const { return template_id_; }
  const std::string& category() const { return category_; }

 private:
  std::string template_id_;
  std::string category_;
};

struct GenerationConfig {
  std::uint64_t global_seed = 0;
  std::uint64_t per_template = 1000;
  std::uint64_t max_attempts_per_instance = kDefaultMaxAttempts;
  std::uint64_t max_resamples_on_duplicate = 10;
  std::uint64_t step_budget = sol::kDefaultStepBudget;
  bool nl_check = true;
  unsigned jobs = 1;
  int reject_reward = 0;

  void validate() const {
    if (per_template < 1) throw ConfigError("per_template must be at least 1");
    if (max_attempts_per_instance < 1) throw ConfigError("max_attempts_per_instance must be at least 1");
    if (step_budget < 1) throw ConfigError("step_budget must be at least 1");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (reject_reward != 0 && reject_reward != -1) throw ConfigError("reject_reward must be 0 or -1");
  }

  VerifyOptions verify_options() const {
    VerifyOptions o;
    o.step_budget = step_budget;
    o.nl_check = nl_check;
    return o;
  }
};

/// Instances evaluated before a template that never succeeds is abandoned.
inline constexpr std::uint64_t kUnsatisfiableProbe = 1000;

/// FNV-1a 64 of the exact problem text. The empty text maps to the FNV
/// offset basis, 0xcbf29ce484222325.
inline std::uint64_t dedup_key(std::string_view problem_text) { return fnv1a64(problem_text); }

/// Binding for retry `attempt` (>= 1) of the instance whose first draw used
/// `base_seed`.
inline Binding resample_instance(const MetaTemplate& tpl, const Lexicon& lex, std::uint64_t base_seed,
                                 std::uint64_t attempt, std::uint64_t max_attempts = kDefaultMaxAttempts) {
  if (attempt < 1) throw std::invalid_argument("resample attempt must be at least 1");
  return sample_binding(tpl, lex, retry_seed(base_seed, attempt), max_attempts);
}

// ---------------------------------------------------------------------------
// Single instantiation: render, verify, and build the record.

/// Manifest-only category for templates whose placeholders fail to render.
inline constexpr std::string_view kRenderErrorCategory = "RenderError";

struct InstantiationResult {
  std::optional<DatasetRecord> record;
  std::optional<Verdict> verdict;         // absent when rendering failed
  std::optional<std::string> render_error;
};

inline InstantiationResult instantiate(const MetaTemplate& tpl, const Binding& binding, std::uint64_t index,
                                       const VerifyOptions& opts = {}) {
  InstantiationResult out;
  RenderedInstance inst;
  try {
    inst = render_instance(tpl, binding);
  } catch (const RenderError& e) {
    out.render_error = e.what();
    return out;
  }
  out.verdict = verify(inst.code_source, inst.nl_solution, opts);
  if (!out.verdict->accepted) return out;
  DatasetRecord r;
  r.id = record_id(tpl.id, index);
  r.template_id = tpl.id;
  r.instance_index = index;
  r.seed = binding.instance_seed;
  r.problem = std::move(inst.problem);
  r.solution_code = std::move(inst.code_source);
  r.solution_nl = std::move(inst.nl_solution);
  r.result = out.verdict->result_rounded;
  r.verified = true;
  out.record = std::move(r);
  return out;
}

// ---------------------------------------------------------------------------
// Manifest.

struct RejectionTally {
  std::array<std::uint64_t, std::size(kAllRejectCategories)> by_category{};
  std::uint64_t render_errors = 0;

  void add(const InstantiationResult& r) {
    if (r.render_error) {
      ++render_errors;
    } else if (r.verdict && !r.verdict->accepted) {
      ++by_category[static_cast<std::size_t>(r.verdict->category)];
    }
  }

  void merge(const RejectionTally& o) {
    for (std::size_t i = 0; i < by_category.size(); ++i) by_category[i] += o.by_category[i];
    render_errors += o.render_errors;
  }

  std::uint64_t total() const {
    std::uint64_t t = render_errors;
    for (auto n : by_category) t += n;
    return t;
  }

  std::uint64_t count(RejectCategory c) const { return by_category[static_cast<std::size_t>(c)]; }
};

struct TemplateCounters {
  std::string template_id;
  std::uint64_t requested = 0;
  std::uint64_t emitted = 0;
  std::uint64_t draws = 0;                  // parameter draws, including constraint failures
  std::uint64_t constraint_rejections = 0;  // draws that failed the constraint
  RejectionTally rejected;                  // successful draws rejected by rendering or verification
  std::uint64_t duplicates_resampled = 0;
  std::uint64_t duplicate_shortfall = 0;    // slots left empty after the duplicate budget ran out
  std::uint64_t exhausted_instances = 0;    // slots left empty after the attempt budget ran out
  std::uint64_t cross_template_collisions = 0;
  bool unsatisfiable = false;  // no probe instance ever satisfied the constraint
  bool abandoned = false;      // no probe instance ever verified; remaining instances skipped

  void merge_totals(const TemplateCounters& o) {
    requested += o.requested;
    emitted += o.emitted;
    draws += o.draws;
    constraint_rejections += o.constraint_rejections;
    rejected.merge(o.rejected);
    duplicates_resampled += o.duplicates_resampled;
    duplicate_shortfall += o.duplicate_shortfall;
    exhausted_instances += o.exhausted_instances;
    cross_template_collisions += o.cross_template_collisions;
  }
};

struct RunManifest {
  GenerationConfig config;
  std::string corpus_digest;
  std::vector<TemplateCounters> templates;
  TemplateCounters totals;
  std::uint64_t unsatisfiable_templates = 0;
};

inline nlohmann::ordered_json counters_to_json(const TemplateCounters& c) {
  nlohmann::ordered_json j;
  if (!c.template_id.empty()) j["template_id"] = c.template_id;
  j["requested"] = c.requested;
  j["emitted"] = c.emitted;
  j["draws"] = c.draws;
  j["constraint_rejections"] = c.constraint_rejections;
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (RejectCategory cat : kAllRejectCategories) {
    if (cat == RejectCategory::answer_mismatch) continue;
    cats[std::string(category_name(cat))] = c.rejected.count(cat);
  }
  cats[std::string(kRenderErrorCategory)] = c.rejected.render_errors;
  j["rejected_by_category"] = cats;
  j["duplicates_resampled"] = c.duplicates_resampled;
  j["duplicate_shortfall"] = c.duplicate_shortfall;
  j["exhausted_instances"] = c.exhausted_instances;
  j["cross_template_collisions"] = c.cross_template_collisions;
  return j;
}

/// Deterministic manifest document. The worker count is deliberately not
/// echoed so that output is identical for any `jobs`.
inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["global_seed"] = m.config.global_seed;
  cfg["per_template"] = m.config.per_template;
  cfg["max_attempts_per_instance"] = m.config.max_attempts_per_instance;
  cfg["max_resamples_on_duplicate"] = m.config.max_resamples_on_duplicate;
  cfg["step_budget"] = m.config.step_budget;
  cfg["nl_check"] = m.config.nl_check;
  cfg["reject_reward"] = m.config.reject_reward;
  j["config"] = cfg;
  j["corpus_digest"] = m.corpus_digest;
  nlohmann::ordered_json templates = nlohmann::ordered_json::array();
  for (const auto& t : m.templates) {
    auto tj = counters_to_json(t);
    tj["unsatisfiable"] = t.unsatisfiable;
    tj["abandoned"] = t.abandoned;
    templates.push_back(tj);
  }
  j["templates"] = templates;
  auto totals = counters_to_json(m.totals);
  totals["unsatisfiable_templates"] = m.unsatisfiable_templates;
  j["totals"] = totals;
  return j;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

/// Digest over the canonical serialization of every template (in order)
/// followed by the lexicon.
inline std::string corpus_digest(const std::vector<MetaTemplate>& templates, const Lexicon& lex) {
  Fnv1a64 h;
  for (const auto& t : templates) h.update(template_to_json(t, -1)).update_byte(0);
  h.update(lexicon_to_json(lex));
  return hex64(h.digest());
}

// ---------------------------------------------------------------------------
// Generation loop.

namespace detail {

struct InstanceRun {
  std::optional<DatasetRecord> record;
  std::uint64_t next_attempt = 0;
  bool exhausted = false;
  bool ever_satisfied = false;
  std::uint64_t draws = 0;
  std::uint64_t constraint_rejections = 0;
  RejectionTally rejected;
};

/// Attempt sequence of one instance, starting at `start_attempt`. Attempt 0
/// uses the base seed, attempt n >= 1 uses retry_seed(base, n). Constraint
/// draws and rejected instantiations share one budget.
inline InstanceRun run_instance(const MetaTemplate& tpl, const Lexicon& lex, const GenerationConfig& cfg,
                                const VerifyOptions& opts, std::uint64_t index, std::uint64_t base_seed,
                                std::uint64_t start_attempt) {
  InstanceRun run;
  std::uint64_t budget = cfg.max_attempts_per_instance;
  std::uint64_t attempt = start_attempt;
  while (budget > 0) {
    const std::uint64_t seed = attempt == 0 ? base_seed : retry_seed(base_seed, attempt);
    ++attempt;
    SampleResult s = try_sample_binding(tpl, lex, seed, budget);
    run.draws += s.attempts;
    budget -= s.attempts;
    if (!s.binding) {
      run.constraint_rejections += s.attempts;
      break;
    }
    run.constraint_rejections += s.attempts - 1;
    run.ever_satisfied = true;
    InstantiationResult r = instantiate(tpl, *s.binding, index, opts);
    if (r.record) {
      run.record = std::move(r.record);
      run.next_attempt = attempt;
      return run;
    }
    run.rejected.add(r);
  }
  run.exhausted = true;
  run.next_attempt = attempt;
  return run;
}

/// Runs fn(i) for i in [begin, end) on `jobs` threads. Results must be
/// written to disjoint, pre-sized storage.
template <typename Fn>
void parallel_for(std::uint64_t begin, std::uint64_t end, unsigned jobs, Fn&& fn) {
  if (end <= begin) return;
  if (jobs <= 1 || end - begin < 2) {
    for (std::uint64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  constexpr std::uint64_t kChunk = 16;
  std::atomic<std::uint64_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t lo = next.fetch_add(kChunk);
      if (lo >= end) return;
      const std::uint64_t hi = std::min(end, lo + kChunk);
      try {
        for (std::uint64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(end);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(jobs, (end - begin + kChunk - 1) / kChunk));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

using RecordSink = std::function<void(const DatasetRecord&)>;

/// Instantiate, render and verify every (template, instance) pair, emitting
/// accepted records to `sink` in (template order, instance index) order.
/// Rejected instantiations are resampled within the per-instance budget;
/// duplicate problem texts within a template are resampled up to
/// max_resamples_on_duplicate times, after which the slot stays empty.
/// Output is independent of cfg.jobs.
inline RunManifest generate_corpus(const std::vector<MetaTemplate>& templates, const Lexicon& lex,
                                   const GenerationConfig& cfg, const RecordSink& sink) {
  cfg.validate();
  std::unordered_set<std::string> ids;
  for (const auto& t : templates) {
    if (!ids.insert(t.id).second) throw CorpusError("duplicate template id '" + t.id + "'", t.id);
    const auto violations = validate_references(t);
    if (!violations.empty()) {
      throw CorpusError("template '" + t.id + "' is invalid: " + violations.front().message, t.id);
    }
    for (const auto& slot : t.lexicon_slots) {
      if (!lex.has_category(slot.category)) {
        throw CorpusError("template '" + t.id + "' needs lexicon category '" + slot.category + "'", t.id,
                          slot.category);
      }
    }
  }

  RunManifest manifest;
  manifest.config = cfg;
  manifest.corpus_digest = corpus_digest(templates, lex);
  const VerifyOptions opts = cfg.verify_options();
  std::unordered_set<std::uint64_t> earlier_keys;

  for (const MetaTemplate& tpl : templates) {
    TemplateCounters counters;
    counters.template_id = tpl.id;
    counters.requested = cfg.per_template;

    std::vector<detail::InstanceRun> runs(cfg.per_template);
    auto compute = [&](std::uint64_t i) {
      runs[i] = detail::run_instance(tpl, lex, cfg, opts, i, derive_instance_seed(cfg.global_seed, tpl.id, i), 0);
    };
    const std::uint64_t probe = std::min(cfg.per_template, kUnsatisfiableProbe);
    detail::parallel_for(0, probe, cfg.jobs, compute);
    const bool all_failed = std::all_of(runs.begin(), runs.begin() + probe, [](const auto& r) { return !r.record; });
    const bool none_satisfied =
        std::none_of(runs.begin(), runs.begin() + probe, [](const auto& r) { return r.ever_satisfied; });
    const std::uint64_t evaluated = all_failed ? probe : cfg.per_template;
    if (all_failed) {
      counters.abandoned = true;
      counters.unsatisfiable = none_satisfied;
    } else {
      detail::parallel_for(probe, cfg.per_template, cfg.jobs, compute);
    }

    std::unordered_set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < evaluated; ++i) {
      detail::InstanceRun run = std::move(runs[i]);
      const std::uint64_t base_seed = derive_instance_seed(cfg.global_seed, tpl.id, i);
      std::uint64_t resamples = 0;
      auto absorb = [&](const detail::InstanceRun& r) {
        counters.draws += r.draws;
        counters.constraint_rejections += r.constraint_rejections;
        counters.rejected.merge(r.rejected);
      };
      absorb(run);
      while (run.record && keys.count(dedup_key(run.record->problem))) {
        if (resamples == cfg.max_resamples_on_duplicate) {
          run.record.reset();
          ++counters.duplicate_shortfall;
          break;
        }
        ++resamples;
        ++counters.duplicates_resampled;
        run = detail::run_instance(tpl, lex, cfg, opts, i, base_seed, run.next_attempt);
        absorb(run);
      }
      if (!run.record) {
        if (run.exhausted) ++counters.exhausted_instances;
        continue;
      }
      const std::uint64_t key = dedup_key(run.record->problem);
      keys.insert(key);
      if (earlier_keys.count(key)) ++counters.cross_template_collisions;
      ++counters.emitted;
      sink(*run.record);
    }
    earlier_keys.insert(keys.begin(), keys.end());
    if (counters.unsatisfiable) ++manifest.unsatisfiable_templates;
    manifest.totals.merge_totals(counters);
    manifest.templates.push_back(std::move(counters));
  }
  return manifest;
}

}  // namespace tdg
