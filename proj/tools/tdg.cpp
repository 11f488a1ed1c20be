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

// Command-line front end: generate, verify, reward, stats, draft, audit.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration or
// corpus error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tdg/authoring_http.hpp"
#include "tdg/tdg.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

struct GenerateArgs {
  std::string templates, lexicon, out, manifest;
  tdg::GenerationConfig cfg;
  bool no_nl_check = false;
};

int run_generate(GenerateArgs& a) {
  a.cfg.nl_check = !a.no_nl_check;
  const auto templates = tdg::load_template_dir(a.templates);
  const auto lex = tdg::load_lexicon_file(a.lexicon);
  tdg::JsonlWriter writer(a.out);
  const tdg::RunManifest m =
      tdg::generate_corpus(templates, lex, a.cfg, [&](const tdg::DatasetRecord& r) { writer.write(r); });
  writer.close();
  if (!a.manifest.empty()) {
    std::ofstream mf(a.manifest, std::ios::binary | std::ios::trunc);
    if (!mf) throw tdg::DatasetError(tdg::DatasetError::Kind::io, "cannot open '" + a.manifest + "' for writing");
    mf << tdg::manifest_to_json(m).dump(2) << '\n';
    if (!mf) throw tdg::DatasetError(tdg::DatasetError::Kind::io, "write to '" + a.manifest + "' failed");
  }
  std::cerr << "wrote " << writer.count() << " records from " << templates.size() << " templates to " << a.out
            << '\n';
  for (const auto& t : m.templates) {
    if (t.abandoned) {
      std::cerr << "warning: template '" << t.template_id << "' abandoned"
                << (t.unsatisfiable ? " (constraint never satisfied)" : " (no instance verified)") << '\n';
    }
  }
  return kOk;
}

int run_verify(const std::string& in, bool no_nl_check, std::uint64_t step_budget) {
  std::vector<tdg::DatasetRecord> records;
  try {
    records = tdg::read_records(in);
  } catch (const tdg::DatasetError& e) {
    if (e.kind() == tdg::DatasetError::Kind::io) throw;
    std::cout << "FAIL line " << e.line() << ": " << e.what() << '\n';
    return kVerifyFailed;
  }
  std::uint64_t failures = 0;
  for (const auto& r : records) {
    tdg::VerifyOptions o;
    o.nl_check = !no_nl_check;
    o.step_budget = step_budget;
    o.expected = r.result;
    const tdg::Verdict v = tdg::verify(r.solution_code, r.solution_nl, o);
    if (!v.accepted) {
      ++failures;
      std::cout << "FAIL " << r.id << ": " << tdg::category_name(v.category) << ": " << v.detail << '\n';
    }
  }
  std::cout << records.size() - failures << "/" << records.size() << " records verified\n";
  return failures == 0 ? kOk : kVerifyFailed;
}

int run_stats(const std::string& in, bool as_json) {
  const auto stats = tdg::compute_stats(tdg::read_records(in));
  if (as_json) {
    std::cout << tdg::stats_to_json(stats).dump(2) << '\n';
  } else {
    std::cout << tdg::format_stats_table(stats);
  }
  return kOk;
}

int run_draft(const tdg::DraftRequest& req, bool stub) {
  std::string text;
  if (stub) {
    tdg::StubDraftClient client;
    text = tdg::draft_template(req, client);
  } else {
    auto client = tdg::HttpDraftClient::from_environment();
    text = tdg::draft_template(req, client);
  }
  std::cout << text;
  if (!text.empty() && text.back() != '\n') std::cout << '\n';
  return kOk;
}

int run_audit(const std::string& path, const std::string& lexicon, std::uint64_t n, std::uint64_t seed,
              unsigned jobs) {
  const auto lex = tdg::load_lexicon_file(lexicon);
  tdg::AuditOptions opts;
  opts.jobs = jobs;
  const auto report = tdg::audit_template(tdg::read_file(path), lex, n, seed, opts);
  std::cout << tdg::report_to_json(report).dump(2) << '\n';
  return report.admitted ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template-based math problem generator"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a verified JSONL corpus");
  g->add_option("--templates", gen.templates, "Directory of *.tdg.json templates")->required();
  g->add_option("--lexicon", gen.lexicon, "Lexicon JSON file")->required();
  g->add_option("--out", gen.out, "Output JSONL file")->required();
  g->add_option("--manifest", gen.manifest, "Run manifest JSON file");
  g->add_option("--per-template", gen.cfg.per_template, "Instances per template")->capture_default_str();
  g->add_option("--seed", gen.cfg.global_seed, "Global seed")->capture_default_str();
  g->add_option("--jobs", gen.cfg.jobs, "Worker threads")->capture_default_str();
  g->add_flag("--no-nl-check", gen.no_nl_check, "Skip the NL final-answer check");
  g->add_option("--reject-reward", gen.cfg.reject_reward, "Reward for rejections (0 or -1)")
      ->check(CLI::IsMember({0, -1}))
      ->capture_default_str();
  g->add_option("--max-attempts", gen.cfg.max_attempts_per_instance, "Attempt budget per instance")
      ->capture_default_str();
  g->add_option("--max-resamples", gen.cfg.max_resamples_on_duplicate, "Resamples per duplicate problem")
      ->capture_default_str();
  g->add_option("--step-budget", gen.cfg.step_budget, "Interpreter step budget")->capture_default_str();

  std::string verify_in;
  bool verify_no_nl = false;
  std::uint64_t verify_budget = tdg::sol::kDefaultStepBudget;
  auto* v = app.add_subcommand("verify", "Re-verify every record of a JSONL corpus");
  v->add_option("--in", verify_in, "JSONL file")->required();
  v->add_flag("--no-nl-check", verify_no_nl, "Skip the NL final-answer check");
  v->add_option("--step-budget", verify_budget, "Interpreter step budget")->capture_default_str();

  tdg::OracleOptions oracle;
  bool reward_no_nl = false;
  auto* r = app.add_subcommand("reward", "Line-delimited JSON reward oracle on stdin/stdout");
  r->add_option("--reject-reward", oracle.default_reject_reward, "Default reward for rejections (0 or -1)")
      ->check(CLI::IsMember({0, -1}))
      ->capture_default_str();
  r->add_flag("--no-nl-check", reward_no_nl, "Skip the NL final-answer check");
  r->add_option("--step-budget", oracle.step_budget, "Interpreter step budget")->capture_default_str();

  std::string stats_in;
  bool stats_json = false;
  auto* s = app.add_subcommand("stats", "Length statistics of a JSONL corpus");
  s->add_option("--in", stats_in, "JSONL file")->required();
  s->add_flag("--json", stats_json, "Emit JSON instead of a table");

  tdg::DraftRequest req;
  bool stub = false;
  auto* d = app.add_subcommand("draft", "Draft a candidate template");
  d->add_option("--topic", req.topic, "Problem topic")->required();
  d->add_option("--difficulty", req.difficulty, "Difficulty hint");
  d->add_option("--slot", req.required_slots, "Required lexicon category (repeatable)");
  d->add_flag("--stub", stub, "Use the bundled offline drafts");

  std::string audit_tpl, audit_lex;
  std::uint64_t audit_n = 100, audit_seed = 0;
  unsigned audit_jobs = 1;
  auto* a = app.add_subcommand("audit", "Dry-run a candidate template before admission");
  a->add_option("--template", audit_tpl, "Template file")->required();
  a->add_option("--lexicon", audit_lex, "Lexicon JSON file")->required();
  a->add_option("-n", audit_n, "Dry-run instances")->capture_default_str();
  a->add_option("--seed", audit_seed, "Seed")->capture_default_str();
  a->add_option("--jobs", audit_jobs, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*g) return run_generate(gen);
    if (*v) return run_verify(verify_in, verify_no_nl, verify_budget);
    if (*r) {
      oracle.nl_check = !reward_no_nl;
      tdg::serve_reward(std::cin, std::cout, oracle);
      return kOk;
    }
    if (*s) return run_stats(stats_in, stats_json);
    if (*d) return run_draft(req, stub);
    if (*a) return run_audit(audit_tpl, audit_lex, audit_n, audit_seed, audit_jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
