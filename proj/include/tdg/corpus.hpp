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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tdg/lexicon.hpp"
#include "tdg/pipeline.hpp"
#include "tdg/template_file.hpp"

namespace tdg {

inline constexpr std::string_view kTemplateExtension = ".tdg.json";

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Template files in `dir` ending in `.tdg.json`, sorted by file name.
inline std::vector<std::filesystem::path> list_template_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw CorpusError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > kTemplateExtension.size() &&
        name.compare(name.size() - kTemplateExtension.size(), kTemplateExtension.size(), kTemplateExtension) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

inline MetaTemplate load_template_file(const std::filesystem::path& path) {
  try {
    return parse_template(read_file(path));
  } catch (const TemplateError& e) {
    throw CorpusError(path.filename().string() + ":" + e.what());
  }
}

inline std::vector<MetaTemplate> load_template_dir(const std::filesystem::path& dir) {
  std::vector<MetaTemplate> out;
  for (const auto& f : list_template_files(dir)) out.push_back(load_template_file(f));
  if (out.empty()) throw CorpusError("no " + std::string(kTemplateExtension) + " files in '" + dir.string() + "'");
  return out;
}

inline Lexicon load_lexicon_file(const std::filesystem::path& path) {
  try {
    return load_lexicon(read_file(path));
  } catch (const LexiconError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

}  // namespace tdg
