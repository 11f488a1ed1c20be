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

#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

namespace tdg {
namespace {

LexiconError::Kind lexicon_error(std::string_view src) {
  try {
    load_lexicon(src);
  } catch (const LexiconError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected LexiconError for " << src;
  return LexiconError::Kind::syntax;
}

TEST(Lexicon, LoadsCategoriesInFileOrder) {
  const Lexicon lex = load_lexicon(R"({"item": ["apples", "granny smith apples"]})");
  ASSERT_EQ(lex.categories().size(), 1u);
  EXPECT_EQ(lex.terms("item"), (std::vector<std::string>{"apples", "granny smith apples"}));
  const Lexicon two = load_lexicon(R"({"z": ["a"], "a": ["b"]})");
  EXPECT_EQ(two.categories()[0].first, "z");
  EXPECT_EQ(two.categories()[1].first, "a");
}

TEST(Lexicon, Errors) {
  EXPECT_EQ(lexicon_error(R"({"item": []})"), LexiconError::Kind::empty_category);
  EXPECT_EQ(lexicon_error(R"({"item": ["apples", "apples"]})"), LexiconError::Kind::duplicate_term);
  EXPECT_EQ(lexicon_error(R"({"item": "apples"})"), LexiconError::Kind::syntax);
  EXPECT_EQ(lexicon_error(R"({"item": [1]})"), LexiconError::Kind::syntax);
  EXPECT_EQ(lexicon_error(R"({"item": [""]})"), LexiconError::Kind::syntax);
  EXPECT_EQ(lexicon_error(R"(["apples"])"), LexiconError::Kind::syntax);
  EXPECT_EQ(lexicon_error("{"), LexiconError::Kind::syntax);
  try {
    load_lexicon(R"({"item": ["apples", "pears", "apples"]})");
  } catch (const LexiconError& e) {
    EXPECT_EQ(e.category(), "item");
    EXPECT_EQ(e.term(), "apples");
  }
}

TEST(Lexicon, DrawFromSingletonIsConstant) {
  Lexicon lex;
  lex.add_category("one", {"only"});
  for (std::uint64_t s = 0; s < 50; ++s) {
    Xoshiro256 rng(s);
    EXPECT_EQ(draw_term(lex, "one", rng), "only");
  }
}

TEST(Lexicon, DrawIsDeterministicAndVaried) {
  Lexicon lex;
  std::vector<std::string> terms;
  for (int i = 0; i < 100; ++i) terms.push_back("t" + std::to_string(i));
  lex.add_category("many", terms);
  Xoshiro256 a(1), b(1);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    const std::string& x = draw_term(lex, "many", a);
    EXPECT_EQ(x, draw_term(lex, "many", b));
    seen.insert(x);
  }
  EXPECT_GT(seen.size(), 50u);
  std::set<std::string> firsts;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Xoshiro256 rng(s);
    firsts.insert(draw_term(lex, "many", rng));
  }
  EXPECT_GT(firsts.size(), 1u);
}

TEST(Lexicon, UnknownCategory) {
  Xoshiro256 rng(0);
  try {
    draw_term(testing::small_lexicon(), "verbs", rng);
    FAIL();
  } catch (const LexiconError& e) {
    EXPECT_EQ(e.kind(), LexiconError::Kind::unknown_category);
    EXPECT_EQ(e.category(), "verbs");
  }
}

TEST(Lexicon, SanitizeIdentifier) {
  EXPECT_EQ(sanitize_identifier("granny smith apples"), "granny_smith_apples");
  EXPECT_EQ(sanitize_identifier("apples"), "apples");
  EXPECT_EQ(sanitize_identifier("7-Up cans"), "_7Up_cans");
  EXPECT_EQ(sanitize_identifier("t-shirts"), "tshirts");
  EXPECT_EQ(sanitize_identifier("café au lait"), "caf_au_lait");
  EXPECT_THROW(sanitize_identifier("--"), LexiconError);
  const Lexicon lex = testing::bundled_lexicon();
  for (const auto& [name, terms] : lex.categories()) {
    for (const auto& t : terms) EXPECT_TRUE(is_identifier(sanitize_identifier(t))) << t;
  }
}

TEST(Lexicon, BundledLexiconShape) {
  const Lexicon lex = testing::bundled_lexicon();
  EXPECT_GE(lex.terms("first_name").size(), 50u);
  EXPECT_GE(lex.terms("last_name").size(), 50u);
  EXPECT_GE(lex.terms("item").size(), 40u);
  EXPECT_EQ(lex.terms("month_pair").size(), 12u);
  EXPECT_GE(lex.terms("place").size(), 20u);
  EXPECT_GE(lex.terms("county").size(), 20u);
  for (const auto& m : lex.terms("month_pair")) EXPECT_NE(m.find(" and "), std::string::npos);
  const Lexicon again = load_lexicon(lexicon_to_json(lex));
  EXPECT_EQ(again.categories(), lex.categories());
}

}  // namespace
}  // namespace tdg
