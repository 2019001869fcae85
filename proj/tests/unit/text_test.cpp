#include <gtest/gtest.h>

#include "coex/error.hpp"
#include "coex/metrics/report.hpp"
#include "coex/metrics/text.hpp"
#include "oracles.hpp"

using namespace coex::metrics;
namespace t = coex::testing;

TEST(Syllables, Heuristic) {
  EXPECT_EQ(count_syllables("table"), 2);
  EXPECT_EQ(count_syllables("cat"), 1);
  EXPECT_EQ(count_syllables("implementation"), 5);
  EXPECT_EQ(count_syllables("cake"), 1);
  EXPECT_EQ(count_syllables("the"), 1);
  EXPECT_EQ(count_syllables("rhythm"), 1);
  EXPECT_EQ(count_syllables("x"), 1);
}

TEST(Tokenize, SentencesAndTokens) {
  auto t = tokenize("Hello world. It's 3.5 now!");
  ASSERT_EQ(t.sentences.size(), 2u);
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"hello", "world", "it's", "3", "5", "now"}));
  EXPECT_EQ(t.syllable_counts.size(), t.tokens.size());
}

TEST(Tokenize, DropsEmptySentences) {
  auto t = tokenize("... !? Done");
  EXPECT_EQ(t.sentences.size(), 1u);
  EXPECT_EQ(tokenize("'quoted' Words.").tokens, (std::vector<std::string>{"quoted", "words"}));
  EXPECT_TRUE(tokenize("").tokens.empty());
}

TEST(LexicalDensity, Stopwords) {
  auto sw = StopwordList::builtin();
  auto t = tokenize("the cat sat on the mat");
  EXPECT_DOUBLE_EQ(lexical_density(t, *sw), 0.5);
  EXPECT_EQ(vocabulary(t), 5u);
  EXPECT_THROW(lexical_density(tokenize(""), *sw), coex::Error);
}

TEST(Stopwords, ParseAndDigest) {
  auto a = StopwordList::parse("# c\nthe\n\nA\n", "v1");
  EXPECT_TRUE(a->contains("the"));
  EXPECT_TRUE(a->contains("a"));
  EXPECT_EQ(a->size(), 2u);
  auto b = StopwordList::parse("a\nthe\n", "v2");
  EXPECT_EQ(a->digest(), b->digest());
  EXPECT_EQ(a->digest().rfind("fnv1a64:", 0), 0u);
  EXPECT_GT(StopwordList::builtin()->size(), 100u);
}

TEST(Readability, SingleShortSentence) {
  auto r = readability(tokenize("The cat sat."));
  EXPECT_EQ(r.words, 3u);
  EXPECT_EQ(r.sentences, 1u);
  EXPECT_EQ(r.syllables, 3u);
  EXPECT_NEAR(r.flesch_reading_ease, 119.19, 1e-9);
  EXPECT_NEAR(r.flesch_kincaid, -2.62, 1e-9);
  EXPECT_NEAR(r.gunning_fog, 1.2, 1e-9);
}

TEST(Readability, MatchesCountFormulas) {
  t::Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    std::string text;
    const int n = rng.uniform(1, 5);
    for (int s = 0; s < n; ++s) text += t::random_sentence(rng) + " ";
    auto tok = tokenize(text);
    auto r = readability(tok);
    std::size_t syl = 0, complex = 0;
    for (int c : tok.syllable_counts) {
      syl += static_cast<std::size_t>(c);
      if (c >= 3) ++complex;
    }
    const double w = static_cast<double>(tok.tokens.size());
    const double s = static_cast<double>(tok.sentences.size());
    EXPECT_NEAR(r.flesch_reading_ease, t::fre_from_counts(w, s, static_cast<double>(syl)), 1e-9);
    EXPECT_NEAR(r.flesch_kincaid, t::fk_from_counts(w, s, static_cast<double>(syl)), 1e-9);
    EXPECT_NEAR(r.gunning_fog, t::gf_from_counts(w, s, static_cast<double>(complex)), 1e-9);
  }
}

TEST(Readability, EmptyThrows) {
  EXPECT_THROW(readability(tokenize("")), coex::Error);
  EXPECT_THROW(readability(tokenize("?! ...")), coex::Error);
}

TEST(MergeSourceDocument, JoinsInOrder) {
  std::map<int, std::vector<std::string>> ex{{2, {"Prints!"}}, {1, {"Declares x", "Sets it."}}};
  EXPECT_EQ(merge_source_document(ex), "Declares x. Sets it. Prints!");
  EXPECT_EQ(merge_source_document({}), "");
}

TEST(Median, EvenAndOdd) {
  EXPECT_DOUBLE_EQ(median({600, 739, 800, 900}), 769.5);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_THROW(median({}), coex::Error);
  t::Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v;
    const int n = rng.uniform(1, 20);
    for (int k = 0; k < n; ++k) v.push_back(rng.real(-100, 100));
    EXPECT_DOUBLE_EQ(median(v), t::median_oracle(v));
  }
}

TEST(Fnv, KnownVector) {
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
}
