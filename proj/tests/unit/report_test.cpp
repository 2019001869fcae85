#include <gtest/gtest.h>

#include "coex/error.hpp"
#include "coex/metrics/report.hpp"
#include "coex/metrics/similarity.hpp"
#include "oracles.hpp"

using namespace coex::metrics;

namespace {

std::vector<DocumentGroup> two_groups() {
  return {{"instructor", {"The loop adds each value to sum.", "It prints the total."}},
          {"generated", {"This line adds the value to the sum.", "Prints the result."}}};
}

}  // namespace

TEST(MedianReport, PerGroupMedians) {
  auto sw = StopwordList::builtin();
  auto rows = median_report(two_groups(), *sw);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].source_label, "instructor");
  EXPECT_EQ(rows[0].n_documents, 2u);
  const auto a = document_metrics("The loop adds each value to sum.", *sw);
  const auto b = document_metrics("It prints the total.", *sw);
  EXPECT_DOUBLE_EQ(rows[0].medians.tokens, (a.tokens + b.tokens) / 2.0);
  EXPECT_DOUBLE_EQ(rows[0].medians.flesch_kincaid, (a.flesch_kincaid + b.flesch_kincaid) / 2.0);
}

TEST(MedianReport, Errors) {
  auto sw = StopwordList::builtin();
  EXPECT_THROW(median_report({{"x", {}}}, *sw), coex::Error);
  EXPECT_THROW(median_report({{"x", {"a."}}, {"x", {"b."}}}, *sw), coex::Error);
  try {
    median_report({{"g", {"fine.", "..."}}}, *sw);
    FAIL();
  } catch (const coex::Error& e) {
    EXPECT_NE(std::string(e.what()).find("group 'g' document 1"), std::string::npos);
  }
}

TEST(SimilarityReport, OrderedPairs) {
  const auto groups = two_groups();
  auto rows = similarity_report(groups);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].reference_label, "instructor");
  EXPECT_EQ(rows[0].source_label, "generated");
  EXPECT_EQ(rows[0].pairs, 4u);
  EXPECT_FALSE(rows[0].embedding_cosine);
  double sum = 0;
  for (const auto& r : groups[0].documents)
    for (const auto& s : groups[1].documents) sum += chrf(s, r);
  EXPECT_NEAR(rows[0].chrf, sum / 4.0, 1e-12);
}

TEST(SimilarityReport, IdenticalGroupsScoreOne) {
  HashingEmbedder e;
  auto rows = similarity_report({{"a", {"Same words here."}}, {"b", {"Same words here."}}}, &e);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.chrf, 1.0);
    EXPECT_NEAR(*r.embedding_cosine, 1.0, 1e-12);
  }
}

TEST(CorpusReport, Serialisation) {
  auto sw = StopwordList::builtin();
  auto report = corpus_report(two_groups(), *sw);
  auto j = to_json(report);
  EXPECT_EQ(j["metadata"]["tokenizer"], "tokenizer-v1");
  EXPECT_TRUE(j["metadata"]["embedding_provider"].is_null());
  EXPECT_EQ(j["lexical"].size(), 2u);
  EXPECT_TRUE(j["similarity"][0]["embedding_cosine"].is_null());

  const std::string csv = to_csv(report);
  EXPECT_EQ(csv.rfind("source,n,vocabulary,lexical_density,tokens,gf,fre,fk\n", 0), 0u);
  EXPECT_NE(csv.find("\n\nreference,source,pairs,chrf,meteor,use,bertscore\n"), std::string::npos);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 2u + 1u + 1u + 2u);
}
