#include <gtest/gtest.h>

#include "coex/error.hpp"
#include "coex/review/session.hpp"

using namespace coex;
using namespace coex::review;

namespace {

WorkedExample example() {
  return WorkedExample::create("ex-1", "t", "p", Language::kJava,
                               "int a = 1;\nint b = 2;\n}\nint c = 3;", 0);
}

llm::GenerationBatch batch(llm::CandidateMap c) {
  llm::GenerationBatch b;
  b.id = "bat-1";
  b.request.example_id = "ex-1";
  b.candidates = std::move(c);
  return b;
}

ReviewSession with_batch() {
  ReviewSession s("ses-1", "ex-1", "alice");
  s.attach_batch(batch({{1, {"A1", "A2", "A3"}}, {2, {"B1"}}, {4, {"C1", "C2"}}}));
  return s;
}

}  // namespace

TEST(ReviewSession, DefaultsIncludedNotLiked) {
  auto s = with_batch();
  EXPECT_EQ(s.state(), SessionState::kOpen);
  EXPECT_TRUE(s.line_included(1));
  EXPECT_TRUE(s.fragment_included(4, 1));
  EXPECT_FALSE(s.fragment_liked(1, 0));
  EXPECT_THROW(s.line_included(3), Error);
  EXPECT_THROW(s.fragment_included(1, 3), Error);
}

TEST(ReviewSession, ApplyRespectsMarks) {
  auto s = with_batch();
  auto ex = example();
  s.set_fragment_included(1, 2, false);
  s.set_line_included(4, false);
  EXPECT_TRUE(s.toggle_like(1, 1));
  EXPECT_TRUE(s.toggle_like(4, 0));  // liked but excluded: counted as liked, not applied
  auto r = s.apply(ex, 10);
  EXPECT_EQ(r.candidates, 6);
  EXPECT_EQ(r.candidate_lines, 3);
  EXPECT_EQ(r.fragments.size(), 3u);
  EXPECT_EQ(r.excluded, 3);
  EXPECT_EQ(r.liked, 2);
  EXPECT_EQ(r.lines_fully_excluded, 1);
  EXPECT_EQ(r.applied_per_line, (std::map<int, int>{{1, 2}, {2, 1}}));
  EXPECT_EQ(s.state(), SessionState::kApplied);
  const auto& l1 = ex.line(1).fragments;
  ASSERT_EQ(l1.size(), 2u);
  EXPECT_EQ(l1[0].text, "A1");
  EXPECT_TRUE(l1[1].liked);
  EXPECT_EQ(l1[1].origin, Origin::kGenerated);
  EXPECT_TRUE(ex.line(4).fragments.empty());
}

TEST(ReviewSession, AppendsAfterExistingFragments) {
  auto s = with_batch();
  auto ex = example();
  ex.add_fragment(2, "mine", Origin::kHuman, 0);
  s.apply(ex, 1);
  EXPECT_EQ(ex.line(2).fragments[0].text, "mine");
  EXPECT_EQ(ex.line(2).fragments[1].text, "B1");
}

TEST(ReviewSession, ApplyIsTerminal) {
  auto s = with_batch();
  auto ex = example();
  s.apply(ex, 1);
  EXPECT_THROW(s.apply(ex, 2), Error);
  EXPECT_THROW(s.toggle_like(1, 0), Error);
  EXPECT_THROW(s.reopen(), Error);
  const auto v = s.version();
  s.close();
  EXPECT_EQ(s.version(), v);
  EXPECT_EQ(s.state(), SessionState::kApplied);
}

TEST(ReviewSession, CloseKeepsMarks) {
  auto s = with_batch();
  s.set_line_included(2, false);
  s.close();
  EXPECT_EQ(s.state(), SessionState::kDiscarded);
  EXPECT_THROW(s.set_line_included(1, false), Error);
  s.reopen();
  EXPECT_EQ(s.state(), SessionState::kOpen);
  EXPECT_FALSE(s.line_included(2));
}

TEST(ReviewSession, AttachResetsMarks) {
  auto s = with_batch();
  s.set_line_included(1, false);
  s.toggle_like(2, 0);
  s.attach_batch(batch({{1, {"X"}}, {2, {"Y"}}}));
  EXPECT_TRUE(s.line_included(1));
  EXPECT_FALSE(s.fragment_liked(2, 0));
  EXPECT_THROW(s.line_included(4), Error);
}

TEST(ReviewSession, ApplyWithoutBatch) {
  ReviewSession s("ses-1", "ex-1", "alice");
  auto ex = example();
  EXPECT_THROW(s.apply(ex, 1), Error);
  EXPECT_THROW(s.toggle_like(1, 0), Error);
}

TEST(ReviewSession, ApplyValidatesBeforeMutating) {
  auto s = with_batch();
  auto ex = example();
  auto other = WorkedExample::create("ex-2", "t", "p", Language::kJava, "int a;", 0);
  EXPECT_THROW(s.apply(other, 1), Error);

  auto data = ex.data();
  data.lines[3].explainable = false;
  auto changed = WorkedExample::from_data(data);
  const auto before = changed.data();
  EXPECT_THROW(s.apply(changed, 1), Error);
  EXPECT_EQ(changed.data(), before);
  EXPECT_EQ(s.state(), SessionState::kOpen);
}

TEST(ReviewSession, VersionBumpsOnEveryChange) {
  ReviewSession s("ses-1", "ex-1", "alice");
  auto v = s.version();
  s.attach_batch(batch({{1, {"A"}}}));
  EXPECT_EQ(s.version(), ++v);
  s.toggle_like(1, 0);
  EXPECT_EQ(s.version(), ++v);
  s.set_fragment_included(1, 0, true);
  EXPECT_EQ(s.version(), ++v);
  s.close();
  EXPECT_EQ(s.version(), ++v);
  s.reopen();
  EXPECT_EQ(s.version(), ++v);
}

TEST(ReviewSession, Plan) {
  auto s = with_batch();
  s.set_fragment_included(1, 0, false);
  s.toggle_like(1, 2);
  auto plan = s.plan();
  ASSERT_EQ(plan.at(1).size(), 2u);
  EXPECT_EQ(plan.at(1)[1], (std::pair<std::string, bool>{"A3", true}));
}
