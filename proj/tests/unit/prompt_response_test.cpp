#include <gtest/gtest.h>

#include "coex/error.hpp"
#include "coex/llm/prompt.hpp"
#include "coex/llm/provider.hpp"
#include "coex/llm/response.hpp"

using namespace coex;
using namespace coex::llm;

namespace {

WorkedExample example(std::string problem = "Add two numbers.") {
  return WorkedExample::create("ex-1", "Add", std::move(problem), Language::kJava,
                               "// add\nint a = 1;\n\nint b = a + 1;\n}", 0);
}

}  // namespace

TEST(PromptTemplate, RequiresPlaceholders) {
  EXPECT_NO_THROW(PromptTemplate::parse("{problem} {language} {code_numbered}"));
  EXPECT_THROW(PromptTemplate::parse("{problem} {language}"), Error);
  EXPECT_THROW(PromptTemplate::parse(""), Error);
  const auto& d = PromptTemplate::default_template().text();
  for (auto p : {"{problem}", "{language}", "{code_numbered}"}) EXPECT_NE(d.find(p), std::string::npos);
}

TEST(RenderPrompt, Substitutes) {
  auto ex = example();
  auto r = render_prompt(PromptTemplate::parse("P={problem}|L={language}|C=\n{code_numbered}|{x}"), ex);
  EXPECT_EQ(r.text, "P=Add two numbers.|L=java|C=\n1: // add\n2: int a = 1;\n3: \n4: int b = a + 1;\n5: }|{x}");
  EXPECT_TRUE(r.warnings.empty());
}

TEST(RenderPrompt, NoRescan) {
  auto ex = example("uses {code_numbered} literally");
  auto r = render_prompt(PromptTemplate::parse("{problem}/{language}/{code_numbered}"), ex);
  EXPECT_EQ(r.text.rfind("uses {code_numbered} literally/java/1: ", 0), 0u);
}

TEST(RenderPrompt, EmptyProblemWarns) {
  auto r = render_prompt(PromptTemplate::default_template(), example(""));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(ParseResponse, ArrayFenceAndObject) {
  auto ex = example();
  const std::string arr = R"([{"line":2,"explanations":["Sets a.","Declares a."]},{"line":4,"explanations":["Adds."]}])";
  auto a = parse_response(arr, ex);
  EXPECT_EQ(a.candidates, (CandidateMap{{2, {"Sets a.", "Declares a."}}, {4, {"Adds."}}}));
  EXPECT_TRUE(a.warnings.empty());
  EXPECT_EQ(parse_response("```json\n" + arr + "\n```", ex).candidates, a.candidates);
  EXPECT_EQ(parse_response(R"({"lines":)" + arr + "}", ex).candidates, a.candidates);
}

TEST(ParseResponse, DropsWithWarnings) {
  auto ex = example();
  auto r = parse_response(
      R"([{"line":1,"explanations":["comment"]},{"line":9,"explanations":["x"]},
          {"nope":1},{"line":2,"explanations":["", 5, "Ok."]}])",
      ex);
  EXPECT_EQ(r.candidates, (CandidateMap{{2, {"Ok."}}}));
  EXPECT_EQ(r.warnings.size(), 5u);
}

TEST(ParseResponse, Unparseable) {
  auto ex = example();
  EXPECT_THROW(parse_response("Sure! Here you go.", ex), Error);
  EXPECT_THROW(parse_response(R"({"a":1})", ex), Error);
}

TEST(MockProvider, SynthesisesPerLine) {
  auto ex = example();
  GenerationRequest req{"ex-1", render_prompt(PromptTemplate::default_template(), ex).text, "m", 0.0};
  MockProvider mock;
  const std::string raw = mock.complete(req);
  EXPECT_EQ(raw, MockProvider().complete(req));
  auto parsed = parse_response(raw, ex);
  ASSERT_EQ(parsed.candidates.size(), 2u);
  EXPECT_EQ(parsed.candidates.at(2).size(), 2u);
  EXPECT_EQ(parsed.candidates.at(4).size(), 2u);

  MockProvider::Options o;
  o.seed = 1;
  EXPECT_NE(MockProvider(o).complete(req), raw);
  o.fixture = CandidateMap{{4, {"Only this."}}};
  EXPECT_EQ(parse_response(MockProvider(o).complete(req), ex).candidates,
            (CandidateMap{{4, {"Only this."}}}));
  o.raw_reply = "not json";
  EXPECT_EQ(MockProvider(o).complete(req), "not json");
}

TEST(GenerationRequest, Validate) {
  GenerationRequest r{"e", "p", "m", 2.0};
  EXPECT_NO_THROW(r.validate());
  r.temperature = 2.5;
  EXPECT_THROW(r.validate(), Error);
  r.temperature = -0.1;
  EXPECT_THROW(r.validate(), Error);
  r = {"e", "", "m", 0.0};
  EXPECT_THROW(r.validate(), Error);
}
