#include <gtest/gtest.h>

#include "support.hpp"

using namespace tbkit;

namespace {

constexpr const char* kTwoSentences =
    "# sent_id = 1\n"
    "1\tAli\tAli\tPROPN\tProp\tPerson=3|Case=Nom\t2\tnsubj\t_\tSpaceAfter=No|df=x\n"
    "2\tgeldi\tgel\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n"
    "1-2\tseninki\t_\t_\t_\t_\t_\t_\t_\tSpaceAfter=No\n"
    "1\tsenin\tsen\tPRON\tPERS\tCase=Gen\t2\tnmod:poss\t_\t_\n"
    "2\tki\tki\tPRON\tPartic\t_\t0\troot\t_\t_\n"
    "\n";

}  // namespace

TEST(Parse, ReadsTokensSpansAndComments) {
  auto tb = parse_document(kTwoSentences);
  ASSERT_EQ(tb.sentences.size(), 2u);
  const auto& s0 = tb.sentences[0];
  EXPECT_EQ(s0.comments, std::vector<std::string>{"# sent_id = 1"});
  EXPECT_EQ(s0.tokens[0].form, "Ali");
  EXPECT_EQ(s0.tokens[0].head, 2);
  EXPECT_EQ(s0.tokens[0].feats.str(), "Case=Nom|Person=3");
  EXPECT_EQ(s0.tokens[0].misc.str(), "SpaceAfter=No|df=x");
  EXPECT_TRUE(s0.tokens[1].xpos.empty());
  const auto& s1 = tb.sentences[1];
  ASSERT_EQ(s1.spans.size(), 1u);
  EXPECT_EQ(s1.spans[0].start, 1);
  EXPECT_EQ(s1.spans[0].end, 2);
  EXPECT_EQ(s1.spans[0].form, "seninki");
  EXPECT_EQ(s1.spans[0].misc.str(), "SpaceAfter=No");
  EXPECT_EQ(s1.span_of(2), &s1.spans[0]);
}

TEST(Parse, NormalizesFeatureOrderButKeepsMiscOrder) {
  auto tb = parse_document(kTwoSentences);
  auto out = serialize_document(tb);
  EXPECT_NE(out.find("Case=Nom|Person=3"), std::string::npos);
  EXPECT_NE(out.find("SpaceAfter=No|df=x"), std::string::npos);
}

TEST(Parse, FeatureKeysSortCaseInsensitively) {
  auto f = parse_feats("Number[psor]=Sing|person=3|Case=Loc|Number=Sing");
  EXPECT_EQ(f.str(), "Case=Loc|Number=Sing|Number[psor]=Sing|person=3");
}

TEST(Parse, ToleratesBomCrlfAndMissingFinalBlankLine) {
  std::string doc = "\xEF\xBB\xBF# a\r\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\r\n";
  auto tb = parse_document(doc);
  ASSERT_EQ(tb.sentences.size(), 1u);
  EXPECT_EQ(serialize_document(tb), "# a\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\n");
}

TEST(Parse, ReportsLineNumbers) {
  auto expect_line = [](const std::string& doc, std::size_t line) {
    try {
      parse_document(doc);
      FAIL() << "no error for:\n" << doc;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect_line("1\tx\tx\tX\t_\t_\t0\troot\t_\n", 1);                                  // 9 columns
  expect_line("1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n# late\n", 2);                      // comment inside
  expect_line("1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n1.1\ty\ty\tX\t_\t_\t_\t_\t_\t_\n", 2);  // empty node
  expect_line("1\tx\tx\tX\t_\t_\tA\troot\t_\t_\n", 1);                                  // head
  expect_line("\n\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n3\ty\ty\tX\t_\t_\t1\tdep\t_\t_\n", 4);  // id gap
  expect_line("1\tx\tx\tX\t_\t_\t1\troot\t_\t_\n", 1);                                  // self head
  expect_line("1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n2\tx\tx\tX\t_\tnoequals\t1\tdep\t_\t_\n", 2);
  expect_line("1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n2\ty\ty\tX\t_\t_\t1\tdep\t_\ta||b\n", 2);
}

TEST(Parse, RejectsOverlappingSpansEvenWhenLenient) {
  std::string doc =
      "1-2\tab\t_\t_\t_\t_\t_\t_\t_\t_\n2-3\tbc\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n3\tc\tc\tX\t_\t_\t1\tdep\t_\t_\n";
  EXPECT_THROW(parse_document(doc), ParseError);
  EXPECT_THROW(parse_document(doc, ParseOptions{.strict = false}), ParseError);
}

TEST(Parse, LenientModeKeepsBrokenStructure) {
  std::string doc = "1\tx\tx\tX\t_\t_\t7\troot\t_\t_\n";
  EXPECT_THROW(parse_document(doc), ParseError);
  auto tb = parse_document(doc, ParseOptions{.strict = false});
  EXPECT_EQ(tb.sentences[0].tokens[0].head, 7);
}

TEST(Parse, EmptyInputIsAnEmptyTreebank) {
  EXPECT_TRUE(parse_document("").sentences.empty());
  EXPECT_TRUE(parse_document("\n\n").sentences.empty());
}

TEST(Columns, SetColumnParsesFileText) {
  Token t;
  set_column(t, Field::Feats, "Person=3|Case=Nom");
  EXPECT_EQ(column(t, Field::Feats), "Case=Nom|Person=3");
  set_column(t, Field::Head, "4");
  EXPECT_EQ(t.head, 4);
  set_column(t, Field::Head, "_");
  EXPECT_FALSE(t.head);
  set_column(t, Field::Upos, "_");
  EXPECT_EQ(column(t, Field::Upos), "_");
  EXPECT_THROW(set_column(t, Field::Head, "x"), FormatError);
  EXPECT_THROW(set_column(t, Field::Form, "a\tb"), FormatError);
  EXPECT_EQ(parse_field("deprel"), Field::Deprel);
  EXPECT_FALSE(parse_field("ID"));
}

TEST(Serialize, SpanLinesCarryOnlyIdFormAndMisc) {
  auto tb = support::fixture("table6.conllu");
  auto lines = sentence_lines(tb.sentences[0]);
  EXPECT_EQ(lines[2], "1-2\tbaşındaki\t_\t_\t_\t_\t_\t_\t_\t_");
}

TEST(Serialize, AppendixFixturesAreAlreadyNormalized) {
  for (auto name : {"table5.conllu", "table6.conllu", "table7.conllu", "table8.conllu",
                    "mixed50.conllu"}) {
    EXPECT_EQ(serialize_document(support::fixture(name)), support::fixture_text(name)) << name;
  }
}

TEST(Serialize, RefusesValuesThatWouldBreakTheFormat) {
  Treebank tb;
  Sentence s;
  Token t;
  t.id = 1;
  t.form = "a b\tc";
  t.head = 0;
  s.tokens.push_back(t);
  tb.sentences.push_back(s);
  EXPECT_THROW(serialize_document(tb), SerializationError);
}

TEST(Serialize, TokenLineNumbersFollowTheLayout) {
  auto tb = parse_document(kTwoSentences);
  EXPECT_EQ(token_line_numbers(tb, 0), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(token_line_numbers(tb, 1), (std::vector<std::size_t>{6, 7}));
}

TEST(Fingerprint, ChangesWithAnyColumn) {
  auto tb = support::fixture("table6.conllu");
  auto fp = fingerprint(tb);
  EXPECT_EQ(fp.size(), 16u);
  auto copy = tb;
  copy.sentences[0].tokens[1].misc.add("x", "y");
  EXPECT_NE(fingerprint(copy), fp);
  auto moved = tb;
  moved.source = "elsewhere";
  EXPECT_EQ(moved, tb);
}

TEST(RoundTripProperty, RandomSentencesSurviveSerializeParse) {
  support::Rng rng(20240501);
  for (int i = 0; i < 1000; ++i) {
    Treebank tb;
    tb.sentences.push_back(support::random_sentence(rng, 15, i % 2 == 0));
    auto text = serialize_document(tb);
    auto back = parse_document(text);
    ASSERT_EQ(back, tb) << text;
    ASSERT_EQ(serialize_document(back), text);
  }
}
