#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace tbkit;

namespace {

Sentence table7_sentence() { return support::fixture("table7.conllu").sentences[0]; }

}  // namespace

TEST(InsertSplit, ReplacesTokenAndAddsSpan) {
  auto s = support::fixture("table5.conllu").sentences[0];
  SplitSpec spec;
  Token host, ki;
  host.form = "başında";
  host.deprel = "nmod";
  ki.form = "ki";
  ki.deprel = "dep:der";
  spec.parts = {{host, HeadRef::token(2)}, {ki, HeadRef::part(0)}};
  spec.span_form = "başındaki";
  auto out = insert_split(s, 1, spec);
  ASSERT_EQ(out.tokens.size(), 3u);
  EXPECT_EQ(out.tokens[0].head, 3);
  EXPECT_EQ(out.tokens[1].head, 1);
  EXPECT_EQ(out.tokens[2].id, 3);
  EXPECT_EQ(out.tokens[2].head, 0);
  ASSERT_EQ(out.spans.size(), 1u);
  EXPECT_EQ(out.spans[0].start, 1);
  EXPECT_EQ(out.spans[0].end, 2);
  EXPECT_EQ(out.comments, s.comments);
}

TEST(InsertSplit, DependentsFollowTheChosenPart) {
  // 1 <- 2 <- 3: split token 2 and hand its dependent to part 1.
  Sentence s;
  for (int i = 1; i <= 3; ++i) {
    Token t;
    t.id = i;
    t.form = "w" + std::to_string(i);
    t.head = i == 1 ? 0 : i - 1;
    s.tokens.push_back(t);
  }
  SplitSpec spec;
  spec.parts = {{Token{}, HeadRef::token(1)}, {Token{}, HeadRef::part(0)}};
  spec.span_form = "w2";
  spec.dependents_to = 1;
  auto out = insert_split(s, 2, spec);
  EXPECT_EQ(out.tokens[3].head, 3);  // old token 3 now hangs on part 1 (id 3)
}

TEST(InsertSplit, ShiftsLaterSpans) {
  auto s = parse_document(
               "1\tevdeki\tevdeki\tADJ\t_\t_\t3\tamod\t_\t_\n"
               "2-3\tseninki\t_\t_\t_\t_\t_\t_\t_\t_\n"
               "2\tsenin\tsen\tPRON\t_\t_\t3\tnmod:poss\t_\t_\n"
               "3\tki\tki\tPRON\t_\t_\t0\troot\t_\t_\n")
               .sentences[0];
  SplitSpec spec;
  spec.parts = {{Token{}, HeadRef::token(3)}, {Token{}, HeadRef::part(0)}};
  spec.span_form = "evdeki";
  auto out = insert_split(s, 1, spec);
  ASSERT_EQ(out.spans.size(), 2u);
  EXPECT_EQ(out.spans[0].start, 1);
  EXPECT_EQ(out.spans[0].end, 2);
  EXPECT_EQ(out.spans[1].start, 3);
  EXPECT_EQ(out.spans[1].end, 4);
  EXPECT_EQ(out.spans[1].form, "seninki");
  EXPECT_EQ(out.tokens[0].head, 4);
  EXPECT_EQ(out.tokens[2].head, 4);
}

TEST(InsertSplit, RejectsBadRequests) {
  auto s = table7_sentence();
  SplitSpec one;
  one.parts = {{Token{}, HeadRef::token(0)}};
  EXPECT_THROW(insert_split(s, 1, one), ArgumentError);

  SplitSpec spec;
  spec.parts = {{Token{}, HeadRef::token(0)}, {Token{}, HeadRef::part(0)}};
  EXPECT_THROW(insert_split(s, 2, spec), ArgumentError);
  EXPECT_THROW(insert_split(s, 0, spec), ArgumentError);

  auto self_ref = spec;
  self_ref.parts[1].head = HeadRef::part(1);
  EXPECT_THROW(insert_split(s, 1, self_ref), ArgumentError);

  auto to_replaced = spec;
  to_replaced.parts[0].head = HeadRef::token(1);
  EXPECT_THROW(insert_split(s, 1, to_replaced), ArgumentError);

  auto bad_dependents = spec;
  bad_dependents.dependents_to = 2;
  EXPECT_THROW(insert_split(s, 1, bad_dependents), ArgumentError);

  auto split8 = support::fixture("table8.conllu").sentences[0];
  EXPECT_THROW(insert_split(split8, 1, spec), ArgumentError);
}

TEST(SplitSafetyProperty, MatchesBruteForceRenumbering) {
  support::Rng rng(77);
  const auto cfg = InventoryConfig::defaults();
  int splits = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto s = support::random_sentence(rng, 12, trial % 3 == 0);
    for (int at = 1; at <= static_cast<int>(s.tokens.size()); ++at) {
      auto spec = support::random_split(rng, s, at);
      if (s.span_of(at)) {
        EXPECT_THROW(insert_split(s, at, spec), ArgumentError);
        continue;
      }
      auto out = insert_split(s, at, spec);
      ++splits;
      auto expected = oracle::split_heads(s, at, spec);
      ASSERT_EQ(out.tokens.size(), expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        ASSERT_EQ(out.tokens[i].head, expected[i]) << "trial " << trial << " at " << at;
      }
      Treebank tb;
      tb.sentences.push_back(out);
      for (const auto& d : validate(tb, Level::Ud, cfg)) {
        ASSERT_FALSE(oracle::kStructuralCodes.count(d.code)) << d.code << ": " << d.message;
      }
    }
  }
  EXPECT_GT(splits, 2000);
}
