#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "support.hpp"

using namespace tbkit;

namespace {

const Treebank& mixed() {
  static const Treebank tb = support::fixture("mixed50.conllu");
  return tb;
}

// (1-based sentence, token, field name or "split", new value)
using Row = std::tuple<std::size_t, int, std::string, std::string>;

std::vector<Row> rows(const ChangeSet& cs) {
  std::vector<Row> out;
  for (const auto& r : cs.records) {
    out.emplace_back(r.sentence + 1, r.token,
                     r.kind == RecordKind::TokenSplit ? "split" : std::string(field_name(r.field)),
                     r.new_value);
  }
  return out;
}

}  // namespace

TEST(KiGolden, AdjectivizerMatchesAppendixTable) {
  auto tb = support::fixture("table5.conllu");
  auto cs = rules::split_ki(tb);
  ASSERT_EQ(cs.records.size(), 1u);
  EXPECT_EQ(cs.records[0].confidence, Confidence::Review);  // başında is ambiguous
  auto out = apply_changeset(tb, cs);
  EXPECT_EQ(out, support::fixture("table6.conllu"));
  EXPECT_EQ(serialize_document(out), support::fixture_text("table6.conllu"));
}

TEST(KiGolden, PronominalMatchesAppendixTable) {
  auto tb = support::fixture("table7.conllu");
  auto cs = rules::split_ki(tb);
  ASSERT_EQ(cs.records.size(), 1u);
  EXPECT_EQ(cs.records[0].confidence, Confidence::Auto);
  auto out = apply_changeset(tb, cs, ApplyMode::AutoOnly);
  EXPECT_EQ(serialize_document(out), support::fixture_text("table8.conllu"));
}

TEST(KiRule, SpaceAfterMovesToTheSpanLine) {
  auto tb = parse_document(
      "1\tmasadaki\tmasadaki\tADJ\tAdj\t_\t2\tamod\t_\tSpaceAfter=No|Gloss=x\n"
      "2\tkitap\tkitap\tNOUN\t_\tCase=Nom\t0\troot\t_\t_\n");
  auto out = apply_changeset(tb, rules::split_ki(tb));
  const auto& s = out.sentences[0];
  ASSERT_EQ(s.spans.size(), 1u);
  EXPECT_EQ(s.spans[0].misc.str(), "SpaceAfter=No");
  EXPECT_EQ(s.tokens[0].misc.str(), "Gloss=x");
  EXPECT_EQ(s.tokens[0].feats.str(), "Case=Loc|Number=Sing|Person=3");
  EXPECT_EQ(s.tokens[0].lemma, "masa");
}

TEST(KiRule, SplitsOnMixedCorpus) {
  EXPECT_EQ(rows(rules::split_ki(mixed())),
            (std::vector<Row>{{1, 1, "split", "evde + ki"},
                              {2, 1, "split", "başında + ki"},
                              {3, 1, "split", "senin + ki"},
                              {4, 1, "split", "benim + ki"},
                              {5, 1, "split", "bugün + kü"},
                              {6, 2, "split", "evinde + ki"},
                              {7, 1, "split", "onun + ki"},
                              {8, 1, "split", "masada + ki"},
                              {46, 1, "split", "dün + kü"},
                              {47, 1, "split", "bahçede + ki"}}));
}

TEST(DfRule, TuyluGetsItsStem) {
  auto tb = support::fixture("df_tuylu.conllu");
  auto cs = rules::suggest_df(tb);
  ASSERT_EQ(cs.records.size(), 1u);
  EXPECT_EQ(cs.records[0].new_value, "df=tüy");
  EXPECT_EQ(cs.records[0].confidence, Confidence::Auto);
}

TEST(DfRule, OnMixedCorpus) {
  auto cs = rules::suggest_df(mixed());
  EXPECT_EQ(rows(cs), (std::vector<Row>{{9, 1, "MISC", "df=tüy"},
                                        {10, 1, "MISC", "df=sabır"},
                                        {11, 1, "MISC", "df=önem"},
                                        {12, 1, "MISC", "df=mut"},
                                        {13, 1, "MISC", "df=renk"},
                                        {14, 1, "MISC", "df=süt"},
                                        {15, 1, "MISC", "df=gürültü"},
                                        {16, 1, "MISC", "df=akıl"},
                                        {23, 2, "MISC", "df=mut"},
                                        {48, 1, "MISC", "df=yağ"},
                                        {50, 1, "MISC", "df=şeker"}}));
  // gürültü is not in the default stem lexicon.
  EXPECT_EQ(cs.records[6].confidence, Confidence::Review);
}

TEST(DfRule, DisharmonicEndingIsIgnored) {
  EXPECT_EQ(rules::derivation_stem("tüylü"), "tüy");
  EXPECT_EQ(rules::derivation_stem("Sabırsız"), "sabır");
  EXPECT_FALSE(rules::derivation_stem("tüylı"));
  EXPECT_FALSE(rules::derivation_stem("li"));
  EXPECT_FALSE(rules::derivation_stem("güzel"));
}

TEST(NullcopRule, OnMixedCorpus) {
  EXPECT_EQ(rows(rules::suggest_nullcop(mixed())),
            (std::vector<Row>{{3, 2, "MISC", "nullcop=3s"},
                              {5, 3, "MISC", "nullcop=3s"},
                              {6, 4, "MISC", "nullcop=3s"},
                              {7, 2, "MISC", "nullcop=3s"},
                              {17, 2, "MISC", "nullcop=3s"},
                              {18, 2, "MISC", "nullcop=3p"},
                              {19, 2, "MISC", "nullcop=3p"},
                              {20, 2, "MISC", "nullcop=3s"},
                              {21, 3, "MISC", "nullcop=3s"},
                              {23, 2, "MISC", "nullcop=3p"},
                              {47, 3, "MISC", "nullcop=3p"}}));
}

TEST(CopRule, OnMixedCorpus) {
  EXPECT_EQ(rows(rules::classify_copula(mixed())),
            (std::vector<Row>{{24, 3, "UPOS", "NOUN"},
                              {24, 3, "XPOS", "Exist"},
                              {25, 2, "UPOS", "NOUN"},
                              {25, 2, "XPOS", "Exist"},
                              {26, 2, "DEPREL", "compound:lvc"},
                              {27, 3, "DEPREL", "compound:lvc"},
                              {28, 2, "UPOS", "AUX"},
                              {29, 2, "UPOS", "AUX"},
                              {29, 2, "XPOS", "Ptcp"},
                              {29, 2, "DEPREL", "cop"}}));
}

TEST(CopRule, OnlyExistentialsAreAuto) {
  for (const auto& r : rules::classify_copula(mixed()).records) {
    bool existential = r.note.rfind("existential", 0) == 0;
    EXPECT_EQ(r.confidence, existential ? Confidence::Auto : Confidence::Review) << r.note;
  }
}

TEST(EmphRule, OnMixedCorpus) {
  auto cs = rules::suggest_emph(mixed());
  EXPECT_EQ(rows(cs), (std::vector<Row>{{32, 2, "HEAD", "1"},
                                        {32, 2, "DEPREL", "advmod:emph"},
                                        {33, 2, "HEAD", "1"},
                                        {33, 2, "DEPREL", "advmod:emph"},
                                        {34, 2, "HEAD", "1"},
                                        {34, 2, "DEPREL", "advmod:emph"},
                                        {35, 2, "HEAD", "1"},
                                        {35, 2, "DEPREL", "advmod:emph"},
                                        {49, 2, "HEAD", "1"},
                                        {49, 2, "DEPREL", "advmod:emph"}}));
}

TEST(TmodRule, OnMixedCorpus) {
  EXPECT_EQ(rows(rules::suggest_tmod(mixed())),
            (std::vector<Row>{{37, 1, "DEPREL", "obl:tmod"},
                              {38, 1, "DEPREL", "obl:tmod"},
                              {39, 1, "DEPREL", "obl:tmod"},
                              {40, 1, "DEPREL", "obl:tmod"},
                              {41, 2, "DEPREL", "obl:tmod"},
                              {42, 1, "DEPREL", "obl:tmod"},
                              {49, 3, "DEPREL", "obl:tmod"}}));
}

TEST(RuleList, ParsesNamesIntoCanonicalOrder) {
  EXPECT_EQ(rules::parse_rule_list("all"), rules::rule_names());
  EXPECT_EQ(rules::parse_rule_list("tmod, KI"), (std::vector<std::string>{"ki", "tmod"}));
  EXPECT_THROW(rules::parse_rule_list("ki,bogus"), ArgumentError);
  EXPECT_THROW(rules::parse_rule_list(" , "), ArgumentError);
}

TEST(Pipeline, EachRuleIsIdempotentAfterApplying) {
  for (const auto& name : rules::rule_names()) {
    auto once = apply_changeset(mixed(), rules::run_rule(name, mixed(), Lexicons::defaults()));
    auto again = rules::run_rule(name, once, Lexicons::defaults());
    EXPECT_TRUE(again.empty()) << name << " proposed " << again.records.size() << " more";
  }
}

TEST(Pipeline, StagesChainFingerprints) {
  auto res = rules::run_pipeline(mixed(), {"tmod", "ki"}, Lexicons::defaults(), ApplyMode::All);
  ASSERT_EQ(res.stages.size(), 2u);
  EXPECT_EQ(res.stages[0].rules, std::vector<std::string>{"ki"});
  EXPECT_EQ(res.stages[0].fingerprint, fingerprint(mixed()));
  auto after_ki = apply_changeset(mixed(), res.stages[0]);
  EXPECT_EQ(res.stages[1].fingerprint, fingerprint(after_ki));
  EXPECT_EQ(res.result, apply_changeset(after_ki, res.stages[1]));
}

TEST(Pipeline, AutoOnlyLeavesReviewRecordsAlone) {
  auto res = rules::run_pipeline(mixed(), rules::rule_names(), Lexicons::defaults(),
                                 ApplyMode::AutoOnly);
  // Split proposals flagged for review stay unsplit.
  EXPECT_TRUE(res.result.sentences[1].spans.empty());
  EXPECT_EQ(res.result.sentences[0].spans.size(), 1u);
  for (const auto& s : res.result.sentences) {
    for (const auto& t : s.tokens) EXPECT_FALSE(t.misc.has("nullcop"));
  }
}

TEST(Pipeline, FullRunValidatesAndSettles) {
  auto res = rules::run_pipeline(mixed(), rules::rule_names(), Lexicons::defaults(),
                                 ApplyMode::All);
  auto diags = validate(res.result, Level::Ud, InventoryConfig::defaults());
  for (const auto& d : diags) ADD_FAILURE() << format_diagnostic(d);
  auto again = rules::suggest(res.result, rules::rule_names(), Lexicons::defaults());
  EXPECT_TRUE(again.empty());
}

TEST(TreePreservationProperty, RulesNeverBreakTheTree) {
  support::Rng rng(4242);
  const auto cfg = InventoryConfig::defaults();
  std::size_t records = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto tb = support::random_treebank(rng, 4, 10, false);
    // Sprinkle in words the rules react to.
    for (auto& s : tb.sentences) {
      for (auto& t : s.tokens) {
        if (!support::coin(rng, 0.2)) continue;
        static const std::vector<std::tuple<const char*, const char*, const char*>> kWords = {
            {"evdeki", "ADJ", "amod"}, {"seninki", "NOUN", "nsubj"}, {"tüylü", "ADJ", "amod"},
            {"de", "CCONJ", "cc"},     {"dün", "NOUN", "obl"},       {"var", "ADJ", "root"},
            {"oldu", "VERB", "root"},  {"sorun", "NOUN", "obj"}};
        const auto& [form, upos, deprel] = support::pick(rng, kWords);
        t.form = form;
        t.lemma = std::string(form) == "oldu" ? "ol" : form;
        t.upos = upos;
        if (t.head != 0) t.deprel = std::string(deprel) == "root" ? "obj" : deprel;
      }
    }
    auto res = rules::run_pipeline(tb, rules::rule_names(), Lexicons::defaults(), ApplyMode::All);
    for (const auto& st : res.stages) records += st.records.size();
    for (const auto& d : validate(res.result, Level::Ud, cfg)) {
      ASSERT_FALSE(oracle::kStructuralCodes.count(d.code)) << "trial " << trial << ": " << format_diagnostic(d);
    }
  }
  EXPECT_GT(records, 300u);
}
