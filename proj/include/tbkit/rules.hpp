#ifndef TBKIT_RULES_HPP
#define TBKIT_RULES_HPP

// Re-annotation rules. Each rule is a pure function from a treebank to a
// ChangeSet; none of them edits anything itself.
//
//   ki       split -ki words into host + ki (adjectivizer / pronominal)
//   df       MISC df=<stem> on -lI / -sIz adjectives
//   nullcop  MISC nullcop=3s|3p on nominal clause heads without a copula
//   cop      UPOS/XPOS/DEPREL for var, yok and the functions of ol-
//   emph     advmod:emph on the dA clitic
//   tmod     obl:tmod on temporal obliques

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tbkit/changeset.hpp"
#include "tbkit/conllu.hpp"
#include "tbkit/lexicons.hpp"
#include "tbkit/morphology.hpp"

namespace tbkit::rules {

/// Canonical order; ki runs first because splits renumber tokens.
inline const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names = {"ki", "df", "nullcop", "cop", "emph", "tmod"};
  return names;
}

/// Parses a comma-separated rule list into canonical order.
inline std::vector<std::string> parse_rule_list(std::string_view list) {
  std::vector<bool> chosen(rule_names().size(), false);
  for (auto& raw : text::split(list, ',')) {
    auto name = text::ascii_lower(text::trim(raw));
    if (name.empty()) continue;
    if (name == "all") {
      chosen.assign(chosen.size(), true);
      continue;
    }
    auto it = std::find(rule_names().begin(), rule_names().end(), name);
    if (it == rule_names().end()) throw ArgumentError("unknown rule '" + name + "'");
    chosen[it - rule_names().begin()] = true;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i]) out.push_back(rule_names()[i]);
  }
  if (out.empty()) throw ArgumentError("no rules selected");
  return out;
}

namespace detail {

inline ChangeSet new_changeset(const Treebank& tb, std::string rule) {
  ChangeSet cs;
  cs.fingerprint = fingerprint(tb);
  cs.rules = {std::move(rule)};
  return cs;
}

inline void push(ChangeSet& cs, std::optional<ChangeRecord> r) {
  if (r) cs.records.push_back(std::move(*r));
}

inline std::string deprel_base(std::string_view deprel) {
  return std::string(deprel.substr(0, deprel.find(':')));
}

inline bool is_clause_head(const Token& t, const Lexicons& lex) {
  return (t.head && *t.head == 0) || lex.clausal_deprels.count(deprel_base(t.deprel)) > 0;
}

inline std::vector<std::vector<int>> children_of(const Sentence& s) {
  std::vector<std::vector<int>> kids(s.size() + 1);
  for (const auto& t : s.tokens) {
    if (t.head && *t.head >= 0 && *t.head <= static_cast<int>(s.size())) {
      kids[*t.head].push_back(t.id);
    }
  }
  return kids;
}

/// True when `node` lies on the head path of `descendant` (or equals it).
inline bool dominates(const Sentence& s, int node, int descendant) {
  int cur = descendant;
  for (std::size_t steps = 0; steps <= s.size(); ++steps) {
    if (cur == node) return true;
    const Token* t = s.find(cur);
    if (!t || !t->head || *t->head == 0) return false;
    cur = *t->head;
  }
  return true;  // cycle: treat as unsafe
}

inline bool is_participle(const Token& t) {
  return t.feats.has("VerbForm", "Part") || t.xpos == "Ptcp";
}

inline std::string lower(std::string_view s) { return text::turkish_lower(s); }

/// SpaceAfter and similar surface flags belong on the multiword span line.
inline void move_surface_misc(const MiscBag& from, MiscBag& word, MiscBag& span) {
  for (const auto& e : from.entries()) {
    if (e.key == "SpaceAfter" || e.key == "SpacesAfter" || e.key == "SpacesBefore") {
      span.add(e.key, e.value);
    } else {
      word.add(e.key, e.value);
    }
  }
}

inline Token host_token(const Token& source, const morph::KiAnalysis& a) {
  Token host;
  host.form = a.residue;
  if (a.host) {
    const auto& h = *a.host;
    host.lemma = h.proper ? h.stem : text::turkish_lower(h.stem);
    host.feats = h.features();
    if (h.pronoun()) {
      host.upos = "PRON";
      host.xpos = h.pron_type == "Prs" ? "PERS" : "Demons";
    } else if (source.upos == "NOUN" || source.upos == "PROPN" || source.upos == "PRON") {
      host.upos = source.upos;
    } else {
      host.upos = h.proper ? "PROPN" : "NOUN";
    }
  } else {
    host.lemma = text::turkish_lower(a.residue);
    host.upos = "NOUN";
    host.feats = FeatureBag::parse("Case=Nom|Number=Sing|Person=3");
  }
  return host;
}

}  // namespace detail

/// Proposes splitting every -ki word. Adjectivizer: host (nmod when the word
/// was amod) + ki PART/Attr dep:der. Pronominal: genitive host nmod:poss +
/// ki PRON/Partic inheriting the word's head and relation.
inline ChangeSet split_ki(const Treebank& tb, const Lexicons& lex = Lexicons::defaults()) {
  auto cs = detail::new_changeset(tb, "ki");
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    const auto& s = tb.sentences[si];
    for (const auto& t : s.tokens) {
      if (s.span_of(t.id) || !t.head) continue;
      auto a = morph::analyze_ki(t, lex);
      if (a.cls == morph::KiClass::None && !a.temporal) continue;

      ChangeRecord r;
      r.sentence = si;
      r.token = t.id;
      r.kind = RecordKind::TokenSplit;
      r.old_value = t.form;
      r.new_value = a.residue + " + " + a.suffix;
      r.rule = "ki";
      r.split.span_form = t.form;

      Token host = detail::host_token(t, a);
      MiscBag host_misc;
      detail::move_surface_misc(t.misc, host_misc, r.split.span_misc);
      host.misc = host_misc;
      Token ki;
      ki.form = a.suffix;
      ki.lemma = "ki";

      if (a.cls == morph::KiClass::Pronominal) {
        host.deprel = "nmod:poss";
        ki.upos = "PRON";
        ki.xpos = "Partic";
        ki.feats.set("Case", "Nom");
        ki.feats.set("Number", t.feats.get("Number").value_or("Sing"));
        ki.deprel = t.deprel;
        r.split.parts = {{host, HeadRef::part(1)}, {ki, HeadRef::token(*t.head)}};
        r.split.dependents_to = 1;
      } else {
        host.deprel = morph::deprel_is(t.deprel, "amod") ? "nmod" : t.deprel;
        ki.upos = "PART";
        ki.xpos = "Attr";
        ki.deprel = "dep:der";
        r.split.parts = {{host, HeadRef::token(*t.head)}, {ki, HeadRef::part(0)}};
        r.split.dependents_to = 0;
      }

      if (a.temporal) {
        r.confidence = Confidence::Review;
        r.note = "no case morphology recognized on host '" + a.residue +
                 "'; split proposed as temporal -ki";
      } else if (a.host->ambiguous) {
        r.confidence = Confidence::Review;
        r.note = a.host->note;
      } else {
        r.confidence = Confidence::Auto;
      }
      cs.records.push_back(std::move(r));
    }
  }
  sort_records(cs.records);
  return cs;
}

/// Stem of an -lI / -sIz adjective, when the ending harmonizes with it.
inline std::optional<std::string> derivation_stem(std::string_view form) {
  auto lower = text::turkish_lower(text::decode(form));
  for (auto arch : {morph::Archiphoneme::lI, morph::Archiphoneme::sIz}) {
    for (char32_t v : {U'ı', U'i', U'u', U'ü'}) {
      std::u32string surface = arch == morph::Archiphoneme::lI ? U"l" : U"s";
      surface.push_back(v);
      if (arch == morph::Archiphoneme::sIz) surface.push_back(U'z');
      if (lower.size() <= surface.size() ||
          lower.substr(lower.size() - surface.size()) != surface) {
        continue;
      }
      auto residue = lower.substr(0, lower.size() - surface.size());
      if (residue.size() < 2 || !morph::has_vowel(residue)) continue;
      auto residue_text = text::encode(residue);
      if (morph::harmony_surface(arch, residue_text) == text::encode(surface)) {
        return residue_text;
      }
    }
  }
  return std::nullopt;
}

/// MISC df=<surface stem> on derived -lI / -sIz adjectives.
inline ChangeSet suggest_df(const Treebank& tb, const Lexicons& lex = Lexicons::defaults()) {
  auto cs = detail::new_changeset(tb, "df");
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    for (const auto& t : tb.sentences[si].tokens) {
      if (t.upos != "ADJ" || t.misc.has("df")) continue;
      auto stem = derivation_stem(t.form);
      if (!stem) continue;
      MiscBag misc = t.misc;
      misc.add("df", *stem);
      bool known = lex.stems.count(*stem) > 0;
      detail::push(cs, field_edit(si, t, Field::Misc, misc.str(), "df",
                                  known ? Confidence::Auto : Confidence::Review,
                                  known ? "" : "stem '" + *stem + "' not in stem lexicon"));
    }
  }
  sort_records(cs.records);
  return cs;
}

/// MISC nullcop=3s|3p on nominal clause heads with no overt copula.
inline ChangeSet suggest_nullcop(const Treebank& tb, const Lexicons& lex = Lexicons::defaults()) {
  static const std::set<std::string> kNominal = {"NOUN", "ADJ", "PRON", "PROPN", "NUM"};
  auto cs = detail::new_changeset(tb, "nullcop");
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    const auto& s = tb.sentences[si];
    auto kids = detail::children_of(s);
    for (const auto& t : s.tokens) {
      if (!kNominal.count(t.upos) || !detail::is_clause_head(t, lex)) continue;
      if (t.misc.has("nullcop")) continue;
      const auto lemma = detail::lower(t.lemma);
      if (lemma == "var" || lemma == "yok") continue;  // existential, see classify_copula
      // Tense or evidentiality on a nominal means the copula is a suffix (-DI, -mIş).
      if (t.feats.get("Tense") || t.feats.get("Evident")) continue;
      if (auto person = t.feats.get("Person"); person && *person != "3") continue;
      bool overt = false;
      bool plural = t.feats.has("Number", "Plur");
      for (int k : kids[t.id]) {
        const Token* c = s.find(k);
        if (morph::deprel_is(c->deprel, "cop") || c->upos == "AUX") overt = true;
        if (morph::deprel_is(c->deprel, "nsubj") && c->feats.has("Number", "Plur")) plural = true;
      }
      if (overt) continue;
      MiscBag misc = t.misc;
      misc.add("nullcop", plural ? "3p" : "3s");
      detail::push(cs, field_edit(si, t, Field::Misc, misc.str(), "nullcop", Confidence::Review,
                                  "null copula inferred from a nominal clause head"));
    }
  }
  sort_records(cs.records);
  return cs;
}

/// The existential var/yok and the functions of ol-.
inline ChangeSet classify_copula(const Treebank& tb, const Lexicons& lex = Lexicons::defaults()) {
  auto cs = detail::new_changeset(tb, "cop");
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    const auto& s = tb.sentences[si];
    for (const auto& t : s.tokens) {
      const auto lemma = detail::lower(t.lemma);
      const bool root = t.head && *t.head == 0;
      auto edit = [&](const Token& target, Field f, std::string value, Confidence c,
                      std::string note) {
        detail::push(cs, field_edit(si, target, f, std::move(value), "cop", c, std::move(note)));
      };

      if (lemma == "var" || lemma == "yok") {
        if (!detail::is_clause_head(t, lex)) continue;
        const std::string note = "existential " + lemma;
        edit(t, Field::Upos, "NOUN", Confidence::Auto, note);
        edit(t, Field::Xpos, "Exist", Confidence::Auto, note);
        if (root) edit(t, Field::Deprel, "root", Confidence::Auto, note);
        continue;
      }
      if (lemma != "ol" && lemma != "olmak") continue;

      const Token* prev = t.id > 1 ? s.find(t.id - 1) : nullptr;
      const bool bare_noun = prev && prev->upos == "NOUN" &&
                             prev->feats.get("Case").value_or("Nom") == "Nom" &&
                             !prev->feats.get("Number[psor]") &&
                             lex.lvc_nouns.count(detail::lower(prev->lemma));
      if (bare_noun) {
        const std::string note = "light verb construction with '" + prev->lemma + "'";
        edit(t, Field::Upos, "VERB", Confidence::Review, note);
        if (!root) {
          edit(t, Field::Deprel, "compound:lvc", Confidence::Review, note);
        } else if (prev->head && *prev->head == t.id) {
          edit(*prev, Field::Deprel, "compound:lvc", Confidence::Review,
               note + "; ol- heads the clause so the label sits on the noun");
        }
        continue;
      }
      if (prev && detail::is_participle(*prev)) {
        const std::string note = "ol- after a participle";
        edit(t, Field::Upos, "AUX", Confidence::Review, note);
        if (!root) edit(t, Field::Deprel, "aux", Confidence::Review, note);
        continue;
      }
      if (detail::is_participle(t) && !root && t.head) {
        const std::string note = "participial ol- in an embedded clause";
        edit(t, Field::Upos, "AUX", Confidence::Review, note);
        edit(t, Field::Xpos, "Ptcp", Confidence::Review, note);
        edit(t, Field::Deprel, "cop", Confidence::Review, note);
        continue;
      }
      const std::string note = "ol- as main verb";
      edit(t, Field::Upos, "VERB", Confidence::Review, note);
      if (root) edit(t, Field::Deprel, "root", Confidence::Review, note);
    }
  }
  sort_records(cs.records);
  return cs;
}

/// The dA clitic: advmod:emph attached to the preceding content word.
inline ChangeSet suggest_emph(const Treebank& tb) {
  static const std::set<std::string> kFunctionTags = {"PUNCT", "CCONJ", "SCONJ", "PART", "SYM"};
  static const std::set<std::string> kClitic = {"PART", "CCONJ", "SCONJ"};
  auto cs = detail::new_changeset(tb, "emph");
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    const auto& s = tb.sentences[si];
    for (const auto& t : s.tokens) {
      auto form = detail::lower(t.form);
      if ((form != "de" && form != "da") || !kClitic.count(t.upos)) continue;
      if (!t.head || *t.head == 0) continue;
      const Token* host = nullptr;
      for (int j = t.id - 1; j >= 1; --j) {
        const Token* c = s.find(j);
        if (c && !kFunctionTags.count(c->upos)) {
          host = c;
          break;
        }
      }
      if (!host || detail::dominates(s, t.id, host->id)) continue;
      const std::string note = "dA clitic after '" + host->form + "'";
      detail::push(cs, field_edit(si, t, Field::Head, std::to_string(host->id), "emph",
                                  Confidence::Review, note));
      detail::push(cs, field_edit(si, t, Field::Deprel, "advmod:emph", "emph",
                                  Confidence::Review, note));
    }
  }
  sort_records(cs.records);
  return cs;
}

/// obl -> obl:tmod for obliques whose lemma is temporal.
inline ChangeSet suggest_tmod(const Treebank& tb, const Lexicons& lex = Lexicons::defaults()) {
  auto cs = detail::new_changeset(tb, "tmod");
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    for (const auto& t : tb.sentences[si].tokens) {
      if (t.deprel != "obl" || !lex.temporal_nouns.count(detail::lower(t.lemma))) continue;
      detail::push(cs, field_edit(si, t, Field::Deprel, "obl:tmod", "tmod", Confidence::Review,
                                  "temporal lemma '" + t.lemma + "'"));
    }
  }
  sort_records(cs.records);
  return cs;
}

inline ChangeSet suggest_emph_tmod(const Treebank& tb, const Lexicons& lex = Lexicons::defaults()) {
  return merge_changesets({suggest_emph(tb), suggest_tmod(tb, lex)}, fingerprint(tb));
}

inline ChangeSet run_rule(std::string_view name, const Treebank& tb, const Lexicons& lex) {
  if (name == "ki") return split_ki(tb, lex);
  if (name == "df") return suggest_df(tb, lex);
  if (name == "nullcop") return suggest_nullcop(tb, lex);
  if (name == "cop") return classify_copula(tb, lex);
  if (name == "emph") return suggest_emph(tb);
  if (name == "tmod") return suggest_tmod(tb, lex);
  throw ArgumentError("unknown rule '" + std::string(name) + "'");
}

/// All selected rules on one snapshot, merged into a single ChangeSet.
/// Field edits on tokens that are also split are left for a later pass.
inline ChangeSet suggest(const Treebank& tb, const std::vector<std::string>& rules,
                         const Lexicons& lex) {
  std::vector<ChangeSet> sets;
  for (const auto& r : rules) sets.push_back(run_rule(r, tb, lex));
  return merge_changesets(sets, fingerprint(tb));
}

struct PipelineResult {
  std::vector<ChangeSet> stages;  // one per rule, each against the previous result
  Treebank result;
};

/// Runs the rules one after another in canonical order, applying each
/// stage (per `mode`) before computing the next.
inline PipelineResult run_pipeline(const Treebank& tb, std::vector<std::string> rules,
                                   const Lexicons& lex, ApplyMode mode) {
  std::vector<std::string> ordered;
  for (const auto& name : rule_names()) {
    if (std::find(rules.begin(), rules.end(), name) != rules.end()) ordered.push_back(name);
  }
  PipelineResult out;
  out.result = tb;
  for (const auto& name : ordered) {
    auto cs = run_rule(name, out.result, lex);
    out.result = apply_changeset(out.result, cs, mode);
    out.stages.push_back(std::move(cs));
  }
  return out;
}

}  // namespace tbkit::rules

#endif  // TBKIT_RULES_HPP
