#ifndef TBKIT_MORPHOLOGY_HPP
#define TBKIT_MORPHOLOGY_HPP

// The Turkish suffix rules the re-annotation conventions depend on: vowel
// harmony for -lI / -sIz, a small case/possession analyzer for the host of
// -ki, and the two-way -ki classification.
//
// This is deliberately not a general morphological analyzer. It recognizes
// the locative and genitive endings, the possessive markers that may precede
// them, the plural, and a closed table of pronoun forms.

#include <optional>
#include <string>
#include <string_view>

#include "tbkit/conllu.hpp"
#include "tbkit/lexicons.hpp"
#include "tbkit/text.hpp"

namespace tbkit::morph {

class NoSurfaceError : public Error {
 public:
  using Error::Error;
};

enum class Archiphoneme { lI, sIz };

inline std::string_view archiphoneme_name(Archiphoneme a) {
  return a == Archiphoneme::lI ? "lI" : "sIz";
}

inline bool is_vowel(char32_t c) {
  switch (c) {
    case U'a': case U'e': case U'ı': case U'i': case U'o': case U'ö':
    case U'u': case U'ü': case U'â': case U'î': case U'û':
    case U'A': case U'E': case U'I': case U'İ': case U'O': case U'Ö':
    case U'U': case U'Ü': case U'Â': case U'Î': case U'Û':
      return true;
    default:
      return false;
  }
}

inline bool has_vowel(std::u32string_view s) {
  for (char32_t c : s) {
    if (is_vowel(c)) return true;
  }
  return false;
}

inline std::optional<char32_t> last_vowel(std::u32string_view s) {
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    char32_t c = text::turkish_lower(*it);
    if (is_vowel(c)) {
      if (c == U'â') return U'a';
      if (c == U'î') return U'i';
      if (c == U'û') return U'u';
      return c;
    }
  }
  return std::nullopt;
}

inline bool is_back(char32_t v) { return v == U'a' || v == U'ı' || v == U'o' || v == U'u'; }

/// High vowel (I) selected by the last vowel of `stem`.
inline std::optional<char32_t> high_vowel(std::u32string_view stem) {
  auto v = last_vowel(stem);
  if (!v) return std::nullopt;
  switch (*v) {
    case U'a': case U'ı': return U'ı';
    case U'e': case U'i': return U'i';
    case U'o': case U'u': return U'u';
    default: return U'ü';  // ö, ü
  }
}

/// Low vowel (A) selected by the last vowel of `stem`.
inline std::optional<char32_t> low_vowel(std::u32string_view stem) {
  auto v = last_vowel(stem);
  if (!v) return std::nullopt;
  return is_back(*v) ? U'a' : U'e';
}

inline bool is_high_vowel(char32_t c) {
  return c == U'ı' || c == U'i' || c == U'u' || c == U'ü';
}

/// Surface form of -lI or -sIz after `stem`.
inline std::string harmony_surface(Archiphoneme suffix, std::string_view stem) {
  auto v = high_vowel(text::decode(stem));
  if (!v) {
    throw NoSurfaceError("stem '" + std::string(stem) + "' has no vowel to harmonize with");
  }
  std::u32string out = suffix == Archiphoneme::lI ? U"l" : U"s";
  out.push_back(*v);
  if (suffix == Archiphoneme::sIz) out.push_back(U'z');
  return text::encode(out);
}

// ---------------------------------------------------------------------------
// Host analysis

enum class Case { Nom, Loc, Gen };

inline std::string_view case_name(Case c) {
  switch (c) {
    case Case::Nom: return "Nom";
    case Case::Loc: return "Loc";
    case Case::Gen: return "Gen";
  }
  return "Nom";
}

struct NominalAnalysis {
  std::string stem;  // lemma
  Case grammatical_case = Case::Nom;
  bool plural = false;
  int possessor_person = 0;  // 0: no possessive
  bool possessor_plural = false;
  bool proper = false;       // apostrophe-delimited proper name
  std::string pron_type;     // "Prs" / "Dem" for pronouns, else empty
  int person = 3;
  bool ambiguous = false;
  std::string note;

  bool pronoun() const { return !pron_type.empty(); }

  FeatureBag features() const {
    FeatureBag f;
    f.set("Case", std::string(case_name(grammatical_case)));
    f.set("Number", plural ? "Plur" : "Sing");
    f.set("Person", std::to_string(person));
    if (pronoun()) {
      f.set("PronType", pron_type);
    } else if (possessor_person) {
      f.set("Number[psor]", possessor_plural ? "Plur" : "Sing");
      f.set("Person[psor]", std::to_string(possessor_person));
    }
    return f;
  }
};

namespace detail {

struct PronounForm {
  std::u32string_view surface;
  std::string_view lemma;
  Case grammatical_case;
  int person;
  bool plural;
  std::string_view type;
};

inline constexpr PronounForm kPronouns[] = {
    {U"benim", "ben", Case::Gen, 1, false, "Prs"},
    {U"senin", "sen", Case::Gen, 2, false, "Prs"},
    {U"onun", "o", Case::Gen, 3, false, "Prs"},
    {U"bizim", "biz", Case::Gen, 1, true, "Prs"},
    {U"sizin", "siz", Case::Gen, 2, true, "Prs"},
    {U"onların", "o", Case::Gen, 3, true, "Prs"},
    {U"bende", "ben", Case::Loc, 1, false, "Prs"},
    {U"sende", "sen", Case::Loc, 2, false, "Prs"},
    {U"onda", "o", Case::Loc, 3, false, "Prs"},
    {U"bizde", "biz", Case::Loc, 1, true, "Prs"},
    {U"sizde", "siz", Case::Loc, 2, true, "Prs"},
    {U"onlarda", "o", Case::Loc, 3, true, "Prs"},
    {U"bunun", "bu", Case::Gen, 3, false, "Dem"},
    {U"şunun", "şu", Case::Gen, 3, false, "Dem"},
    {U"bunda", "bu", Case::Loc, 3, false, "Dem"},
    {U"şunda", "şu", Case::Loc, 3, false, "Dem"},
};

inline bool ends_with(std::u32string_view s, std::u32string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool viable_stem(std::u32string_view s) { return s.size() >= 2 && has_vowel(s); }

/// Undo consonant softening before a vowel-initial suffix (kitab -> kitap).
inline std::u32string restore_consonant(std::u32string stem) {
  if (stem.size() < 2) return stem;
  char32_t& last = stem.back();
  if (last == U'g' && stem[stem.size() - 2] == U'n') {
    last = U'k';
    return stem;
  }
  int vowels = 0;
  for (char32_t c : stem) vowels += is_vowel(c) ? 1 : 0;
  if (vowels < 2) return stem;
  if (last == U'b') last = U'p';
  else if (last == U'c') last = U'ç';
  else if (last == U'ğ') last = U'k';
  return stem;
}

/// Strips a plural -lAr from `base` when what remains is a viable stem.
inline void strip_plural(std::u32string& base, NominalAnalysis& a) {
  if (base.size() < 5) return;
  auto tail = base.substr(base.size() - 3);
  if (tail != U"lar" && tail != U"ler") return;
  auto rest = base.substr(0, base.size() - 3);
  auto expected = low_vowel(rest);
  if (!viable_stem(rest) || !expected || *expected != tail[1]) return;
  base = rest;
  a.plural = true;
}

/// First- and second-person possessives (-(I)m, -(I)mIz, -(I)nIz).
inline bool strip_first_second_possessive(std::u32string& base, NominalAnalysis& a,
                                          bool& vowel_initial) {
  struct Marker {
    std::u32string_view consonant_form;  // after a vowel-final stem
    int person;
    bool plural;
  };
  static constexpr Marker kMarkers[] = {
      {U"mız", 1, true}, {U"miz", 1, true}, {U"muz", 1, true}, {U"müz", 1, true},
      {U"nız", 2, true}, {U"niz", 2, true}, {U"nuz", 2, true}, {U"nüz", 2, true},
      {U"m", 1, false},
  };
  for (const auto& m : kMarkers) {
    if (!ends_with(base, m.consonant_form)) continue;
    auto rest = base.substr(0, base.size() - m.consonant_form.size());
    if (rest.empty()) continue;
    bool stem_vowel_final = is_vowel(rest.back());
    std::u32string stem = rest;
    bool vi = false;
    if (!stem_vowel_final) continue;
    // With a consonant-final stem the marker carries a linking high vowel
    // (ev-im, ev-imiz): the vowel we just saw belongs to the suffix.
    if (is_high_vowel(rest.back()) && rest.size() >= 2 && !is_vowel(rest[rest.size() - 2])) {
      auto shorter = rest.substr(0, rest.size() - 1);
      auto hv = high_vowel(shorter);
      if (viable_stem(shorter) && hv && *hv == rest.back()) {
        stem = shorter;
        vi = true;
      }
    }
    if (!viable_stem(stem)) continue;
    base = stem;
    vowel_initial = vi;
    a.possessor_person = m.person;
    a.possessor_plural = m.plural;
    a.ambiguous = true;
    a.note = "possessive reading is a guess; the stem may end in the marker consonant";
    return true;
  }
  return false;
}

/// Third-person possessive -(s)I (or -lArI) directly before `base`'s end.
inline bool strip_third_possessive(std::u32string& base, NominalAnalysis& a,
                                   bool& vowel_initial, const WordSet& stems) {
  if (base.size() < 3 || !is_high_vowel(base.back())) return false;
  auto without = base.substr(0, base.size() - 1);
  if (stems.count(text::encode(base))) return false;
  if (ends_with(without, U"lar") || ends_with(without, U"ler")) {
    auto rest = without.substr(0, without.size() - 3);
    auto lv = low_vowel(rest);
    if (viable_stem(rest) && lv && *lv == without[without.size() - 2]) {
      base = rest;
      a.plural = true;
      a.possessor_person = 3;
      a.ambiguous = true;
      a.note = "-lArI read as plural noun with singular possessor";
      return true;
    }
  }
  if (without.size() >= 2 && without.back() == U's' && is_vowel(without[without.size() - 2])) {
    auto rest = without.substr(0, without.size() - 1);
    auto hv = high_vowel(rest);
    if (viable_stem(rest) && hv && *hv == base.back()) {
      base = rest;
      a.possessor_person = 3;
      return true;
    }
  }
  if (!is_vowel(without.back())) {
    auto hv = high_vowel(without);
    if (viable_stem(without) && hv && *hv == base.back()) {
      base = without;
      vowel_initial = true;
      a.possessor_person = 3;
      a.ambiguous = true;
      a.note = "possessive read as third person singular (second person reading also possible)";
      return true;
    }
  }
  return false;
}

inline void finish_stem(std::u32string base, bool vowel_initial, NominalAnalysis& a) {
  if (!a.plural) strip_plural(base, a);
  if (vowel_initial && !a.plural) base = restore_consonant(std::move(base));
  a.stem = text::encode(base);
}

}  // namespace detail

/// Recognizes a locative or genitive nominal. Returns nullopt when neither
/// ending is present.
inline std::optional<NominalAnalysis> analyze_case(std::string_view surface,
                                                   const WordSet& stems = {}) {
  using detail::ends_with;
  auto original = text::decode(surface);
  if (original.size() < 2) return std::nullopt;

  // Proper names keep the suffix behind an apostrophe: Ali'nin, İzmir'de.
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original[i] != U'\'' && original[i] != U'’') continue;
    auto name = original.substr(0, i);
    auto suffix = text::turkish_lower(original.substr(i + 1));
    if (name.empty()) return std::nullopt;
    NominalAnalysis a;
    a.proper = true;
    a.stem = text::encode(name);
    static constexpr std::u32string_view kLoc[] = {U"da", U"de", U"ta", U"te"};
    static constexpr std::u32string_view kGen[] = {U"ın", U"in", U"un", U"ün",
                                                   U"nın", U"nin", U"nun", U"nün"};
    for (auto s : kLoc) {
      if (suffix == s) {
        a.grammatical_case = Case::Loc;
        return a;
      }
    }
    for (auto s : kGen) {
      if (suffix == s) {
        a.grammatical_case = Case::Gen;
        return a;
      }
    }
    return std::nullopt;
  }

  auto lower = text::turkish_lower(original);
  for (const auto& p : detail::kPronouns) {
    if (lower == p.surface) {
      NominalAnalysis a;
      a.stem = std::string(p.lemma);
      a.grammatical_case = p.grammatical_case;
      a.person = p.person;
      a.plural = p.plural;
      a.pron_type = std::string(p.type);
      return a;
    }
  }

  NominalAnalysis a;
  // Locative -DA, possibly after the pronominal n of a third-person possessive.
  if (lower.size() >= 4) {
    auto tail = lower.substr(lower.size() - 2);
    if ((tail[0] == U'd' || tail[0] == U't') && (tail[1] == U'a' || tail[1] == U'e')) {
      std::u32string base = lower.substr(0, lower.size() - 2);
      auto lv = low_vowel(base);
      if (detail::viable_stem(base) && lv && *lv == tail[1]) {
        a.grammatical_case = Case::Loc;
        bool vowel_initial = false;
        if (base.back() == U'n' && !stems.count(text::encode(base))) {
          auto inner = base.substr(0, base.size() - 1);
          if (detail::strip_third_possessive(inner, a, vowel_initial, stems)) {
            detail::finish_stem(inner, vowel_initial, a);
            return a;
          }
        }
        if (!stems.count(text::encode(base))) {
          detail::strip_first_second_possessive(base, a, vowel_initial);
        }
        detail::finish_stem(base, vowel_initial, a);
        return a;
      }
    }
  }

  // Genitive -(n)In.
  if (lower.size() >= 4 && lower.back() == U'n' && is_high_vowel(lower[lower.size() - 2])) {
    char32_t vowel = lower[lower.size() - 2];
    std::u32string base;
    bool after_vowel = false;
    const bool consonant_reading_known =
        stems.count(text::encode(lower.substr(0, lower.size() - 2))) > 0;
    if (lower[lower.size() - 3] == U'n' && is_vowel(lower[lower.size() - 4]) &&
        !consonant_reading_known) {
      base = lower.substr(0, lower.size() - 3);
      after_vowel = true;
    } else if (!is_vowel(lower[lower.size() - 3])) {
      base = lower.substr(0, lower.size() - 2);
    }
    auto hv = high_vowel(base);
    if (!base.empty() && detail::viable_stem(base) && hv && *hv == vowel) {
      a.grammatical_case = Case::Gen;
      bool vowel_initial = !after_vowel;
      if (after_vowel) {
        auto trial = base;
        NominalAnalysis probe;
        bool vi = false;
        bool known = stems.count(text::encode(base)) > 0;
        if (!known && detail::strip_third_possessive(trial, probe, vi, stems) &&
            (probe.plural || !probe.ambiguous)) {
          // -sI or -lArI before -nIn: unambiguous third-person possessive.
          a.possessor_person = probe.possessor_person;
          a.plural = probe.plural;
          a.ambiguous = probe.ambiguous;
          a.note = probe.note;
          detail::finish_stem(trial, vi, a);
          return a;
        }
        if (!known && probe.possessor_person == 3) {
          a.ambiguous = true;
          a.note = "vowel-final host read as bare stem (third-person possessive reading also possible)";
        }
      } else if (!stems.count(text::encode(base))) {
        detail::strip_first_second_possessive(base, a, vowel_initial);
      }
      detail::finish_stem(base, vowel_initial, a);
      return a;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// -ki

enum class KiClass { Adjectivizer, Pronominal, None };

inline std::string_view ki_class_name(KiClass c) {
  switch (c) {
    case KiClass::Adjectivizer: return "Adjectivizer";
    case KiClass::Pronominal: return "Pronominal";
    case KiClass::None: return "None";
  }
  return "None";
}

struct KiAnalysis {
  KiClass cls = KiClass::None;
  std::string residue;  // host surface, original casing
  std::string suffix;   // "ki" / "kü" as written
  std::optional<NominalAnalysis> host;
  /// Adnominal -ki on a bare temporal noun (bugünkü, dünkü): no case morphology.
  bool temporal = false;
};

inline bool deprel_is(std::string_view deprel, std::string_view base) {
  return deprel == base ||
         (deprel.size() > base.size() && deprel.substr(0, base.size()) == base &&
          deprel[base.size()] == ':');
}

inline bool ends_in_ki(std::string_view form) {
  auto s = text::turkish_lower(text::decode(form));
  return s.size() >= 2 && s[s.size() - 2] == U'k' && (s.back() == U'i' || s.back() == U'ü');
}

inline KiAnalysis analyze_ki(const Token& token, const Lexicons& lex = Lexicons::defaults()) {
  KiAnalysis out;
  if (!ends_in_ki(token.form)) return out;
  auto form = text::decode(token.form);
  if (form.size() <= 2) return out;  // the conjunction "ki" itself
  auto residue = form.substr(0, form.size() - 2);
  out.residue = text::encode(residue);
  out.suffix = text::encode(form.substr(form.size() - 2));
  const bool adnominal = token.upos == "ADJ" || deprel_is(token.deprel, "amod");
  const auto lowered = text::encode(text::turkish_lower(residue));
  if (lex.temporal_nouns.count(lowered)) {
    out.temporal = adnominal;
    return out;
  }
  out.host = analyze_case(out.residue, lex.stems);
  if (!out.host) return out;
  const auto c = out.host->grammatical_case;
  if (adnominal && (c == Case::Loc || c == Case::Gen)) {
    out.cls = KiClass::Adjectivizer;
  } else if (c == Case::Gen && !deprel_is(token.deprel, "amod") &&
             (token.upos == "NOUN" || token.upos == "PRON" || token.upos == "PROPN")) {
    out.cls = KiClass::Pronominal;
  }
  return out;
}

/// Which -ki, if any, `token` carries. The sentence is not consulted beyond
/// the token's own annotation.
inline KiClass classify_ki(const Token& token, [[maybe_unused]] const Sentence& sentence,
                           const Lexicons& lex = Lexicons::defaults()) {
  return analyze_ki(token, lex).cls;
}

}  // namespace tbkit::morph

#endif  // TBKIT_MORPHOLOGY_HPP
