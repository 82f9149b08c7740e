#ifndef TBKIT_TESTS_SUPPORT_HPP
#define TBKIT_TESTS_SUPPORT_HPP

// Fixture access and random generators shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tbkit/tbkit.hpp"

namespace support {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(TBKIT_FIXTURES) / name;
}

inline std::string fixture_text(const std::string& name) {
  return tbkit::read_file(fixture_path(name));
}

inline tbkit::Treebank fixture(const std::string& name) {
  return tbkit::parse_document(fixture_text(name));
}

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(TBKIT_DATA) / name;
}

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class C>
const auto& pick(Rng& rng, const C& c) {
  auto it = c.begin();
  std::advance(it, uniform(rng, 0, static_cast<int>(c.size()) - 1));
  return *it;
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline std::string random_word(Rng& rng) {
  static const std::vector<std::string> syllables = {
      "ka", "ev", "de", "ki", "lı", "sız", "gü", "çö", "şa", "ğı", "on", "İs",
      "tan", "bul", "ar", "öz", "üm", "Ağ", "ya", "ne", "ço", "mi", "su"};
  std::string w;
  int n = uniform(rng, 1, 3);
  for (int i = 0; i < n; ++i) w += pick(rng, syllables);
  return w;
}

/// Heads of a uniformly shaped random tree: tokens are attached in random
/// order, each to a token attached before it; the first one heads to 0.
inline std::vector<int> random_heads(Rng& rng, int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(n + 1, 0);
  for (int k = 1; k < n; ++k) heads[order[k]] = order[uniform(rng, 0, k - 1)];
  return heads;
}

inline tbkit::Token random_token(Rng& rng, int id, int head) {
  static const auto inv = tbkit::InventoryConfig::defaults();
  tbkit::Token t;
  t.id = id;
  t.form = random_word(rng);
  t.lemma = coin(rng, 0.8) ? tbkit::text::turkish_lower(t.form) : "";
  t.upos = pick(rng, inv.upos);
  t.xpos = coin(rng, 0.5) ? pick(rng, inv.xpos) : "";
  int nfeats = uniform(rng, 0, 3);
  for (int i = 0; i < nfeats; ++i) {
    const auto& [key, values] = pick(rng, inv.feats);
    t.feats.set(key, pick(rng, values));
  }
  t.head = head;
  if (head == 0) {
    t.deprel = "root";
  } else {
    do t.deprel = pick(rng, inv.deprel); while (t.deprel == "root");
  }
  if (coin(rng, 0.2)) t.misc.add("SpaceAfter", "No");
  if (coin(rng, 0.1)) t.misc.add("df", random_word(rng));
  if (coin(rng, 0.05)) t.misc.add("Flag", std::nullopt);
  return t;
}

/// A structurally valid sentence of 1..max_len tokens.
inline tbkit::Sentence random_sentence(Rng& rng, int max_len, bool spans) {
  tbkit::Sentence s;
  const int n = uniform(rng, 1, max_len);
  auto heads = random_heads(rng, n);
  for (int i = 1; i <= n; ++i) s.tokens.push_back(random_token(rng, i, heads[i]));
  if (coin(rng, 0.7)) s.comments.push_back("# sent_id = " + std::to_string(uniform(rng, 1, 99999)));
  if (coin(rng, 0.5)) {
    std::string text;
    for (const auto& t : s.tokens) text += (text.empty() ? "" : " ") + t.form;
    s.comments.push_back("# text = " + text);
  }
  if (coin(rng, 0.1)) s.comments.push_back("#");
  if (spans) {
    int at = 1;
    while (at < n) {
      if (coin(rng, 0.3)) {
        int len = std::min(uniform(rng, 2, 3), n - at + 1);
        tbkit::MultiwordSpan sp;
        sp.start = at;
        sp.end = at + len - 1;
        for (int i = sp.start; i <= sp.end; ++i) sp.form += s.tokens[i - 1].form;
        if (coin(rng, 0.3)) sp.misc.add("SpaceAfter", "No");
        s.spans.push_back(sp);
        at += len;
      } else {
        ++at;
      }
    }
  }
  return s;
}

inline tbkit::Treebank random_treebank(Rng& rng, int sentences, int max_len, bool spans) {
  tbkit::Treebank tb;
  for (int i = 0; i < sentences; ++i) tb.sentences.push_back(random_sentence(rng, max_len, spans));
  return tb;
}

/// Headed random split of `at` into k parts: part heads either point at a
/// sibling part or at an outside token.
inline tbkit::SplitSpec random_split(Rng& rng, const tbkit::Sentence& s, int at) {
  const int k = uniform(rng, 2, 3);
  const int anchor = uniform(rng, 0, k - 1);
  tbkit::SplitSpec spec;
  const auto& orig = s.tokens[at - 1];
  for (int p = 0; p < k; ++p) {
    tbkit::Token part = random_token(rng, 0, 0);
    part.form = orig.form + std::to_string(p);
    tbkit::HeadRef ref;
    if (p == anchor) {
      ref = tbkit::HeadRef::token(*orig.head);
      part.deprel = *orig.head == 0 ? "root" : orig.deprel;
    } else {
      ref = tbkit::HeadRef::part(anchor);
      if (part.deprel == "root") part.deprel = "dep";
    }
    spec.parts.push_back({part, ref});
  }
  spec.span_form = orig.form;
  spec.dependents_to = uniform(rng, 0, k - 1);
  return spec;
}

}  // namespace support

#endif  // TBKIT_TESTS_SUPPORT_HPP
