#ifndef TBKIT_METRICS_HPP
#define TBKIT_METRICS_HPP

// Corpus statistics, version diffs, attachment scores and agreement.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tbkit/conllu.hpp"
#include "tbkit/text.hpp"

namespace tbkit {

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ScoringError : public Error {
 public:
  using Error::Error;
};

/// Non-negative exact fraction.
struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// Rounded half-up to two decimals, computed in integers.
  std::string fixed2() const {
    long long hundredths = (num * 200 + den) / (2 * den);
    std::string frac = std::to_string(hundredths % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return std::to_string(hundredths / 100) + "." + frac;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num * b.den == b.num * a.den;
  }
};

using Histogram = std::map<std::string, std::size_t>;

struct StatsReport {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t arcs = 0;               // tokens with head > 0
  long long arc_length_sum = 0;
  std::optional<Rational> avg_tokens;  // tokens / sentences
  std::optional<Rational> avg_arc_length;
  Histogram deprel;
  Histogram upos;
  Histogram xpos;
  Histogram misc_keys;  // tokens carrying each key
};

/// Average arc length is the mean |id - head| over tokens with head > 0;
/// root attachments are not arcs for this purpose.
inline StatsReport treebank_stats(const Treebank& tb) {
  StatsReport r;
  r.sentences = tb.sentences.size();
  for (const auto& s : tb.sentences) {
    for (const auto& t : s.tokens) {
      ++r.tokens;
      if (t.head && *t.head > 0) {
        ++r.arcs;
        r.arc_length_sum += std::abs(t.id - *t.head);
      }
      ++r.deprel[or_underscore(t.deprel)];
      ++r.upos[or_underscore(t.upos)];
      ++r.xpos[or_underscore(t.xpos)];
      std::vector<std::string> keys;
      for (const auto& e : t.misc.entries()) {
        if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) keys.push_back(e.key);
      }
      for (const auto& k : keys) ++r.misc_keys[k];
    }
  }
  if (r.sentences) {
    r.avg_tokens = Rational{static_cast<long long>(r.tokens), static_cast<long long>(r.sentences)};
  }
  if (r.arcs) r.avg_arc_length = Rational{r.arc_length_sum, static_cast<long long>(r.arcs)};
  return r;
}

// ---------------------------------------------------------------------------
// Diffing

using Transition = std::pair<std::string, std::string>;
using TransitionTable = std::map<Transition, std::size_t>;

inline const std::vector<Field>& default_diff_fields() {
  static const std::vector<Field> f = {Field::Upos, Field::Xpos, Field::Feats, Field::Deprel,
                                       Field::Misc};
  return f;
}

struct ChangeReport {
  std::vector<Field> fields;
  std::map<std::string, std::size_t> counts;  // per field name, plus "split"
  std::map<std::string, TransitionTable> transitions;
  std::size_t total = 0;
  std::vector<std::string> warnings;
  std::size_t sentences_compared = 0;
  std::size_t sentences_skipped = 0;

  /// Most frequent transitions of `field`, ties broken by value order.
  std::vector<std::pair<Transition, std::size_t>> top(const std::string& field,
                                                      std::size_t k) const {
    std::vector<std::pair<Transition, std::size_t>> rows;
    if (auto it = transitions.find(field); it != transitions.end()) {
      rows.assign(it->second.begin(), it->second.end());
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (rows.size() > k) rows.resize(k);
    return rows;
  }
};

namespace detail {

/// Groups of tokens covering the same character range on both sides.
struct AlignedGroup {
  int old_begin, old_end;  // token indices [begin, end)
  int new_begin, new_end;
};

inline std::optional<std::vector<AlignedGroup>> align_sentences(const Sentence& a,
                                                                const Sentence& b) {
  std::string ca, cb;
  for (const auto& t : a.tokens) ca += t.form;
  for (const auto& t : b.tokens) cb += t.form;
  if (ca != cb) return std::nullopt;
  std::vector<AlignedGroup> groups;
  const int na = static_cast<int>(a.tokens.size());
  const int nb = static_cast<int>(b.tokens.size());
  int i = 0, j = 0;
  std::size_t end_a = 0, end_b = 0;
  while (i < na || j < nb) {
    AlignedGroup g{i, i, j, j};
    do {
      if ((end_a <= end_b && i < na) || j >= nb) {
        end_a += a.tokens[i++].form.size();
      } else {
        end_b += b.tokens[j++].form.size();
      }
    } while ((end_a != end_b || g.old_begin == i || g.new_begin == j) && (i < na || j < nb));
    g.old_end = i;
    g.new_end = j;
    groups.push_back(g);
  }
  return groups;
}

/// Head of token `index` expressed as 1-based aligned group (0 = root).
inline std::string aligned_head(const Sentence& s, int index, const std::vector<int>& group_of) {
  const auto& t = s.tokens[index];
  if (!t.head) return "_";
  if (*t.head == 0) return "0";
  if (*t.head < 1 || *t.head > static_cast<int>(s.tokens.size())) return "?";
  return std::to_string(group_of[*t.head - 1] + 1);
}

}  // namespace detail

inline ChangeReport diff_treebanks(const Treebank& old_tb, const Treebank& new_tb,
                                   const std::vector<Field>& fields = default_diff_fields()) {
  if (old_tb.sentences.size() != new_tb.sentences.size()) {
    throw AlignmentError("sentence counts differ: " + std::to_string(old_tb.sentences.size()) +
                         " vs " + std::to_string(new_tb.sentences.size()));
  }
  ChangeReport r;
  r.fields = fields;
  for (Field f : fields) r.counts[std::string(field_name(f))] = 0;
  r.counts["split"] = 0;

  for (std::size_t si = 0; si < old_tb.sentences.size(); ++si) {
    const auto& a = old_tb.sentences[si];
    const auto& b = new_tb.sentences[si];
    auto groups = detail::align_sentences(a, b);
    if (!groups) {
      r.warnings.push_back("sentence " + std::to_string(si) +
                           ": token forms do not concatenate to the same text; skipped");
      ++r.sentences_skipped;
      continue;
    }
    ++r.sentences_compared;
    std::vector<int> group_a(a.tokens.size()), group_b(b.tokens.size());
    for (int g = 0; g < static_cast<int>(groups->size()); ++g) {
      const auto& grp = (*groups)[g];
      for (int i = grp.old_begin; i < grp.old_end; ++i) group_a[i] = g;
      for (int j = grp.new_begin; j < grp.new_end; ++j) group_b[j] = g;
    }
    for (const auto& grp : *groups) {
      const int len_a = grp.old_end - grp.old_begin;
      const int len_b = grp.new_end - grp.new_begin;
      if (len_a != 1 || len_b != 1) ++r.counts["split"];
      for (int p = 0; p < std::max(len_a, len_b); ++p) {
        const int ia = p < len_a ? grp.old_begin + p : -1;
        const int ib = p < len_b ? grp.new_begin + p : -1;
        for (Field f : fields) {
          auto value = [&](const Sentence& s, int idx, const std::vector<int>& gof) {
            if (idx < 0) return std::string("_");  // no counterpart reads as empty
            if (f == Field::Head) return detail::aligned_head(s, idx, gof);
            return column(s.tokens[idx], f);
          };
          auto va = value(a, ia, group_a);
          auto vb = value(b, ib, group_b);
          if (va == vb) continue;
          std::string name(field_name(f));
          ++r.counts[name];
          ++r.transitions[name][{va, vb}];
        }
      }
    }
  }
  for (const auto& [k, v] : r.counts) r.total += v;
  return r;
}

// ---------------------------------------------------------------------------
// Attachment scores and agreement

struct AttachmentScores {
  std::size_t tokens = 0;
  std::size_t head_matches = 0;
  std::size_t label_matches = 0;  // head and deprel both match
  double uas() const { return 100.0 * static_cast<double>(head_matches) / static_cast<double>(tokens); }
  double las() const { return 100.0 * static_cast<double>(label_matches) / static_cast<double>(tokens); }
};

namespace detail {

inline void require_same_tokenization(const Treebank& a, const Treebank& b) {
  if (a.sentences.size() != b.sentences.size()) {
    throw ScoringError("sentence counts differ: " + std::to_string(a.sentences.size()) + " vs " +
                       std::to_string(b.sentences.size()));
  }
  for (std::size_t si = 0; si < a.sentences.size(); ++si) {
    const auto& x = a.sentences[si].tokens;
    const auto& y = b.sentences[si].tokens;
    for (std::size_t k = 0; k < std::max(x.size(), y.size()); ++k) {
      if (k >= x.size() || k >= y.size() || x[k].form != y[k].form) {
        std::string fx = k < x.size() ? "'" + x[k].form + "'" : "end of sentence";
        std::string fy = k < y.size() ? "'" + y[k].form + "'" : "end of sentence";
        throw ScoringError("tokenization differs at sentence " + std::to_string(si) +
                           ", token " + std::to_string(k + 1) + ": " + fx + " vs " + fy);
      }
    }
  }
}

}  // namespace detail

/// Multiword span lines are not tokens and never enter the count.
inline AttachmentScores attachment_scores(const Treebank& gold, const Treebank& pred) {
  detail::require_same_tokenization(gold, pred);
  AttachmentScores s;
  for (std::size_t si = 0; si < gold.sentences.size(); ++si) {
    const auto& g = gold.sentences[si].tokens;
    const auto& p = pred.sentences[si].tokens;
    for (std::size_t k = 0; k < g.size(); ++k) {
      ++s.tokens;
      if (g[k].head == p[k].head) {
        ++s.head_matches;
        if (g[k].deprel == p[k].deprel) ++s.label_matches;
      }
    }
  }
  if (s.tokens == 0) throw ScoringError("no tokens to score");
  return s;
}

/// (p_o - p_e) / (1 - p_e) with p_e = sum over labels of p_a(l) * p_b(l).
/// When p_e is 1 both sides use one label: 1.0 if they agree, else 0.0.
inline double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) {
    throw ArgumentError("label sequences differ in length: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
  if (a.empty()) throw ArgumentError("cohen_kappa needs at least one label pair");
  std::map<std::string, long long> ca, cb;
  long long agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    agree += a[i] == b[i] ? 1 : 0;
  }
  const long long n = static_cast<long long>(a.size());
  long long expected = 0;  // p_e * n^2
  for (const auto& [label, count] : ca) {
    if (auto it = cb.find(label); it != cb.end()) expected += count * it->second;
  }
  if (expected == n * n) return agree == n ? 1.0 : 0.0;
  return static_cast<double>(agree * n - expected) / static_cast<double>(n * n - expected);
}

struct AgreementReport {
  std::size_t tokens = 0;
  double label_match = 0;  // raw deprel agreement, percent
  double label_kappa = 0;
  double uas = 0;
  double las = 0;
  double attachment_chance = 0;  // p_e of the uniform-head model
  double uas_kappa = 0;
  double las_kappa = 0;
};

/// Attachment kappas model chance as a uniformly random head among the n
/// tokens and the root, so a token in an n-token sentence matches with
/// probability 1/(n+1). p_e averages that over tokens, the same population
/// p_o is measured on.
inline AgreementReport agreement_report(const Treebank& a, const Treebank& b) {
  auto scores = attachment_scores(a, b);
  std::vector<std::string> la, lb;
  std::size_t label_agree = 0;
  double chance = 0;
  std::size_t counted = 0;
  for (std::size_t si = 0; si < a.sentences.size(); ++si) {
    const auto& x = a.sentences[si].tokens;
    const auto& y = b.sentences[si].tokens;
    chance += static_cast<double>(x.size()) / static_cast<double>(x.size() + 1);
    counted += x.size();
    for (std::size_t k = 0; k < x.size(); ++k) {
      la.push_back(x[k].deprel);
      lb.push_back(y[k].deprel);
      label_agree += x[k].deprel == y[k].deprel ? 1 : 0;
    }
  }
  AgreementReport r;
  r.tokens = scores.tokens;
  r.label_match = 100.0 * static_cast<double>(label_agree) / static_cast<double>(r.tokens);
  r.label_kappa = cohen_kappa(la, lb);
  r.uas = scores.uas();
  r.las = scores.las();
  r.attachment_chance = chance / static_cast<double>(counted);
  auto kappa = [&](std::size_t matches) {
    double po = static_cast<double>(matches) / static_cast<double>(r.tokens);
    return (po - r.attachment_chance) / (1.0 - r.attachment_chance);
  };
  r.uas_kappa = kappa(scores.head_matches);
  r.las_kappa = kappa(scores.label_matches);
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline double round2(double v) { return std::stod(text::fixed2(v)); }

inline nlohmann::json rational_json(const std::optional<Rational>& r) {
  if (!r) return nullptr;
  return std::stod(r->fixed2());
}

inline std::string rational_text(const std::optional<Rational>& r) {
  return r ? r->fixed2() : "n/a";
}

inline std::string pad(std::string s, std::size_t width) {
  std::size_t cps = text::decode(s).size();
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

inline std::string histogram_text(const std::string& title, const Histogram& h) {
  std::string out = title + "\n";
  for (const auto& [k, v] : h) out += "  " + pad(k, 16) + " " + std::to_string(v) + "\n";
  return out;
}

}  // namespace detail

inline nlohmann::json stats_to_json(const StatsReport& r) {
  return {{"sentences", r.sentences},
          {"tokens", r.tokens},
          {"arcs", r.arcs},
          {"avg_tokens_per_sentence", detail::rational_json(r.avg_tokens)},
          {"avg_arc_length", detail::rational_json(r.avg_arc_length)},
          {"deprel", r.deprel},
          {"upos", r.upos},
          {"xpos", r.xpos},
          {"misc_keys", r.misc_keys}};
}

inline std::string render_stats_text(const StatsReport& r) {
  std::string out;
  out += "sentences                " + std::to_string(r.sentences) + "\n";
  out += "tokens                   " + std::to_string(r.tokens) + "\n";
  out += "avg tokens per sentence  " + detail::rational_text(r.avg_tokens) + "\n";
  out += "avg arc length           " + detail::rational_text(r.avg_arc_length) + "\n";
  out += detail::histogram_text("deprel", r.deprel);
  out += detail::histogram_text("upos", r.upos);
  out += detail::histogram_text("xpos", r.xpos);
  out += detail::histogram_text("misc keys", r.misc_keys);
  return out;
}

inline nlohmann::json change_report_to_json(const ChangeReport& r, std::size_t top_k = 10) {
  nlohmann::json transitions = nlohmann::json::object();
  for (const auto& [field, table] : r.transitions) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [tr, n] : r.top(field, top_k)) {
      rows.push_back({{"old", tr.first}, {"new", tr.second}, {"count", n}});
    }
    transitions[field] = rows;
  }
  return {{"counts", r.counts},
          {"total", r.total},
          {"transitions", transitions},
          {"sentences_compared", r.sentences_compared},
          {"sentences_skipped", r.sentences_skipped},
          {"warnings", r.warnings}};
}

inline std::string render_change_report_text(const ChangeReport& r, std::size_t top_k = 10) {
  std::string out = "field    changes\n";
  for (const auto& [k, v] : r.counts) out += detail::pad(k, 8) + " " + std::to_string(v) + "\n";
  out += "total    " + std::to_string(r.total) + "\n";
  for (const auto& [field, table] : r.transitions) {
    out += "\n" + field + " transitions\n";
    for (const auto& [tr, n] : r.top(field, top_k)) {
      out += "  " + tr.first + " -> " + tr.second + "  " +
             std::to_string(n) + "\n";
    }
  }
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  return out;
}

inline nlohmann::json scores_to_json(const AttachmentScores& s) {
  return {{"tokens", s.tokens},
          {"uas", detail::round2(s.uas())},
          {"las", detail::round2(s.las())}};
}

inline std::string render_scores_text(const AttachmentScores& s) {
  return "UAS " + text::fixed2(s.uas()) + " LAS " + text::fixed2(s.las()) + "\n";
}

inline nlohmann::json agreement_to_json(const AgreementReport& r) {
  return {{"tokens", r.tokens},
          {"label_match", detail::round2(r.label_match)},
          {"label_kappa", r.label_kappa},
          {"uas", detail::round2(r.uas)},
          {"las", detail::round2(r.las)},
          {"attachment_chance", r.attachment_chance},
          {"uas_kappa", r.uas_kappa},
          {"las_kappa", r.las_kappa}};
}

inline std::string render_agreement_text(const AgreementReport& r) {
  char buf[64];
  auto k4 = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  std::string out;
  out += "tokens        " + std::to_string(r.tokens) + "\n";
  out += "label match   " + text::fixed2(r.label_match) + "  kappa " + k4(r.label_kappa) + "\n";
  out += "UAS           " + text::fixed2(r.uas) + "  kappa " + k4(r.uas_kappa) + "\n";
  out += "LAS           " + text::fixed2(r.las) + "  kappa " + k4(r.las_kappa) + "\n";
  out += "chance (p_e)  " + k4(r.attachment_chance) + "\n";
  return out;
}

}  // namespace tbkit

#endif  // TBKIT_METRICS_HPP
