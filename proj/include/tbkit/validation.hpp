#ifndef TBKIT_VALIDATION_HPP
#define TBKIT_VALIDATION_HPP

// Well-formedness checks. "basic" covers what a file needs to be usable
// (ids, head ranges, spans, FEATS syntax); "ud" adds tree shape, tag
// inventories, the MISC key grammar and the -ki / Partic / nullcop
// conventions. Findings are data: validate() never throws on bad input.

#include <algorithm>
#include <regex>
#include <string_view>
#include <tuple>
#include <string>
#include <vector>

#include "json.hpp"
#include "tbkit/conllu.hpp"
#include "tbkit/inventory.hpp"
#include "tbkit/morphology.hpp"

namespace tbkit {

enum class Severity { Error, Warning };
enum class Level { Basic, Ud };

inline std::string_view severity_name(Severity s) {
  return s == Severity::Error ? "error" : "warning";
}
inline std::string_view level_name(Level l) { return l == Level::Basic ? "basic" : "ud"; }

inline std::optional<Level> parse_level(std::string_view s) {
  if (s == "basic") return Level::Basic;
  if (s == "ud") return Level::Ud;
  return std::nullopt;
}

struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::size_t sentence = 0;
  int token = 0;  // 0 for span-level findings
  std::string span;  // "a-b" for span findings
  std::size_t line = 0;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct CatalogEntry {
  std::string_view code;
  Severity severity;
  Level level;
  std::string_view description;
};

/// Every code validate() can emit.
inline const std::vector<CatalogEntry>& diagnostic_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"E_FORMAT", Severity::Error, Level::Basic,
       "line cannot be parsed as CoNLL-U (column count, non-integer id or head, overlapping spans, "
       "empty nodes, invalid UTF-8)"},
      {"E_ID_SEQUENCE", Severity::Error, Level::Basic, "token ids are not exactly 1..n"},
      {"E_HEAD_RANGE", Severity::Error, Level::Basic, "head is not 0 or the id of a token"},
      {"E_HEAD_SELF", Severity::Error, Level::Basic, "token is its own head"},
      {"E_SPAN_RANGE", Severity::Error, Level::Basic,
       "multiword span covers ids that are not tokens of the sentence"},
      {"E_FEATS_FORMAT", Severity::Error, Level::Basic,
       "feature key or value does not match Key[layer]=Value[,Value]"},
      {"W_MULTIPLE_ROOTS", Severity::Warning, Level::Basic,
       "more than one token attaches to 0 (tolerated during annotation)"},
      {"E_HEAD_MISSING", Severity::Error, Level::Ud, "token has no head"},
      {"E_MULTIPLE_ROOTS", Severity::Error, Level::Ud, "more than one token attaches to 0"},
      {"E_CYCLE", Severity::Error, Level::Ud, "head relations form a cycle"},
      {"E_ROOT_DEPREL", Severity::Error, Level::Ud,
       "deprel 'root' must be used exactly on tokens attached to 0"},
      {"E_UPOS_INV", Severity::Error, Level::Ud, "UPOS missing or outside the inventory"},
      {"E_XPOS_INV", Severity::Error, Level::Ud, "XPOS outside the inventory"},
      {"E_DEPREL_INV", Severity::Error, Level::Ud, "deprel missing or outside the inventory"},
      {"E_MISC_VALUE", Severity::Error, Level::Ud,
       "recognized MISC key with a missing or disallowed value (df=<stem>, nullcop=3s|3p)"},
      {"E_DEPDER_CONTEXT", Severity::Error, Level::Ud,
       "dep:der used on a token that is not UPOS PART with XPOS Attr"},
      {"E_PARTIC_UPOS", Severity::Error, Level::Ud, "XPOS Partic used without UPOS PRON"},
      {"W_KI_UNSPLIT", Severity::Warning, Level::Ud,
       "adnominal word ending in locative/genitive + ki; candidate for splitting"},
  };
  return catalog;
}

inline const CatalogEntry& catalog_entry(std::string_view code) {
  for (const auto& e : diagnostic_catalog()) {
    if (e.code == code) return e;
  }
  throw InternalError("diagnostic code " + std::string(code) + " is not in the catalog");
}

namespace detail {

class DiagnosticSink {
 public:
  DiagnosticSink(std::size_t sentence, std::vector<std::size_t> lines,
                 std::vector<Diagnostic>& out)
      : sentence_(sentence), lines_(std::move(lines)), out_(out) {}

  void token(std::string_view code, int position, int id, std::string message) {
    Diagnostic d;
    d.code = std::string(code);
    d.severity = catalog_entry(code).severity;
    d.sentence = sentence_;
    d.token = id;
    d.line = position >= 0 && position < static_cast<int>(lines_.size()) ? lines_[position]
                                                                          : first_line();
    d.message = std::move(message);
    out_.push_back(std::move(d));
  }

  void span(std::string_view code, const MultiwordSpan& sp, std::string message) {
    Diagnostic d;
    d.code = std::string(code);
    d.severity = catalog_entry(code).severity;
    d.sentence = sentence_;
    d.span = std::to_string(sp.start) + "-" + std::to_string(sp.end);
    d.line = first_line();
    d.message = std::move(message);
    out_.push_back(std::move(d));
  }

 private:
  std::size_t first_line() const { return lines_.empty() ? 0 : lines_.front(); }
  std::size_t sentence_;
  std::vector<std::size_t> lines_;
  std::vector<Diagnostic>& out_;
};

inline bool feature_key_ok(const std::string& key) {
  static const std::regex re("^[A-Z0-9][A-Za-z0-9]*(\\[[a-z0-9]+\\])?$");
  return std::regex_match(key, re);
}

inline bool feature_value_ok(const std::string& value) {
  static const std::regex re("^[A-Z0-9][A-Za-z0-9]*(,[A-Z0-9][A-Za-z0-9]*)*$");
  return std::regex_match(value, re);
}

/// Returns true when the sentence's basic structure is sound enough for
/// tree checks.
inline bool check_basic_sentence(const Sentence& s, Level level, DiagnosticSink& sink) {
  bool sound = true;
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const auto& t = s.tokens[i];
    if (t.id != i + 1) {
      sink.token("E_ID_SEQUENCE", i, t.id,
                 "expected id " + std::to_string(i + 1) + ", found " + std::to_string(t.id));
      sound = false;
      break;
    }
  }
  for (int i = 0; i < n; ++i) {
    const auto& t = s.tokens[i];
    if (t.head && (*t.head < 0 || *t.head > n)) {
      sink.token("E_HEAD_RANGE", i, t.id,
                 "head " + std::to_string(*t.head) + " outside 0.." + std::to_string(n));
      sound = false;
    } else if (t.head && *t.head == t.id) {
      sink.token("E_HEAD_SELF", i, t.id, "token is its own head");
      sound = false;
    }
    for (const auto& [k, v] : t.feats.pairs()) {
      if (!feature_key_ok(k) || !feature_value_ok(v)) {
        sink.token("E_FEATS_FORMAT", i, t.id, "malformed feature '" + k + "=" + v + "'");
      }
    }
  }
  for (const auto& sp : s.spans) {
    if (sp.start < 1 || sp.end > n || sp.start >= sp.end) {
      sink.span("E_SPAN_RANGE", sp,
                "span " + std::to_string(sp.start) + "-" + std::to_string(sp.end) +
                    " covers ids outside 1.." + std::to_string(n));
    }
  }
  int roots = 0;
  for (const auto& t : s.tokens) roots += (t.head && *t.head == 0) ? 1 : 0;
  if (roots > 1 && level == Level::Basic) {
    int pos = 0;
    for (; pos < n && !(s.tokens[pos].head && *s.tokens[pos].head == 0); ++pos) {}
    sink.token("W_MULTIPLE_ROOTS", pos, s.tokens[pos].id,
               std::to_string(roots) + " tokens attach to 0");
  }
  return sound;
}

inline void check_tree(const Sentence& s, DiagnosticSink& sink) {
  const int n = static_cast<int>(s.tokens.size());
  bool missing = false;
  for (int i = 0; i < n; ++i) {
    if (!s.tokens[i].head) {
      sink.token("E_HEAD_MISSING", i, s.tokens[i].id, "token has no head");
      missing = true;
    }
  }
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].head && *s.tokens[i].head == 0) roots.push_back(i);
  }
  if (roots.size() > 1) {
    sink.token("E_MULTIPLE_ROOTS", roots[1], s.tokens[roots[1]].id,
               std::to_string(roots.size()) + " tokens attach to 0");
  }
  if (missing) return;
  // 0 unvisited, 1 on current path, 2 reaches the root.
  std::vector<int> state(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (cur != 0 && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = *s.tokens[cur - 1].head;
    }
    if (cur != 0 && state[cur] == 1) {
      auto it = std::find(path.begin(), path.end(), cur);
      std::vector<int> cycle(it, path.end());
      int first = *std::min_element(cycle.begin(), cycle.end());
      std::string ids;
      for (int id : cycle) ids += (ids.empty() ? "" : ",") + std::to_string(id);
      sink.token("E_CYCLE", first - 1, first, "cycle through tokens " + ids);
    }
    for (int id : path) state[id] = 2;
  }
}

inline void check_token_conventions(const Sentence& s, const InventoryConfig& cfg,
                                    DiagnosticSink& sink) {
  for (int i = 0; i < static_cast<int>(s.tokens.size()); ++i) {
    const auto& t = s.tokens[i];
    if (t.head) {
      if (*t.head == 0 && t.deprel != "root") {
        sink.token("E_ROOT_DEPREL", i, t.id,
                   "token attached to 0 has deprel '" + or_underscore(t.deprel) + "'");
      } else if (*t.head != 0 && t.deprel == "root") {
        sink.token("E_ROOT_DEPREL", i, t.id,
                   "deprel 'root' on a token attached to " + std::to_string(*t.head));
      }
    }
    if (!cfg.upos.count(t.upos)) {
      sink.token("E_UPOS_INV", i, t.id, "UPOS '" + or_underscore(t.upos) + "' not in inventory");
    }
    if (!t.xpos.empty() && !cfg.xpos.count(t.xpos)) {
      sink.token("E_XPOS_INV", i, t.id, "XPOS '" + t.xpos + "' not in inventory");
    }
    if (!cfg.deprel.count(t.deprel)) {
      sink.token("E_DEPREL_INV", i, t.id,
                 "deprel '" + or_underscore(t.deprel) + "' not in inventory");
    }
    for (const auto& e : t.misc.entries()) {
      auto rule = cfg.misc.find(e.key);
      if (rule == cfg.misc.end()) continue;
      const bool has_value = e.value && !e.value->empty();
      if (rule->second.requires_value && !has_value) {
        sink.token("E_MISC_VALUE", i, t.id, "MISC " + e.key + " needs a value");
      } else if (has_value && !rule->second.allowed.empty() &&
                 !rule->second.allowed.count(*e.value)) {
        sink.token("E_MISC_VALUE", i, t.id,
                   "MISC " + e.key + "=" + *e.value + " is not an allowed value");
      }
    }
    if (t.deprel == "dep:der" && (t.upos != "PART" || t.xpos != "Attr")) {
      sink.token("E_DEPDER_CONTEXT", i, t.id,
                 "dep:der on " + or_underscore(t.upos) + "/" + or_underscore(t.xpos) +
                     ", expected PART/Attr");
    }
    if (t.xpos == "Partic" && t.upos != "PRON") {
      sink.token("E_PARTIC_UPOS", i, t.id,
                 "XPOS Partic with UPOS " + or_underscore(t.upos) + ", expected PRON");
    }
    if (!s.span_of(t.id) &&
        morph::classify_ki(t, s) == morph::KiClass::Adjectivizer) {
      sink.token("W_KI_UNSPLIT", i, t.id, "'" + t.form + "' carries adjectivizer -ki");
    }
  }
}

}  // namespace detail

inline void sort_diagnostics(std::vector<Diagnostic>& d) {
  std::stable_sort(d.begin(), d.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.sentence, a.line, a.token, a.code) <
           std::tie(b.sentence, b.line, b.token, b.code);
  });
}

inline std::vector<Diagnostic> validate_sentence(const Sentence& s, std::size_t index,
                                                 std::vector<std::size_t> token_lines,
                                                 Level level, const InventoryConfig& cfg) {
  std::vector<Diagnostic> out;
  detail::DiagnosticSink sink(index, std::move(token_lines), out);
  bool sound = detail::check_basic_sentence(s, level, sink);
  if (level == Level::Ud) {
    if (sound) detail::check_tree(s, sink);
    detail::check_token_conventions(s, cfg, sink);
  }
  sort_diagnostics(out);
  return out;
}

/// Findings sorted by location; empty means valid at `level`.
inline std::vector<Diagnostic> validate(const Treebank& tb, Level level,
                                        const InventoryConfig& cfg = InventoryConfig::defaults()) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
    auto d = validate_sentence(tb.sentences[i], i, token_line_numbers(tb, i), level, cfg);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

/// Parses leniently and validates; unparseable input yields one E_FORMAT.
inline std::vector<Diagnostic> validate_document(std::string_view content, Level level,
                                                 const InventoryConfig& cfg = InventoryConfig::defaults()) {
  Treebank tb;
  try {
    tb = parse_document(content, ParseOptions{.strict = false});
  } catch (const ParseError& e) {
    Diagnostic d;
    d.code = "E_FORMAT";
    d.severity = Severity::Error;
    d.line = e.line();
    d.message = e.what();
    return {d};
  }
  return validate(tb, level, cfg);
}

inline std::size_t error_count(const std::vector<Diagnostic>& d) {
  return static_cast<std::size_t>(std::count_if(
      d.begin(), d.end(), [](const Diagnostic& x) { return x.severity == Severity::Error; }));
}

inline nlohmann::json diagnostic_to_json(const Diagnostic& d) {
  nlohmann::json j = {{"code", d.code},
                      {"severity", severity_name(d.severity)},
                      {"sentence", d.sentence},
                      {"line", d.line},
                      {"message", d.message}};
  if (!d.span.empty()) {
    j["span"] = d.span;
  } else {
    j["token"] = d.token;
  }
  return j;
}

inline std::string format_diagnostic(const Diagnostic& d) {
  std::string where = d.span.empty() ? "token " + std::to_string(d.token) : "span " + d.span;
  return "line " + std::to_string(d.line) + ": " + std::string(severity_name(d.severity)) + " " +
         d.code + " (sentence " + std::to_string(d.sentence) + ", " + where + "): " + d.message;
}

inline std::string render_diagnostics_text(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) out += format_diagnostic(d) + "\n";
  return out;
}

inline std::string render_diagnostics_jsonl(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) out += diagnostic_to_json(d).dump() + "\n";
  return out;
}

inline std::string render_catalog_text() {
  std::string out;
  for (const auto& e : diagnostic_catalog()) {
    out += std::string(e.code) + "\t" + std::string(severity_name(e.severity)) + "\t" +
           std::string(level_name(e.level)) + "\t" + std::string(e.description) + "\n";
  }
  return out;
}

}  // namespace tbkit

#endif  // TBKIT_VALIDATION_HPP
