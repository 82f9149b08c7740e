#ifndef TBKIT_CONLLU_HPP
#define TBKIT_CONLLU_HPP

// In-memory CoNLL-U documents: tokens, multiword spans, FEATS and MISC
// grammars, a lossless parser/serializer and the token-split primitive.
//
// Parsing normalizes exactly three things: FEATS are re-sorted by key, CRLF
// line endings become LF, and span lines lose every column except ID, FORM
// and MISC. Everything else survives serialize(parse(text)) byte for byte.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbkit/text.hpp"

namespace tbkit {

/// Malformed FEATS / MISC text or an invalid column value.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline bool has_control_break(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

/// Case-insensitive key order with a case-sensitive tie break.
inline bool feature_key_less(std::string_view a, std::string_view b) {
  auto la = text::ascii_lower(a);
  auto lb = text::ascii_lower(b);
  if (la != lb) return la < lb;
  return a < b;
}

}  // namespace detail

/// FEATS column. Pairs are kept in canonical (serialization) order, so two
/// bags with the same key/value set compare equal and print identically.
class FeatureBag {
 public:
  using Pair = std::pair<std::string, std::string>;

  FeatureBag() = default;

  /// Parses "_" or "Key=Value|Key=Value".
  static FeatureBag parse(std::string_view s) {
    FeatureBag bag;
    if (s == "_" || s.empty()) return bag;
    for (auto& entry : text::split(s, '|')) {
      auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
        throw FormatError("feature entry '" + entry + "' is not Key=Value");
      }
      auto key = entry.substr(0, eq);
      if (bag.get(key)) {
        throw FormatError("duplicate feature key '" + key + "'");
      }
      bag.set(key, entry.substr(eq + 1));
    }
    return bag;
  }

  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : pairs_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  bool has(std::string_view key, std::string_view value) const {
    auto v = get(key);
    return v && *v == value;
  }

  /// Inserts or replaces.
  void set(std::string key, std::string value) {
    if (key.empty() || value.empty() ||
        key.find_first_of("|=\t\n") != std::string::npos ||
        value.find_first_of("|\t\n") != std::string::npos) {
      throw FormatError("invalid feature '" + key + "=" + value + "'");
    }
    for (auto& [k, v] : pairs_) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    auto pos = std::lower_bound(
        pairs_.begin(), pairs_.end(), key,
        [](const Pair& p, const std::string& k) {
          return detail::feature_key_less(p.first, k);
        });
    pairs_.insert(pos, {std::move(key), std::move(value)});
  }

  bool erase(std::string_view key) {
    auto it = std::find_if(pairs_.begin(), pairs_.end(),
                           [&](const Pair& p) { return p.first == key; });
    if (it == pairs_.end()) return false;
    pairs_.erase(it);
    return true;
  }

  std::string str() const {
    if (pairs_.empty()) return "_";
    std::string out;
    for (const auto& [k, v] : pairs_) {
      if (!out.empty()) out += '|';
      out += k;
      out += '=';
      out += v;
    }
    return out;
  }

  friend bool operator==(const FeatureBag&, const FeatureBag&) = default;

 private:
  std::vector<Pair> pairs_;
};

inline FeatureBag parse_feats(std::string_view s) { return FeatureBag::parse(s); }

struct MiscEntry {
  std::string key;
  std::optional<std::string> value;  // nullopt for a bare flag

  std::string str() const { return value ? key + "=" + *value : key; }
  friend bool operator==(const MiscEntry&, const MiscEntry&) = default;
};

/// MISC column; entries keep their original order.
class MiscBag {
 public:
  MiscBag() = default;

  static MiscBag parse(std::string_view s) {
    MiscBag bag;
    if (s == "_" || s.empty()) return bag;
    for (auto& entry : text::split(s, '|')) {
      if (entry.empty()) throw FormatError("empty MISC entry in '" + std::string(s) + "'");
      auto eq = entry.find('=');
      if (eq == std::string::npos) {
        bag.entries_.push_back({entry, std::nullopt});
      } else {
        bag.entries_.push_back({entry.substr(0, eq), entry.substr(eq + 1)});
      }
    }
    return bag;
  }

  bool empty() const { return entries_.empty(); }
  const std::vector<MiscEntry>& entries() const { return entries_; }

  bool has(std::string_view key) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const MiscEntry& e) { return e.key == key; });
  }

  /// Value of the first entry with `key`; a bare flag yields "".
  std::optional<std::string> get(std::string_view key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return e.value.value_or("");
    }
    return std::nullopt;
  }

  void add(std::string key, std::optional<std::string> value) {
    if (key.empty() || key.find_first_of("|=\t\n") != std::string::npos ||
        (value && value->find_first_of("|\t\n") != std::string::npos)) {
      throw FormatError("invalid MISC entry '" + key + "'");
    }
    entries_.push_back({std::move(key), std::move(value)});
  }

  std::size_t erase(std::string_view key) {
    auto n = entries_.size();
    std::erase_if(entries_, [&](const MiscEntry& e) { return e.key == key; });
    return n - entries_.size();
  }

  std::string str() const {
    if (entries_.empty()) return "_";
    std::string out;
    for (const auto& e : entries_) {
      if (!out.empty()) out += '|';
      out += e.str();
    }
    return out;
  }

  friend bool operator==(const MiscBag&, const MiscBag&) = default;

 private:
  std::vector<MiscEntry> entries_;
};

/// One syntactic word. Empty strings stand for "_".
struct Token {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  FeatureBag feats;
  std::optional<int> head;
  std::string deprel;
  std::string deps;
  MiscBag misc;

  friend bool operator==(const Token&, const Token&) = default;
};

struct MultiwordSpan {
  int start = 0;
  int end = 0;
  std::string form;
  MiscBag misc;

  bool contains(int id) const { return id >= start && id <= end; }
  friend bool operator==(const MultiwordSpan&, const MultiwordSpan&) = default;
};

struct Sentence {
  std::vector<std::string> comments;  // full lines, including the leading '#'
  std::vector<Token> tokens;
  std::vector<MultiwordSpan> spans;  // sorted by start

  std::size_t size() const { return tokens.size(); }

  /// Token with `id`, assuming ids are 1..n.
  const Token* find(int id) const {
    if (id >= 1 && id <= static_cast<int>(tokens.size()) &&
        tokens[id - 1].id == id) {
      return &tokens[id - 1];
    }
    for (const auto& t : tokens) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }
  Token* find(int id) {
    return const_cast<Token*>(std::as_const(*this).find(id));
  }

  const MultiwordSpan* span_of(int id) const {
    for (const auto& s : spans) {
      if (s.contains(id)) return &s;
    }
    return nullptr;
  }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Treebank {
  std::vector<Sentence> sentences;
  std::optional<std::string> source;  // file identity; not part of equality

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.tokens.size();
    return n;
  }

  friend bool operator==(const Treebank& a, const Treebank& b) {
    return a.sentences == b.sentences;
  }
};

// ---------------------------------------------------------------------------
// Columns

enum class Field { Form, Lemma, Upos, Xpos, Feats, Head, Deprel, Deps, Misc };

inline constexpr Field kAllFields[] = {Field::Form,  Field::Lemma, Field::Upos,
                                       Field::Xpos,  Field::Feats, Field::Head,
                                       Field::Deprel, Field::Deps, Field::Misc};

inline std::string_view field_name(Field f) {
  switch (f) {
    case Field::Form: return "FORM";
    case Field::Lemma: return "LEMMA";
    case Field::Upos: return "UPOS";
    case Field::Xpos: return "XPOS";
    case Field::Feats: return "FEATS";
    case Field::Head: return "HEAD";
    case Field::Deprel: return "DEPREL";
    case Field::Deps: return "DEPS";
    case Field::Misc: return "MISC";
  }
  return "?";
}

/// Case-insensitive lookup of a column name.
inline std::optional<Field> parse_field(std::string_view name) {
  for (Field f : kAllFields) {
    if (text::iequals_ascii(name, field_name(f))) return f;
  }
  return std::nullopt;
}

inline std::string or_underscore(const std::string& s) { return s.empty() ? "_" : s; }

/// Column text exactly as it is written in a CoNLL-U file.
inline std::string column(const Token& t, Field f) {
  switch (f) {
    case Field::Form: return or_underscore(t.form);
    case Field::Lemma: return or_underscore(t.lemma);
    case Field::Upos: return or_underscore(t.upos);
    case Field::Xpos: return or_underscore(t.xpos);
    case Field::Feats: return t.feats.str();
    case Field::Head: return t.head ? std::to_string(*t.head) : "_";
    case Field::Deprel: return or_underscore(t.deprel);
    case Field::Deps: return or_underscore(t.deps);
    case Field::Misc: return t.misc.str();
  }
  return "_";
}

/// Sets a column from its file text; throws FormatError for malformed values.
inline void set_column(Token& t, Field f, std::string_view value) {
  if (detail::has_control_break(value)) {
    throw FormatError("column values may not contain tabs or newlines");
  }
  std::string v = value == "_" ? std::string() : std::string(value);
  switch (f) {
    case Field::Form: t.form = v; break;
    case Field::Lemma: t.lemma = v; break;
    case Field::Upos: t.upos = v; break;
    case Field::Xpos: t.xpos = v; break;
    case Field::Feats: t.feats = FeatureBag::parse(value); break;
    case Field::Head:
      if (v.empty()) {
        t.head.reset();
      } else if (auto h = text::parse_uint(v)) {
        t.head = *h;
      } else {
        throw FormatError("HEAD must be a non-negative integer, got '" + v + "'");
      }
      break;
    case Field::Deprel: t.deprel = v; break;
    case Field::Deps: t.deps = v; break;
    case Field::Misc: t.misc = MiscBag::parse(value); break;
  }
}

// ---------------------------------------------------------------------------
// Structural checks

/// First violation of the basic invariants (ids 1..n, heads in range and not
/// self-referential, spans over existing non-overlapping ids), or nullopt.
inline std::optional<std::string> check_basic(const Sentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].id != i + 1) {
      return "token ids are not 1.." + std::to_string(n) + " (found " +
             std::to_string(s.tokens[i].id) + " at position " +
             std::to_string(i + 1) + ")";
    }
  }
  for (const auto& t : s.tokens) {
    if (t.head && (*t.head < 0 || *t.head > n)) {
      return "token " + std::to_string(t.id) + " has head " +
             std::to_string(*t.head) + " outside 0.." + std::to_string(n);
    }
    if (t.head && *t.head == t.id) {
      return "token " + std::to_string(t.id) + " is its own head";
    }
  }
  int prev_end = 0;
  for (const auto& sp : s.spans) {
    if (sp.start >= sp.end || sp.start < 1 || sp.end > n) {
      return "span " + std::to_string(sp.start) + "-" + std::to_string(sp.end) +
             " does not cover existing tokens";
    }
    if (sp.start <= prev_end) {
      return "span " + std::to_string(sp.start) + "-" + std::to_string(sp.end) +
             " overlaps a previous span";
    }
    prev_end = sp.end;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

struct ParseOptions {
  /// Enforce check_basic() on every sentence. Validation and the annotation
  /// service parse with strict=false so that broken intermediate data loads.
  bool strict = true;
};

namespace detail {

struct PendingSentence {
  Sentence sentence;
  std::vector<std::size_t> token_lines;
  std::vector<std::size_t> span_lines;
  std::size_t first_line = 0;
  bool has_words() const { return !sentence.tokens.empty() || !sentence.spans.empty(); }
};

inline void finish_sentence(PendingSentence& p, const ParseOptions& opts,
                            Treebank& tb) {
  auto& s = p.sentence;
  if (s.tokens.empty()) {
    throw ParseError(p.first_line, "sentence has no token lines");
  }
  std::vector<std::size_t> order(s.spans.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.spans[a].start < s.spans[b].start;
  });
  std::vector<MultiwordSpan> sorted;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& sp = s.spans[order[k]];
    if (!sorted.empty() && sp.start <= sorted.back().end) {
      throw ParseError(p.span_lines[order[k]],
                       "multiword span " + std::to_string(sp.start) + "-" +
                           std::to_string(sp.end) + " overlaps another span");
    }
    sorted.push_back(sp);
  }
  s.spans = std::move(sorted);

  if (opts.strict) {
    const int n = static_cast<int>(s.tokens.size());
    for (int i = 0; i < n; ++i) {
      const auto& t = s.tokens[i];
      if (t.id != i + 1) {
        throw ParseError(p.token_lines[i], "expected token id " +
                                               std::to_string(i + 1) + ", found " +
                                               std::to_string(t.id));
      }
      if (t.head && (*t.head > n || *t.head == t.id)) {
        throw ParseError(p.token_lines[i],
                         "head " + std::to_string(*t.head) + " of token " +
                             std::to_string(t.id) + " is not 0 or another token id");
      }
    }
    for (std::size_t k = 0; k < s.spans.size(); ++k) {
      if (s.spans[k].end > n) {
        throw ParseError(p.first_line, "multiword span " +
                                           std::to_string(s.spans[k].start) + "-" +
                                           std::to_string(s.spans[k].end) +
                                           " extends past the last token");
      }
    }
  }
  tb.sentences.push_back(std::move(s));
  p = PendingSentence{};
}

}  // namespace detail

inline Treebank parse_document(std::string_view input, const ParseOptions& opts = {}) {
  if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
  Treebank tb;
  detail::PendingSentence cur;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    auto nl = input.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? input.substr(pos)
                                : input.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? input.size() : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!text::is_valid_utf8(line)) throw ParseError(lineno, "invalid UTF-8");

    if (text::trim(line).empty()) {
      if (cur.has_words()) {
        detail::finish_sentence(cur, opts, tb);
      } else if (!cur.sentence.comments.empty()) {
        throw ParseError(lineno, "comment block is not followed by token lines");
      }
      continue;
    }
    if (cur.sentence.comments.empty() && !cur.has_words()) cur.first_line = lineno;
    if (line.front() == '#') {
      if (cur.has_words()) {
        throw ParseError(lineno, "comment line inside a sentence's token lines");
      }
      cur.sentence.comments.emplace_back(line);
      continue;
    }

    auto cols = text::split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(lineno, "expected 10 tab-separated columns, found " +
                                   std::to_string(cols.size()));
    }
    const auto& id = cols[0];
    if (id.find('.') != std::string::npos) {
      throw ParseError(lineno, "empty nodes ('" + id + "') are not supported");
    }
    try {
      if (auto dash = id.find('-'); dash != std::string::npos) {
        auto a = text::parse_uint(std::string_view(id).substr(0, dash));
        auto b = text::parse_uint(std::string_view(id).substr(dash + 1));
        if (!a || !b) throw ParseError(lineno, "non-integer span range '" + id + "'");
        if (*a < 1 || *a >= *b) {
          throw ParseError(lineno, "span range '" + id + "' must satisfy 1 <= start < end");
        }
        MultiwordSpan sp{*a, *b, cols[1] == "_" ? "" : cols[1], MiscBag::parse(cols[9])};
        cur.sentence.spans.push_back(std::move(sp));
        cur.span_lines.push_back(lineno);
        continue;
      }
      auto tid = text::parse_uint(id);
      if (!tid) throw ParseError(lineno, "non-integer token id '" + id + "'");
      if (*tid < 1 && opts.strict) throw ParseError(lineno, "token id must be >= 1");
      Token t;
      t.id = *tid;
      set_column(t, Field::Form, cols[1]);
      set_column(t, Field::Lemma, cols[2]);
      set_column(t, Field::Upos, cols[3]);
      set_column(t, Field::Xpos, cols[4]);
      set_column(t, Field::Feats, cols[5]);
      if (cols[6] != "_" && !text::parse_uint(cols[6])) {
        throw ParseError(lineno, "non-integer head '" + cols[6] + "'");
      }
      set_column(t, Field::Head, cols[6]);
      set_column(t, Field::Deprel, cols[7]);
      set_column(t, Field::Deps, cols[8]);
      set_column(t, Field::Misc, cols[9]);
      cur.sentence.tokens.push_back(std::move(t));
      cur.token_lines.push_back(lineno);
    } catch (const FormatError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (cur.has_words()) {
    detail::finish_sentence(cur, opts, tb);
  } else if (!cur.sentence.comments.empty()) {
    throw ParseError(lineno, "comment block is not followed by token lines");
  }
  return tb;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string token_line(const Token& t) {
  std::string out = std::to_string(t.id);
  for (Field f : kAllFields) {
    auto v = column(t, f);
    if (detail::has_control_break(v)) {
      throw SerializationError("token " + std::to_string(t.id) + " " +
                               std::string(field_name(f)) +
                               " contains a tab or newline");
    }
    out += '\t';
    out += v;
  }
  return out;
}

inline std::string span_line(const MultiwordSpan& sp) {
  if (detail::has_control_break(sp.form)) {
    throw SerializationError("span form contains a tab or newline");
  }
  return std::to_string(sp.start) + "-" + std::to_string(sp.end) + "\t" +
         or_underscore(sp.form) + "\t_\t_\t_\t_\t_\t_\t_\t" + sp.misc.str();
}

/// Lines of one sentence, without the trailing blank separator.
inline std::vector<std::string> sentence_lines(const Sentence& s) {
  std::vector<std::string> lines;
  for (const auto& c : s.comments) {
    if (c.find_first_of("\n\r") != std::string::npos) {
      throw SerializationError("comment contains a line break");
    }
    lines.push_back(c);
  }
  std::size_t next_span = 0;
  for (const auto& t : s.tokens) {
    while (next_span < s.spans.size() && s.spans[next_span].start <= t.id) {
      lines.push_back(span_line(s.spans[next_span]));
      ++next_span;
    }
    lines.push_back(token_line(t));
  }
  for (; next_span < s.spans.size(); ++next_span) {
    lines.push_back(span_line(s.spans[next_span]));
  }
  return lines;
}

inline std::string serialize_sentence(const Sentence& s) {
  std::string out;
  for (const auto& l : sentence_lines(s)) {
    out += l;
    out += '\n';
  }
  out += '\n';
  return out;
}

inline std::string serialize_document(const Treebank& tb) {
  std::string out;
  for (const auto& s : tb.sentences) out += serialize_sentence(s);
  return out;
}

/// 1-based line of each token of sentence `index` in serialize_document(tb).
inline std::vector<std::size_t> token_line_numbers(const Treebank& tb,
                                                   std::size_t index) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < index && i < tb.sentences.size(); ++i) {
    const auto& s = tb.sentences[i];
    line += s.comments.size() + s.spans.size() + s.tokens.size() + 1;
  }
  std::vector<std::size_t> out;
  if (index >= tb.sentences.size()) return out;
  const auto& s = tb.sentences[index];
  line += s.comments.size();
  std::size_t next_span = 0;
  for (const auto& t : s.tokens) {
    while (next_span < s.spans.size() && s.spans[next_span].start <= t.id) {
      ++line;
      ++next_span;
    }
    out.push_back(line++);
  }
  return out;
}

/// Fingerprint of the normalized serialization.
inline std::string fingerprint(const Treebank& tb) {
  return text::fingerprint(serialize_document(tb));
}

// ---------------------------------------------------------------------------
// Token splitting

/// Head of a split part: another part of the same split, or a token id in
/// the numbering of the sentence before the split (0 = root).
struct HeadRef {
  enum class Kind { Part, Token };
  Kind kind = Kind::Token;
  int value = 0;

  static HeadRef part(int index) { return {Kind::Part, index}; }
  static HeadRef token(int id) { return {Kind::Token, id}; }
  friend bool operator==(const HeadRef&, const HeadRef&) = default;
};

struct SplitPart {
  Token token;  // id and head are assigned by insert_split
  HeadRef head;
  friend bool operator==(const SplitPart&, const SplitPart&) = default;
};

struct SplitSpec {
  std::vector<SplitPart> parts;
  std::string span_form;
  MiscBag span_misc;
  /// Part that inherits the dependents of the replaced token.
  int dependents_to = 0;
  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

/// Replaces token `at` by `spec.parts`, renumbering every later token and
/// every head, and records the multiword span at..at+k-1.
inline Sentence insert_split(const Sentence& sentence, int at, const SplitSpec& spec) {
  const int n = static_cast<int>(sentence.tokens.size());
  const int k = static_cast<int>(spec.parts.size());
  if (k < 2) throw ArgumentError("a split needs at least two parts");
  if (auto problem = check_basic(sentence)) {
    throw ArgumentError("cannot split a structurally invalid sentence: " + *problem);
  }
  if (at < 1 || at > n) {
    throw ArgumentError("no token " + std::to_string(at) + " to split");
  }
  if (spec.dependents_to < 0 || spec.dependents_to >= k) {
    throw ArgumentError("dependents_to names no part");
  }
  if (sentence.span_of(at)) {
    throw ArgumentError("token " + std::to_string(at) + " already lies inside a multiword span");
  }
  const int shift = k - 1;
  auto remap = [&](int h) {
    if (h == 0 || h < at) return h;
    if (h == at) return at + spec.dependents_to;
    return h + shift;
  };

  Sentence out;
  out.comments = sentence.comments;
  out.tokens.reserve(n + shift);
  for (int i = 0; i < at - 1; ++i) {
    Token t = sentence.tokens[i];
    if (t.head) t.head = remap(*t.head);
    out.tokens.push_back(std::move(t));
  }
  for (int j = 0; j < k; ++j) {
    Token t = spec.parts[j].token;
    t.id = at + j;
    const auto& ref = spec.parts[j].head;
    if (ref.kind == HeadRef::Kind::Part) {
      if (ref.value < 0 || ref.value >= k || ref.value == j) {
        throw ArgumentError("part " + std::to_string(j) + " has an invalid part head");
      }
      t.head = at + ref.value;
    } else {
      if (ref.value < 0 || ref.value > n || ref.value == at) {
        throw ArgumentError("part " + std::to_string(j) +
                            " head must be 0, another token, or a part reference");
      }
      t.head = remap(ref.value);
    }
    out.tokens.push_back(std::move(t));
  }
  for (int i = at; i < n; ++i) {
    Token t = sentence.tokens[i];
    t.id += shift;
    if (t.head) t.head = remap(*t.head);
    out.tokens.push_back(std::move(t));
  }
  for (auto sp : sentence.spans) {
    if (sp.start > at) {
      sp.start += shift;
      sp.end += shift;
    }
    out.spans.push_back(std::move(sp));
  }
  out.spans.push_back({at, at + shift, spec.span_form, spec.span_misc});
  std::stable_sort(out.spans.begin(), out.spans.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  if (auto problem = check_basic(out)) {
    throw InternalError("split renumbering broke the sentence: " + *problem);
  }
  return out;
}

}  // namespace tbkit

#endif  // TBKIT_CONLLU_HPP
