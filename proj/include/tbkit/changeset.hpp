#ifndef TBKIT_CHANGESET_HPP
#define TBKIT_CHANGESET_HPP

// Reviewable edit ledgers. Rules never mutate a treebank: they emit
// ChangeRecords against a fingerprinted snapshot, and apply_changeset()
// replays the accepted ones.
//
// Token ids and HEAD values inside records always use the numbering of the
// snapshot the ChangeSet was computed on. apply_changeset() tracks the
// renumbering caused by splits, so records can be applied in any order.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "tbkit/conllu.hpp"

namespace tbkit {

class ConflictError : public Error {
 public:
  using Error::Error;
};

class StaleChangeSetError : public Error {
 public:
  using Error::Error;
};

enum class RecordKind { FieldEdit, TokenSplit };
enum class Confidence { Auto, Review };
enum class ApplyMode { All, AutoOnly };

struct ChangeRecord {
  std::size_t sentence = 0;  // 0-based
  int token = 0;
  RecordKind kind = RecordKind::FieldEdit;
  Field field = Field::Upos;  // field edits only
  std::string old_value;      // column text; the replaced FORM for splits
  std::string new_value;
  SplitSpec split;            // token splits only
  std::string rule;
  Confidence confidence = Confidence::Review;
  std::string note;

  friend bool operator==(const ChangeRecord&, const ChangeRecord&) = default;
};

struct ChangeSet {
  std::vector<ChangeRecord> records;
  std::vector<std::string> rules;
  std::string fingerprint;

  bool empty() const { return records.empty(); }
  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

inline std::string_view confidence_name(Confidence c) {
  return c == Confidence::Auto ? "auto" : "review";
}

inline std::string_view kind_name(RecordKind k) {
  return k == RecordKind::FieldEdit ? "field-edit" : "token-split";
}

/// A field edit, or nothing when the value would not change.
inline std::optional<ChangeRecord> field_edit(std::size_t sentence, const Token& t,
                                              Field field, std::string new_value,
                                              std::string rule, Confidence confidence,
                                              std::string note = {}) {
  auto old_value = column(t, field);
  if (new_value.empty()) new_value = "_";
  if (old_value == new_value) return std::nullopt;
  ChangeRecord r;
  r.sentence = sentence;
  r.token = t.id;
  r.kind = RecordKind::FieldEdit;
  r.field = field;
  r.old_value = std::move(old_value);
  r.new_value = std::move(new_value);
  r.rule = std::move(rule);
  r.confidence = confidence;
  r.note = std::move(note);
  return r;
}

namespace detail {

inline int record_rank(const ChangeRecord& r) {
  return r.kind == RecordKind::TokenSplit ? -1 : static_cast<int>(r.field);
}

inline std::tuple<std::size_t, int, int> record_key(const ChangeRecord& r) {
  return {r.sentence, r.token, record_rank(r)};
}

}  // namespace detail

/// Canonical record order: sentence, then token id, then field.
inline void sort_records(std::vector<ChangeRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const ChangeRecord& a, const ChangeRecord& b) {
                     return detail::record_key(a) < detail::record_key(b);
                   });
}

/// Throws ConflictError unless every (sentence, token, field) is touched at
/// most once and no field edit targets a token that is also split.
inline void check_conflicts(const ChangeSet& cs) {
  std::set<std::tuple<std::size_t, int, int>> seen;
  std::set<std::pair<std::size_t, int>> split;
  for (const auto& r : cs.records) {
    if (r.kind == RecordKind::TokenSplit) split.insert({r.sentence, r.token});
  }
  for (std::size_t i = 0; i < cs.records.size(); ++i) {
    const auto& r = cs.records[i];
    if (!seen.insert(detail::record_key(r)).second) {
      throw ConflictError("record " + std::to_string(i) + " touches sentence " +
                          std::to_string(r.sentence) + " token " +
                          std::to_string(r.token) + " twice");
    }
    if (r.kind == RecordKind::FieldEdit && split.count({r.sentence, r.token})) {
      throw ConflictError("record " + std::to_string(i) + " edits token " +
                          std::to_string(r.token) + " of sentence " +
                          std::to_string(r.sentence) + " which another record splits");
    }
  }
}

/// Concatenates rule outputs computed on the same snapshot. Later records
/// that would conflict with earlier ones are dropped.
inline ChangeSet merge_changesets(const std::vector<ChangeSet>& sets,
                                  const std::string& fingerprint) {
  ChangeSet out;
  out.fingerprint = fingerprint;
  std::set<std::tuple<std::size_t, int, int>> seen;
  std::set<std::pair<std::size_t, int>> split;
  for (const auto& cs : sets) {
    for (const auto& rule : cs.rules) {
      if (std::find(out.rules.begin(), out.rules.end(), rule) == out.rules.end()) {
        out.rules.push_back(rule);
      }
    }
    for (const auto& r : cs.records) {
      if (r.kind == RecordKind::TokenSplit) split.insert({r.sentence, r.token});
    }
  }
  for (const auto& cs : sets) {
    for (const auto& r : cs.records) {
      if (r.kind == RecordKind::FieldEdit && split.count({r.sentence, r.token})) continue;
      if (!seen.insert(detail::record_key(r)).second) continue;
      out.records.push_back(r);
    }
  }
  sort_records(out.records);
  return out;
}

// ---------------------------------------------------------------------------
// Application

namespace detail {

/// Where each original token of one sentence currently lives.
struct IdTracker {
  std::vector<int> current;  // index: original id; value: current id
  std::vector<bool> split;

  explicit IdTracker(std::size_t n) : current(n + 1), split(n + 1, false) {
    for (std::size_t i = 0; i <= n; ++i) current[i] = static_cast<int>(i);
  }
  bool known(int id) const { return id >= 0 && id < static_cast<int>(current.size()); }
  int map(int id) const { return current[id]; }
};

inline std::string map_head_text(const std::string& value, const IdTracker& tr,
                                 std::size_t record) {
  if (value == "_") return value;
  auto h = text::parse_uint(value);
  if (!h || !tr.known(*h)) {
    throw ConflictError("record " + std::to_string(record) + ": HEAD value '" + value +
                        "' names no token of the snapshot");
  }
  return std::to_string(tr.map(*h));
}

}  // namespace detail

/// Applies the records accepted by `keep` (called with record index).
inline Treebank apply_records(const Treebank& tb, const ChangeSet& cs,
                              const std::function<bool(std::size_t)>& keep) {
  if (cs.fingerprint != fingerprint(tb)) {
    throw StaleChangeSetError("changeset fingerprint " + cs.fingerprint +
                              " does not match treebank " + fingerprint(tb));
  }
  check_conflicts(cs);
  Treebank out = tb;
  std::map<std::size_t, detail::IdTracker> trackers;
  for (std::size_t i = 0; i < cs.records.size(); ++i) {
    if (!keep(i)) continue;
    const auto& r = cs.records[i];
    const std::string where = "record " + std::to_string(i) + " (" + r.rule + ", sentence " +
                              std::to_string(r.sentence) + ", token " +
                              std::to_string(r.token) + ")";
    if (r.sentence >= out.sentences.size()) {
      throw ConflictError(where + ": no such sentence");
    }
    auto& sentence = out.sentences[r.sentence];
    auto [it, inserted] = trackers.try_emplace(r.sentence, tb.sentences[r.sentence].size());
    auto& tr = it->second;
    if (r.token < 1 || !tr.known(r.token)) throw ConflictError(where + ": no such token");
    if (tr.split[r.token]) throw ConflictError(where + ": token was already split");
    const int cur = tr.map(r.token);
    Token* token = sentence.find(cur);
    if (!token) throw ConflictError(where + ": no such token");

    if (r.kind == RecordKind::FieldEdit) {
      std::string old_value = r.old_value;
      std::string new_value = r.new_value;
      if (r.field == Field::Head) {
        old_value = detail::map_head_text(old_value, tr, i);
        new_value = detail::map_head_text(new_value, tr, i);
      }
      if (column(*token, r.field) != old_value) {
        throw ConflictError(where + ": expected " + std::string(field_name(r.field)) + " '" +
                            old_value + "' but found '" + column(*token, r.field) + "'");
      }
      try {
        set_column(*token, r.field, new_value);
      } catch (const FormatError& e) {
        throw ConflictError(where + ": " + e.what());
      }
      if (r.field == Field::Head && token->head) {
        const int n = static_cast<int>(sentence.size());
        if (*token->head > n || *token->head == token->id) {
          throw ConflictError(where + ": new head " + new_value + " is not a valid head");
        }
      }
      continue;
    }

    if (token->form != r.old_value) {
      throw ConflictError(where + ": expected form '" + r.old_value + "' but found '" +
                          token->form + "'");
    }
    SplitSpec spec = r.split;
    for (auto& part : spec.parts) {
      if (part.head.kind == HeadRef::Kind::Token) {
        if (!tr.known(part.head.value) || part.head.value == r.token) {
          throw ConflictError(where + ": split part head names no other token");
        }
        part.head.value = tr.map(part.head.value);
      }
    }
    try {
      sentence = insert_split(sentence, cur, spec);
    } catch (const ArgumentError& e) {
      throw ConflictError(where + ": " + e.what());
    }
    const int shift = static_cast<int>(spec.parts.size()) - 1;
    for (auto& c : tr.current) {
      if (c > cur) c += shift;
    }
    tr.current[r.token] = cur + spec.dependents_to;
    tr.split[r.token] = true;
  }
  for (const auto& [index, tr] : trackers) {
    if (check_basic(tb.sentences[index])) continue;  // was already broken
    if (auto problem = check_basic(out.sentences[index])) {
      throw InternalError("sentence " + std::to_string(index) +
                          " lost its basic invariants: " + *problem);
    }
  }
  return out;
}

inline Treebank apply_changeset(const Treebank& tb, const ChangeSet& cs,
                                ApplyMode mode = ApplyMode::All) {
  return apply_records(tb, cs, [&](std::size_t i) {
    return mode == ApplyMode::All || cs.records[i].confidence == Confidence::Auto;
  });
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json part_to_json(const SplitPart& p) {
  nlohmann::json j;
  j["form"] = column(p.token, Field::Form);
  j["lemma"] = column(p.token, Field::Lemma);
  j["upos"] = column(p.token, Field::Upos);
  j["xpos"] = column(p.token, Field::Xpos);
  j["feats"] = column(p.token, Field::Feats);
  j["deprel"] = column(p.token, Field::Deprel);
  j["deps"] = column(p.token, Field::Deps);
  j["misc"] = column(p.token, Field::Misc);
  if (p.head.kind == HeadRef::Kind::Part) {
    j["head"] = {{"part", p.head.value}};
  } else {
    j["head"] = {{"token", p.head.value}};
  }
  return j;
}

inline SplitPart part_from_json(const nlohmann::json& j) {
  SplitPart p;
  set_column(p.token, Field::Form, j.at("form").get<std::string>());
  set_column(p.token, Field::Lemma, j.at("lemma").get<std::string>());
  set_column(p.token, Field::Upos, j.at("upos").get<std::string>());
  set_column(p.token, Field::Xpos, j.at("xpos").get<std::string>());
  set_column(p.token, Field::Feats, j.at("feats").get<std::string>());
  set_column(p.token, Field::Deprel, j.at("deprel").get<std::string>());
  set_column(p.token, Field::Deps, j.value("deps", std::string("_")));
  set_column(p.token, Field::Misc, j.value("misc", std::string("_")));
  const auto& h = j.at("head");
  if (h.contains("part")) {
    p.head = HeadRef::part(h.at("part").get<int>());
  } else {
    p.head = HeadRef::token(h.at("token").get<int>());
  }
  return p;
}

}  // namespace detail

inline nlohmann::json record_to_json(const ChangeRecord& r) {
  nlohmann::json j;
  j["sentence"] = r.sentence;
  j["token"] = r.token;
  j["kind"] = kind_name(r.kind);
  if (r.kind == RecordKind::FieldEdit) {
    j["field"] = field_name(r.field);
  } else {
    j["field"] = nullptr;
  }
  j["old"] = r.old_value;
  j["new"] = r.new_value;
  j["rule"] = r.rule;
  j["confidence"] = confidence_name(r.confidence);
  if (!r.note.empty()) j["note"] = r.note;
  if (r.kind == RecordKind::TokenSplit) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : r.split.parts) parts.push_back(detail::part_to_json(p));
    j["split"] = {{"parts", parts},
                  {"span_form", r.split.span_form},
                  {"span_misc", r.split.span_misc.str()},
                  {"dependents_to", r.split.dependents_to}};
  }
  return j;
}

inline ChangeRecord record_from_json(const nlohmann::json& j) {
  try {
    ChangeRecord r;
    r.sentence = j.at("sentence").get<std::size_t>();
    r.token = j.at("token").get<int>();
    auto kind = j.at("kind").get<std::string>();
    if (kind == "field-edit") {
      r.kind = RecordKind::FieldEdit;
      auto f = parse_field(j.at("field").get<std::string>());
      if (!f) throw FormatError("unknown field " + j.at("field").dump());
      r.field = *f;
    } else if (kind == "token-split") {
      r.kind = RecordKind::TokenSplit;
      const auto& s = j.at("split");
      for (const auto& p : s.at("parts")) r.split.parts.push_back(detail::part_from_json(p));
      r.split.span_form = s.at("span_form").get<std::string>();
      r.split.span_misc = MiscBag::parse(s.value("span_misc", std::string("_")));
      r.split.dependents_to = s.value("dependents_to", 0);
    } else {
      throw FormatError("unknown record kind '" + kind + "'");
    }
    r.old_value = j.at("old").get<std::string>();
    r.new_value = j.at("new").get<std::string>();
    r.rule = j.value("rule", std::string());
    auto conf = j.value("confidence", std::string("review"));
    if (conf != "auto" && conf != "review") throw FormatError("unknown confidence '" + conf + "'");
    r.confidence = conf == "auto" ? Confidence::Auto : Confidence::Review;
    r.note = j.value("note", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed change record: ") + e.what());
  }
}

/// Object form used by the annotation service: records carry their index as "id".
inline nlohmann::json changeset_to_json(const ChangeSet& cs) {
  nlohmann::json records = nlohmann::json::array();
  for (std::size_t i = 0; i < cs.records.size(); ++i) {
    auto j = record_to_json(cs.records[i]);
    j["id"] = i;
    records.push_back(std::move(j));
  }
  return {{"fingerprint", cs.fingerprint}, {"rules", cs.rules}, {"records", records}};
}

inline ChangeSet changeset_from_json(const nlohmann::json& j) {
  ChangeSet cs;
  try {
    cs.fingerprint = j.at("fingerprint").get<std::string>();
    cs.rules = j.value("rules", std::vector<std::string>{});
    for (const auto& r : j.at("records")) cs.records.push_back(record_from_json(r));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed changeset: ") + e.what());
  }
  return cs;
}

/// Line-oriented form: a header line per ChangeSet followed by one line per record.
inline std::string changesets_to_jsonl(const std::vector<ChangeSet>& sets) {
  std::string out;
  for (const auto& cs : sets) {
    nlohmann::json header = {{"type", "changeset"},
                             {"fingerprint", cs.fingerprint},
                             {"rules", cs.rules},
                             {"records", cs.records.size()}};
    out += header.dump() + "\n";
    for (const auto& r : cs.records) {
      auto j = record_to_json(r);
      j["type"] = "record";
      out += j.dump() + "\n";
    }
  }
  return out;
}

inline std::vector<ChangeSet> changesets_from_jsonl(std::string_view content) {
  std::vector<ChangeSet> sets;
  std::size_t expected = 0;
  std::size_t lineno = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++lineno;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
    }
    auto type = j.value("type", std::string("record"));
    if (type == "changeset") {
      if (!sets.empty() && sets.back().records.size() != expected) {
        throw ParseError(lineno, "previous changeset is missing records");
      }
      ChangeSet cs;
      cs.fingerprint = j.value("fingerprint", std::string());
      cs.rules = j.value("rules", std::vector<std::string>{});
      expected = j.value("records", std::size_t{0});
      sets.push_back(std::move(cs));
    } else {
      if (sets.empty()) throw ParseError(lineno, "record before any changeset header");
      try {
        sets.back().records.push_back(record_from_json(j));
      } catch (const FormatError& e) {
        throw ParseError(lineno, e.what());
      }
    }
  }
  if (!sets.empty() && sets.back().records.size() != expected) {
    throw ParseError(lineno, "last changeset is missing records");
  }
  return sets;
}

}  // namespace tbkit

#endif  // TBKIT_CHANGESET_HPP
