#ifndef TBKIT_SERVICE_HPP
#define TBKIT_SERVICE_HPP

// Local HTTP/JSON backend for the annotation editor.
//
// One document per session. Handlers are plain member functions returning a
// status and a JSON body so they can be exercised without a socket; bind()
// routes them on an httplib::Server. Reads take a shared lock, every mutation
// (including save) takes the exclusive lock, so writers are serialized and
// readers always see a consistent state.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "tbkit/changeset.hpp"
#include "tbkit/conllu.hpp"
#include "tbkit/inventory.hpp"
#include "tbkit/lexicons.hpp"
#include "tbkit/rules.hpp"
#include "tbkit/validation.hpp"

namespace tbkit::service {

using nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

class HttpError : public Error {
 public:
  HttpError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

inline HttpError not_found(const std::string& m) { return {404, "not_found", m}; }
inline HttpError conflict(const std::string& m) { return {409, "conflict", m}; }
inline HttpError bad_request(const std::string& m) { return {400, "bad_request", m}; }

/// Controlled vocabularies for autocompletion, sorted and deduplicated.
class VocabSet {
 public:
  static VocabSet from(const InventoryConfig& cfg) {
    VocabSet v;
    v.lists_["UPOS"].assign(cfg.upos.begin(), cfg.upos.end());
    v.lists_["XPOS"].assign(cfg.xpos.begin(), cfg.xpos.end());
    v.lists_["DEPREL"].assign(cfg.deprel.begin(), cfg.deprel.end());
    auto& keys = v.lists_["FEATS"];
    for (const auto& [key, values] : cfg.feats) {
      keys.push_back(key);
      v.feature_values_[key].assign(values.begin(), values.end());
    }
    for (const auto& [key, rule] : cfg.misc) v.lists_["MISC"].push_back(key);
    return v;
  }

  /// UPOS, XPOS and DEPREL only admit listed values.
  static bool closed(const std::string& field) {
    return field == "UPOS" || field == "XPOS" || field == "DEPREL";
  }

  bool has_field(const std::string& field) const { return lists_.count(field) > 0; }

  /// Values of `field` starting with `prefix`, compared case-insensitively.
  /// For FEATS, a non-empty `key` selects that feature's values instead of keys.
  std::vector<std::string> candidates(const std::string& field, const std::string& prefix,
                                      const std::string& key = {}) const {
    const std::vector<std::string>* list = nullptr;
    if (field == "FEATS" && !key.empty()) {
      auto it = feature_values_.find(key);
      if (it == feature_values_.end()) return {};
      list = &it->second;
    } else {
      auto it = lists_.find(field);
      if (it == lists_.end()) return {};
      list = &it->second;
    }
    std::vector<std::string> out;
    for (const auto& v : *list) {
      if (text::starts_with_ci(v, prefix)) out.push_back(v);
    }
    return out;
  }

 private:
  std::map<std::string, std::vector<std::string>> lists_;
  std::map<std::string, std::vector<std::string>> feature_values_;
};

struct GraphBox {
  int id;
  std::string form;
  std::string upos;
};

struct GraphArc {
  int head;
  int dep;
  std::string label;
  int rank;  // 1 = lowest
};

struct GraphLayout {
  std::vector<GraphBox> boxes;
  std::vector<GraphArc> arcs;
};

/// An arc's rank is one more than the highest rank among the arcs strictly
/// inside its span, which is the least height that keeps nested arcs apart.
inline GraphLayout layout_graph(const Sentence& s) {
  GraphLayout g;
  for (const auto& t : s.tokens) g.boxes.push_back({t.id, column(t, Field::Form), column(t, Field::Upos)});
  for (const auto& t : s.tokens) {
    if (t.head && *t.head > 0) g.arcs.push_back({*t.head, t.id, column(t, Field::Deprel), 1});
  }
  auto lo = [](const GraphArc& a) { return std::min(a.head, a.dep); };
  auto hi = [](const GraphArc& a) { return std::max(a.head, a.dep); };
  std::vector<std::size_t> order(g.arcs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hi(g.arcs[a]) - lo(g.arcs[a]) < hi(g.arcs[b]) - lo(g.arcs[b]);
  });
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& arc = g.arcs[order[k]];
    for (std::size_t m = 0; m < k; ++m) {
      const auto& inner = g.arcs[order[m]];
      bool nested = lo(inner) >= lo(arc) && hi(inner) <= hi(arc) &&
                    (lo(inner) != lo(arc) || hi(inner) != hi(arc));
      if (nested) arc.rank = std::max(arc.rank, inner.rank + 1);
    }
  }
  return g;
}

inline json graph_to_json(const GraphLayout& g) {
  json boxes = json::array();
  for (const auto& b : g.boxes) boxes.push_back({{"id", b.id}, {"form", b.form}, {"upos", b.upos}});
  json arcs = json::array();
  for (const auto& a : g.arcs) {
    arcs.push_back({{"head", a.head}, {"dep", a.dep}, {"label", a.label}, {"rank", a.rank}});
  }
  return {{"boxes", boxes}, {"arcs", arcs}};
}

/// Table row exactly as the editor displays it: every cell is column text.
inline json token_to_json(const Token& t) {
  json j = {{"ID", std::to_string(t.id)}};
  for (Field f : kAllFields) j[std::string(field_name(f))] = column(t, f);
  return j;
}

struct ServiceOptions {
  std::filesystem::path data_dir;  // documents may only be opened below this
  InventoryConfig inventory = InventoryConfig::defaults();
  Lexicons lexicons = Lexicons::defaults();
};

class AnnotationService {
 public:
  explicit AnnotationService(ServiceOptions opts)
      : opts_(std::move(opts)), vocab_(VocabSet::from(opts_.inventory)) {}

  // -- session ---------------------------------------------------------------

  /// Loads `path` (relative paths resolve against the data directory).
  json open(const std::filesystem::path& path) {
    auto resolved = resolve(path);
    Treebank tb;
    try {
      tb = parse_document(read_file(resolved));
    } catch (const ParseError& e) {
      throw bad_request(resolved.string() + ": " + e.what());
    } catch (const Error& e) {
      throw not_found(e.what());
    }
    std::unique_lock lock(mutex_);
    path_ = resolved;
    tb_ = std::move(tb);
    saved_fingerprint_ = fingerprint(tb_);
    undo_.clear();
    suggestion_.reset();
    return document_locked();
  }

  json document() const {
    std::shared_lock lock(mutex_);
    return document_locked();
  }

  json sentence(std::size_t index) const {
    std::shared_lock lock(mutex_);
    return sentence_locked(index);
  }

  json vocab(const std::string& field, const std::string& prefix, const std::string& key) const {
    std::string name = field;
    for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (!vocab_.has_field(name)) throw not_found("no vocabulary for field '" + field + "'");
    auto list = vocab_.candidates(name, prefix, key);
    json autofill = list.size() == 1 ? json(list.front()) : json(nullptr);
    return {{"field", name},
            {"prefix", prefix},
            {"closed", VocabSet::closed(name)},
            {"candidates", list},
            {"autofill", autofill}};
  }

  json validate(Level level) const {
    std::shared_lock lock(mutex_);
    require_document();
    auto ds = tbkit::validate(tb_, level, opts_.inventory);
    json list = json::array();
    for (const auto& d : ds) list.push_back(diagnostic_to_json(d));
    return {{"level", level_name(level)}, {"errors", error_count(ds)}, {"diagnostics", list}};
  }

  /// Computes and remembers a ChangeSet; nothing is applied.
  json suggest(const std::vector<std::string>& rule_list) {
    std::unique_lock lock(mutex_);
    require_document();
    suggestion_ = rules::suggest(tb_, rule_list, opts_.lexicons);
    return changeset_to_json(*suggestion_);
  }

  // -- mutations -------------------------------------------------------------

  /// `edits` maps column names to new column text.
  json patch_token(std::size_t index, int id, const json& edits) {
    if (!edits.is_object() || edits.empty()) {
      throw bad_request("expected a non-empty object of column edits");
    }
    std::unique_lock lock(mutex_);
    require_sentence(index);
    Sentence edited = tb_.sentences[index];
    auto it = std::find_if(edited.tokens.begin(), edited.tokens.end(),
                           [&](const Token& t) { return t.id == id; });
    if (it == edited.tokens.end()) {
      throw not_found("sentence " + std::to_string(index) + " has no token " + std::to_string(id));
    }
    for (const auto& [name, value] : edits.items()) {
      auto field = parse_field(name);
      if (!field) throw bad_request("unknown column '" + name + "'");
      if (!value.is_string()) throw bad_request("value for " + name + " must be a string");
      try {
        set_column(*it, *field, value.get<std::string>());
      } catch (const Error& e) {
        throw bad_request(e.what());
      }
    }
    commit(index, std::move(edited));
    return sentence_locked(index);
  }

  /// Applies the ki rule's proposal for one token.
  json split(std::size_t index, int id) {
    std::unique_lock lock(mutex_);
    require_sentence(index);
    if (!tb_.sentences[index].find(id)) {
      throw not_found("sentence " + std::to_string(index) + " has no token " + std::to_string(id));
    }
    Treebank single;
    single.sentences.push_back(tb_.sentences[index]);
    auto cs = rules::split_ki(single, opts_.lexicons);
    std::erase_if(cs.records, [&](const ChangeRecord& r) { return r.token != id; });
    if (cs.records.empty()) {
      throw conflict("no -ki split is proposed for token " + std::to_string(id));
    }
    auto result = apply_changeset(single, cs);
    auto record = record_to_json(cs.records.front());
    record["sentence"] = index;
    commit(index, std::move(result.sentences.front()));
    auto out = sentence_locked(index);
    out["applied"] = record;
    return out;
  }

  /// Applies records of the last suggestion, or of a ChangeSet given in the
  /// body, selected by their "id".
  json apply(const json& body) {
    if (!body.is_object() || !body.contains("ids") || !body["ids"].is_array()) {
      throw bad_request("expected {\"ids\": [...]}");
    }
    std::set<std::size_t> ids;
    for (const auto& v : body["ids"]) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw bad_request("record ids are non-negative integers");
      }
      ids.insert(v.get<std::size_t>());
    }
    std::unique_lock lock(mutex_);
    require_document();
    ChangeSet cs;
    if (body.contains("changeset")) {
      try {
        cs = changeset_from_json(body["changeset"]);
      } catch (const FormatError& e) {
        throw bad_request(e.what());
      }
    } else if (suggestion_) {
      cs = *suggestion_;
    } else {
      throw conflict("no suggestion to apply; call /suggest first");
    }
    for (auto id : ids) {
      if (id >= cs.records.size()) throw not_found("no record " + std::to_string(id));
    }
    Treebank next;
    try {
      next = apply_records(tb_, cs, [&](std::size_t i) { return ids.count(i) > 0; });
    } catch (const StaleChangeSetError& e) {
      throw conflict(e.what());
    } catch (const ConflictError& e) {
      throw conflict(e.what());
    }
    UndoEntry entry;
    for (std::size_t i = 0; i < tb_.sentences.size(); ++i) {
      if (!(tb_.sentences[i] == next.sentences[i])) entry.push_back({i, tb_.sentences[i]});
    }
    undo_.push_back(std::move(entry));
    tb_ = std::move(next);
    suggestion_.reset();
    return {{"applied", ids.size()}, {"document", document_locked()}};
  }

  json undo() {
    std::unique_lock lock(mutex_);
    require_document();
    if (undo_.empty()) throw conflict("nothing to undo");
    std::vector<std::size_t> touched;
    for (auto& [index, snapshot] : undo_.back()) {
      tb_.sentences[index] = std::move(snapshot);
      touched.push_back(index);
    }
    undo_.pop_back();
    suggestion_.reset();
    return {{"sentences", touched}, {"document", document_locked()}};
  }

  /// Writes to a temporary sibling and renames it over the document.
  json save() {
    std::unique_lock lock(mutex_);
    if (!path_) throw conflict("no document is open");
    auto tmp = *path_;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << serialize_document(tb_);
      out.flush();
      if (!out) throw HttpError(500, "io_error", "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, *path_, ec);
    if (ec) throw HttpError(500, "io_error", "cannot replace " + path_->string() + ": " + ec.message());
    saved_fingerprint_ = fingerprint(tb_);
    return document_locked();
  }

  /// Snapshot of the in-memory treebank.
  Treebank treebank() const {
    std::shared_lock lock(mutex_);
    return tb_;
  }

  // -- HTTP ------------------------------------------------------------------

  void bind(httplib::Server& server) {
    server.Get("/document", wrap([this](const httplib::Request&) { return document(); }));
    server.Get(R"(/sentence/(\d+))", wrap([this](const httplib::Request& req) {
                 return sentence(index_param(req, 1));
               }));
    server.Patch(R"(/sentence/(\d+)/token/(\d+))", wrap([this](const httplib::Request& req) {
                   return patch_token(index_param(req, 1), static_cast<int>(index_param(req, 2)),
                                      parse_body(req));
                 }));
    server.Post(R"(/sentence/(\d+)/split)", wrap([this](const httplib::Request& req) {
                  auto body = parse_body(req);
                  if (!body.is_object() || !body.contains("token") ||
                      !body["token"].is_number_integer()) {
                    throw bad_request("expected {\"token\": <id>}");
                  }
                  return split(index_param(req, 1), body["token"].get<int>());
                }));
    server.Post("/undo", wrap([this](const httplib::Request&) { return undo(); }));
    server.Get(R"(/vocab/([A-Za-z]+))", wrap([this](const httplib::Request& req) {
                 return vocab(req.matches[1].str(), req.get_param_value("prefix"),
                              req.get_param_value("key"));
               }));
    server.Post("/validate", wrap([this](const httplib::Request& req) {
                  std::string name = req.has_param("level") ? req.get_param_value("level") : "ud";
                  auto level = parse_level(name);
                  if (!level) throw bad_request("unknown level '" + name + "'");
                  return validate(*level);
                }));
    server.Post("/suggest", wrap([this](const httplib::Request& req) {
                  std::string list = req.has_param("rules") ? req.get_param_value("rules") : "all";
                  try {
                    return suggest(rules::parse_rule_list(list));
                  } catch (const ArgumentError& e) {
                    throw bad_request(e.what());
                  }
                }));
    server.Post("/apply", wrap([this](const httplib::Request& req) { return apply(parse_body(req)); }));
    server.Post("/save", wrap([this](const httplib::Request&) { return save(); }));
    server.Post("/open", wrap([this](const httplib::Request& req) {
                  auto body = parse_body(req);
                  if (!body.is_object() || !body.contains("path") || !body["path"].is_string()) {
                    throw bad_request("expected {\"path\": \"...\"}");
                  }
                  return open(body["path"].get<std::string>());
                }));
  }

 private:
  using UndoEntry = std::vector<std::pair<std::size_t, Sentence>>;

  template <class F>
  static httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      Response r;
      try {
        r.body = f(req);
      } catch (const HttpError& e) {
        r.status = e.status();
        r.body = {{"code", e.code()}, {"message", e.what()}};
      } catch (const std::exception& e) {
        r.status = 500;
        r.body = {{"code", "internal"}, {"message", e.what()}};
      }
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
  }

  static json parse_body(const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw bad_request(std::string("malformed JSON body: ") + e.what());
    }
  }

  static std::size_t index_param(const httplib::Request& req, std::size_t group) {
    auto v = text::parse_uint(req.matches[group].str());
    if (!v) throw bad_request("index out of range");
    return static_cast<std::size_t>(*v);
  }

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    namespace fs = std::filesystem;
    if (opts_.data_dir.empty()) return fs::weakly_canonical(p);
    auto root = fs::weakly_canonical(opts_.data_dir);
    auto full = fs::weakly_canonical(p.is_absolute() ? p : root / p);
    auto rel = full.lexically_relative(root);
    if (rel.empty() || *rel.begin() == "..") {
      throw bad_request(p.string() + " is outside the data directory");
    }
    return full;
  }

  void require_document() const {
    if (!path_) throw conflict("no document is open");
  }

  void require_sentence(std::size_t index) const {
    require_document();
    if (index >= tb_.sentences.size()) {
      throw not_found("no sentence " + std::to_string(index) + " (document has " +
                      std::to_string(tb_.sentences.size()) + ")");
    }
  }

  void commit(std::size_t index, Sentence replacement) {
    undo_.push_back({{index, std::move(tb_.sentences[index])}});
    tb_.sentences[index] = std::move(replacement);
    suggestion_.reset();
  }

  json document_locked() const {
    std::size_t tokens = 0;
    for (const auto& s : tb_.sentences) tokens += s.tokens.size();
    auto fp = path_ ? fingerprint(tb_) : std::string();
    return {{"path", path_ ? json(path_->string()) : json(nullptr)},
            {"sentences", tb_.sentences.size()},
            {"tokens", tokens},
            {"dirty", path_ && fp != saved_fingerprint_},
            {"fingerprint", fp},
            {"undo_depth", undo_.size()}};
  }

  json sentence_locked(std::size_t index) const {
    require_sentence(index);
    const auto& s = tb_.sentences[index];
    json tokens = json::array();
    for (const auto& t : s.tokens) tokens.push_back(token_to_json(t));
    json spans = json::array();
    for (const auto& sp : s.spans) {
      spans.push_back({{"ID", std::to_string(sp.start) + "-" + std::to_string(sp.end)},
                       {"FORM", or_underscore(sp.form)},
                       {"MISC", sp.misc.str()}});
    }
    json diags = json::array();
    for (const auto& d : validate_sentence(s, index, token_line_numbers(tb_, index), Level::Ud,
                                           opts_.inventory)) {
      diags.push_back(diagnostic_to_json(d));
    }
    return {{"index", index},   {"comments", s.comments}, {"tokens", tokens},
            {"spans", spans},   {"diagnostics", diags},   {"graph", graph_to_json(layout_graph(s))}};
  }

  ServiceOptions opts_;
  VocabSet vocab_;
  mutable std::shared_mutex mutex_;
  std::optional<std::filesystem::path> path_;
  Treebank tb_;
  std::string saved_fingerprint_;
  std::vector<UndoEntry> undo_;
  std::optional<ChangeSet> suggestion_;
};

}  // namespace tbkit::service

#endif  // TBKIT_SERVICE_HPP
