// Independent reference computations shared by the unit tests and the
// acceptance binary. None of these call into the code they check.
#ifndef TBKIT_TESTS_ORACLES_HPP
#define TBKIT_TESTS_ORACLES_HPP

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tbkit/tbkit.hpp"

namespace oracle {

// Fifty stems spread over all eight last-vowel classes, including
// consonant clusters, circumflexed loans and upper-case spellings.
inline const std::vector<std::string> kHarmonyStems = {
    "tüy",    "sabır",  "önem",   "mut",     "renk",   "su",     "tuz",    "şeker",
    "ses",    "güç",    "akıl",   "değer",   "süt",    "yağ",    "et",     "para",
    "umut",   "anlam",  "ev",     "kedi",    "göz",    "söz",    "kol",    "yol",
    "kork",   "köprü",  "gül",    "dost",    "film",   "türk",   "kalp",   "bilgi",
    "sevgi",  "saygı",  "acı",    "tat",     "koku",   "yaş",    "ışık",   "kız",
    "öğrenci", "okul",  "dünya",  "dükkân",  "Ankara", "İzmir",  "ORDU",   "Ömür",
    "Kaş",    "hüzün"};

// The eight surface variants (-lI, -sIz) indexed by the last vowel of the stem.
inline const std::map<std::string, std::pair<std::string, std::string>> kHarmonyVariants = {
    {"a", {"lı", "sız"}}, {"ı", {"lı", "sız"}}, {"e", {"li", "siz"}}, {"i", {"li", "siz"}},
    {"o", {"lu", "suz"}}, {"u", {"lu", "suz"}}, {"ö", {"lü", "süz"}}, {"ü", {"lü", "süz"}}};

inline std::string last_vowel_by_scan(const std::string& stem) {
  static const std::map<std::string, std::string> kFold = {
      {"a", "a"}, {"A", "a"}, {"â", "a"}, {"e", "e"}, {"E", "e"}, {"ı", "ı"}, {"I", "ı"},
      {"i", "i"}, {"İ", "i"}, {"o", "o"}, {"O", "o"}, {"ö", "ö"}, {"Ö", "ö"}, {"u", "u"},
      {"U", "u"}, {"ü", "ü"}, {"Ü", "ü"}};
  std::string found;
  // Walk UTF-8 characters left to right and remember the last vowel seen.
  for (std::size_t i = 0; i < stem.size();) {
    std::size_t len = 1;
    auto c = static_cast<unsigned char>(stem[i]);
    if (c >= 0xF0) len = 4; else if (c >= 0xE0) len = 3; else if (c >= 0xC0) len = 2;
    auto ch = stem.substr(i, len);
    if (auto it = kFold.find(ch); it != kFold.end()) found = it->second;
    i += len;
  }
  return found;
}

// Renumbering by explicit node identities: every node of the result is
// either an original token (by old id) or part p of the split. The new id of
// a node is its position in the result list, found by search.
inline std::vector<std::optional<int>> split_heads(const tbkit::Sentence& s, int at,
                                                   const tbkit::SplitSpec& spec) {
  struct Node {
    bool is_part;
    int key;  // old id, or part index
    bool operator==(const Node&) const = default;
  };
  const int n = static_cast<int>(s.tokens.size());
  const int k = static_cast<int>(spec.parts.size());
  std::vector<Node> order;
  for (int id = 1; id <= n; ++id) {
    if (id == at) {
      for (int p = 0; p < k; ++p) order.push_back({true, p});
    } else {
      order.push_back({false, id});
    }
  }
  auto new_id = [&](Node node) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] == node) return static_cast<int>(i) + 1;
    }
    return -1;
  };
  // A reference to the old token `at` means "the part inheriting dependents".
  auto old_ref = [&](int old) -> int {
    if (old == 0) return 0;
    if (old == at) return new_id({true, spec.dependents_to});
    return new_id({false, old});
  };
  std::vector<std::optional<int>> heads;
  for (const auto& node : order) {
    if (node.is_part) {
      const auto& ref = spec.parts[node.key].head;
      heads.push_back(ref.kind == tbkit::HeadRef::Kind::Part ? new_id({true, ref.value})
                                                             : old_ref(ref.value));
    } else {
      const auto& h = s.tokens[node.key - 1].head;
      heads.push_back(h ? std::optional<int>(old_ref(*h)) : std::nullopt);
    }
  }
  return heads;
}

inline const std::set<std::string> kStructuralCodes = {
    "E_ID_SEQUENCE", "E_HEAD_RANGE", "E_HEAD_SELF", "E_SPAN_RANGE",
    "E_HEAD_MISSING", "E_MULTIPLE_ROOTS", "E_CYCLE", "E_ROOT_DEPREL"};

// Sum of |id - head| and arc count, read from serialized lines.
inline std::pair<long long, long long> arc_sum_from_text(const std::string& doc) {
  std::istringstream in(doc);
  std::string line;
  long long sum = 0, arcs = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    if (cols[0].find('-') != std::string::npos || cols[6] == "_") continue;
    long long id = std::stoll(cols[0]), head = std::stoll(cols[6]);
    if (head == 0) continue;
    sum += id > head ? id - head : head - id;
    ++arcs;
  }
  return {sum, arcs};
}

}  // namespace oracle

#endif  // TBKIT_TESTS_ORACLES_HPP
