#ifndef TBKIT_INVENTORY_HPP
#define TBKIT_INVENTORY_HPP

// Tag inventories and the MISC key grammar. The built-in default mirrors
// data/inventory.json; a user file replaces it wholesale.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tbkit/lexicons.hpp"
#include "tbkit/text.hpp"

namespace tbkit {

struct MiscKeyRule {
  bool requires_value = true;
  std::set<std::string> allowed;  // empty: any non-empty value
  friend bool operator==(const MiscKeyRule&, const MiscKeyRule&) = default;
};

struct InventoryConfig {
  int version = 1;
  std::set<std::string> upos;
  std::set<std::string> xpos;
  std::set<std::string> deprel;
  std::map<std::string, std::set<std::string>> feats;  // vocabulary only
  std::map<std::string, MiscKeyRule> misc;

  friend bool operator==(const InventoryConfig&, const InventoryConfig&) = default;

  static InventoryConfig defaults() {
    InventoryConfig c;
    c.upos = {"ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
              "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
    c.xpos = {"Abr", "Adj", "Adverb", "ANum", "Attr", "Conj", "Demons", "Det",
              "Dup", "Exist", "Indef", "Interj", "NAdj", "NNum", "Neg", "Noun",
              "Partic", "PCAbl", "PCAcc", "PCDat", "PCGen", "PCIns", "PCNom",
              "Pers", "PERS", "Postp", "Prop", "Ptcp", "Punc", "Quant", "Ques",
              "Reflex", "Since", "Verb", "Vnoun", "Zero"};
    c.deprel = {"acl", "advcl", "advmod", "amod", "appos", "aux", "case", "cc",
                "ccomp", "clf", "compound", "conj", "cop", "csubj", "dep", "det",
                "discourse", "dislocated", "expl", "fixed", "flat", "goeswith",
                "iobj", "list", "mark", "nmod", "nsubj", "nummod", "obj", "obl",
                "orphan", "parataxis", "punct", "reparandum", "root", "vocative",
                "xcomp",
                // language-specific subtypes
                "advmod:emph", "aux:q", "cc:preconj", "compound:lvc",
                "compound:redup", "dep:der", "det:predet", "nmod:poss",
                "nsubj:pass", "obl:agent", "obl:tmod"};
    c.feats = {
        {"Abbr", {"Yes"}},
        {"Aspect", {"Hab", "Imp", "Perf", "Prog", "Prosp"}},
        {"Case", {"Abl", "Acc", "Dat", "Equ", "Gen", "Ins", "Loc", "Nom"}},
        {"Echo", {"Rdp"}},
        {"Evident", {"Fh", "Nfh"}},
        {"Mood", {"Cnd", "Des", "Gen", "Imp", "Ind", "Nec", "Opt", "Pot"}},
        {"NumType", {"Card", "Dist", "Ord"}},
        {"Number", {"Plur", "Sing"}},
        {"Number[psor]", {"Plur", "Sing"}},
        {"Person", {"1", "2", "3"}},
        {"Person[psor]", {"1", "2", "3"}},
        {"Polarity", {"Neg", "Pos"}},
        {"Polite", {"Form", "Infm"}},
        {"PronType", {"Dem", "Ind", "Int", "Prs", "Rfl"}},
        {"Reflex", {"Yes"}},
        {"Tense", {"Fut", "Past", "Pres"}},
        {"VerbForm", {"Conv", "Fin", "Part", "Vnoun"}},
        {"Voice", {"Cau", "Pass", "Rcp", "Rfl"}},
    };
    c.misc = {{"df", {true, {}}}, {"nullcop", {true, {"3s", "3p"}}}};
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json misc_json = nlohmann::json::object();
    for (const auto& [k, rule] : misc) {
      misc_json[k] = {{"requires_value", rule.requires_value}, {"allowed", rule.allowed}};
    }
    return {{"version", version}, {"upos", upos},   {"xpos", xpos},
            {"deprel", deprel},   {"feats", feats}, {"misc", misc_json}};
  }

  static InventoryConfig from_json(const nlohmann::json& j) {
    InventoryConfig c;
    try {
      c.version = j.value("version", 1);
      c.upos = j.at("upos").get<std::set<std::string>>();
      c.xpos = j.at("xpos").get<std::set<std::string>>();
      c.deprel = j.at("deprel").get<std::set<std::string>>();
      if (j.contains("feats")) {
        c.feats = j.at("feats").get<std::map<std::string, std::set<std::string>>>();
      }
      if (j.contains("misc")) {
        for (const auto& [k, v] : j.at("misc").items()) {
          MiscKeyRule rule;
          rule.requires_value = v.value("requires_value", true);
          rule.allowed = v.value("allowed", std::set<std::string>{});
          c.misc[k] = rule;
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed inventory config: ") + e.what());
    }
    if (c.upos.empty() || c.xpos.empty() || c.deprel.empty()) {
      throw Error("inventory config needs non-empty upos, xpos and deprel sets");
    }
    return c;
  }

  static InventoryConfig load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
};

}  // namespace tbkit

#endif  // TBKIT_INVENTORY_HPP
