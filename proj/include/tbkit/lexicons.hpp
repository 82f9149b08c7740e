#ifndef TBKIT_LEXICONS_HPP
#define TBKIT_LEXICONS_HPP

// Word lists consumed by the re-annotation rules. On disk each list is a
// UTF-8 file with one entry per line and '#' comments.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "tbkit/text.hpp"

namespace tbkit {

using WordSet = std::set<std::string>;

/// Entries are Turkish-lowercased and deduplicated.
inline WordSet parse_lexicon(std::string_view content) {
  WordSet out;
  for (auto& raw : text::split(content, '\n')) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::trim(line);
    if (line.empty()) continue;
    out.insert(text::turkish_lower(line));
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline WordSet load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_file(path));
}

struct Lexicons {
  WordSet lvc_nouns;       // nouns forming light-verb constructions with ol-
  WordSet temporal_nouns;  // lemmas of temporal obliques
  WordSet stems;           // known nominal stems; raises df= confidence
  WordSet clausal_deprels; // dependents that head their own clause

  static Lexicons defaults() {
    Lexicons lex;
    lex.lvc_nouns = {"sorun", "neden", "sebep", "yardım", "zarar", "fayda",
                     "etki", "engel", "örnek", "şahit", "tanık", "sahip",
                     "mahkum", "mecbur", "razı"};
    lex.temporal_nouns = {
        "dün", "bugün", "yarın", "şimdi", "sabah", "akşam", "gece", "öğle",
        "öğleden", "gün", "hafta", "ay", "yıl", "sene", "saat", "dakika",
        "saniye", "zaman", "dönem", "yüzyıl", "asır", "kış", "yaz", "bahar",
        "ilkbahar", "sonbahar", "pazartesi", "salı", "çarşamba", "perşembe",
        "cuma", "cumartesi", "pazar", "ocak", "şubat", "mart", "nisan",
        "mayıs", "haziran", "temmuz", "ağustos", "eylül", "ekim", "kasım",
        "aralık", "geçen", "evvel", "sonra", "önce"};
    lex.stems = {"tüy", "sabır", "önem", "ilgi", "mut", "renk", "su", "tuz",
                 "şeker", "ses", "güç", "akıl", "değer", "süt", "yağ", "et",
                 "para", "umut", "anlam", "kadın", "baş", "ev", "kedi",
                 "bilgi", "sevgi", "saygı", "acı", "tat", "koku", "yaş"};
    lex.clausal_deprels = {"ccomp", "csubj", "advcl", "parataxis"};
    return lex;
  }

  /// Reads lvc.txt, temporal.txt, stems.txt and clausal.txt from `dir`;
  /// files that are absent keep the built-in default list.
  static Lexicons load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
      throw Error("lexicon directory " + dir.string() + " does not exist");
    }
    Lexicons lex = defaults();
    auto maybe = [&](const char* name, WordSet& target) {
      auto p = dir / name;
      if (std::filesystem::exists(p)) target = load_lexicon(p);
    };
    maybe("lvc.txt", lex.lvc_nouns);
    maybe("temporal.txt", lex.temporal_nouns);
    maybe("stems.txt", lex.stems);
    maybe("clausal.txt", lex.clausal_deprels);
    return lex;
  }
};

}  // namespace tbkit

#endif  // TBKIT_LEXICONS_HPP
