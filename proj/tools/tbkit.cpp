// tbkit command-line entry point.
//
// Reports go to stdout and logs to stderr. Exit status: 0 success,
// 1 findings (validation errors, conflicting edits, unscorable inputs),
// 2 usage or I/O errors.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tbkit/service.hpp"
#include "tbkit/tbkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;

struct IoError : tbkit::Error {
  using Error::Error;
};

struct Options {
  std::vector<std::string> inputs;
  std::string rules = "all";
  std::string mode = "suggest";
  std::string output;
  std::string changes;
  std::string level = "ud";
  std::string format = "text";
  std::string fields;
  std::string gold;
  std::string pred;
  int port = 8080;
  std::string data;
  std::string lexicon;
  std::string inventory;
};

tbkit::Treebank load(const std::string& path) {
  std::string content;
  try {
    content = tbkit::read_file(path);
  } catch (const tbkit::Error& e) {
    throw IoError(e.what());
  }
  try {
    return tbkit::parse_document(content);
  } catch (const tbkit::ParseError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw IoError("cannot write " + path);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

tbkit::InventoryConfig inventory(const Options& o) {
  if (o.inventory.empty()) return tbkit::InventoryConfig::defaults();
  try {
    return tbkit::InventoryConfig::load(o.inventory);
  } catch (const tbkit::Error& e) {
    throw IoError(e.what());
  }
}

tbkit::Lexicons lexicons(const Options& o) {
  if (o.lexicon.empty()) return tbkit::Lexicons::defaults();
  try {
    return tbkit::Lexicons::load_dir(o.lexicon);
  } catch (const tbkit::Error& e) {
    throw IoError(e.what());
  }
}

int run_validate(const Options& o) {
  auto level = tbkit::parse_level(o.level);
  if (!level) throw tbkit::ArgumentError("unknown level '" + o.level + "'");
  auto cfg = inventory(o);
  std::string content;
  try {
    content = tbkit::read_file(o.inputs.at(0));
  } catch (const tbkit::Error& e) {
    throw IoError(e.what());
  }
  auto ds = tbkit::validate_document(content, *level, cfg);
  if (o.format == "json") {
    json list = json::array();
    for (const auto& d : ds) list.push_back(tbkit::diagnostic_to_json(d));
    std::cout << json{{"errors", tbkit::error_count(ds)}, {"diagnostics", list}}.dump(2) << "\n";
  } else {
    std::cout << tbkit::render_diagnostics_text(ds);
  }
  return tbkit::error_count(ds) ? kFindings : kOk;
}

int run_transform(const Options& o) {
  auto tb = load(o.inputs.at(0));
  auto rule_list = tbkit::rules::parse_rule_list(o.rules);
  auto lex = lexicons(o);
  if (o.mode == "suggest") {
    auto cs = tbkit::rules::suggest(tb, rule_list, lex);
    emit(o.changes, tbkit::changesets_to_jsonl({cs}));
    std::cerr << "tbkit: " << cs.records.size() << " suggested change(s)\n";
    return kOk;
  }
  auto mode = o.mode == "auto-only" ? tbkit::ApplyMode::AutoOnly : tbkit::ApplyMode::All;
  auto result = tbkit::rules::run_pipeline(tb, rule_list, lex, mode);
  if (!o.changes.empty()) write_file(o.changes, tbkit::changesets_to_jsonl(result.stages));
  emit(o.output, tbkit::serialize_document(result.result));
  std::size_t n = 0;
  for (const auto& s : result.stages) n += s.records.size();
  std::cerr << "tbkit: " << n << " change record(s) over " << result.stages.size() << " stage(s)\n";
  return kOk;
}

int run_stats(const Options& o) {
  auto report = tbkit::treebank_stats(load(o.inputs.at(0)));
  std::cout << (o.format == "json" ? tbkit::stats_to_json(report).dump(2) + "\n"
                                   : tbkit::render_stats_text(report));
  return kOk;
}

int run_diff(const Options& o) {
  std::vector<tbkit::Field> fields = tbkit::default_diff_fields();
  if (!o.fields.empty()) {
    fields.clear();
    for (const auto& name : tbkit::text::split(o.fields, ',')) {
      auto f = tbkit::parse_field(tbkit::text::trim(name));
      if (!f) throw tbkit::ArgumentError("unknown field '" + name + "'");
      fields.push_back(*f);
    }
  }
  auto report = tbkit::diff_treebanks(load(o.inputs.at(0)), load(o.inputs.at(1)), fields);
  for (const auto& w : report.warnings) std::cerr << "tbkit: warning: " << w << "\n";
  std::cout << (o.format == "json" ? tbkit::change_report_to_json(report).dump(2) + "\n"
                                   : tbkit::render_change_report_text(report));
  return kOk;
}

int run_agree(const Options& o) {
  auto report = tbkit::agreement_report(load(o.inputs.at(0)), load(o.inputs.at(1)));
  std::cout << (o.format == "json" ? tbkit::agreement_to_json(report).dump(2) + "\n"
                                   : tbkit::render_agreement_text(report));
  return kOk;
}

int run_eval(const Options& o) {
  auto scores = tbkit::attachment_scores(load(o.gold), load(o.pred));
  std::cout << (o.format == "json" ? tbkit::scores_to_json(scores).dump(2) + "\n"
                                   : tbkit::render_scores_text(scores));
  return kOk;
}

httplib::Server* g_server = nullptr;

int run_serve(const Options& o) {
  tbkit::service::ServiceOptions so;
  so.data_dir = o.data.empty() ? fs::current_path() : fs::path(o.data);
  so.inventory = inventory(o);
  so.lexicons = lexicons(o);
  tbkit::service::AnnotationService service(std::move(so));
  if (!o.inputs.empty()) {
    try {
      service.open(o.inputs.front());
    } catch (const tbkit::service::HttpError& e) {
      throw IoError(e.what());
    }
  }
  httplib::Server server;
  service.bind(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << "tbkit: serving on http://127.0.0.1:" << o.port << "\n";
  if (!server.listen("127.0.0.1", o.port)) throw IoError("cannot listen on port " + std::to_string(o.port));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treebank toolkit: validation, re-annotation rules, metrics and an annotation service"};
  app.require_subcommand(1, 1);
  Options o;

  auto format_opt = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  };

  auto* validate = app.add_subcommand("validate", "Check a CoNLL-U file");
  validate->add_option("file", o.inputs, "input file")->required()->expected(1)->check(CLI::ExistingFile);
  validate->add_option("--level", o.level, "basic or ud")->check(CLI::IsMember({"basic", "ud"}));
  validate->add_option("--inventory", o.inventory, "inventory JSON")->check(CLI::ExistingFile);
  format_opt(validate);

  auto* transform = app.add_subcommand("transform", "Run re-annotation rules");
  transform->add_option("file", o.inputs, "input file")->required()->expected(1)->check(CLI::ExistingFile);
  transform->add_option("--rules", o.rules, "comma-separated: ki,df,nullcop,cop,emph,tmod or all");
  transform->add_option("--mode", o.mode, "suggest, apply or auto-only")
      ->check(CLI::IsMember({"suggest", "apply", "auto-only"}));
  transform->add_option("-o,--output", o.output, "transformed CoNLL-U (default stdout)");
  transform->add_option("--changes", o.changes, "ChangeSet JSONL output");
  transform->add_option("--lexicon", o.lexicon, "lexicon directory")->check(CLI::ExistingDirectory);

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("file", o.inputs, "input file")->required()->expected(1)->check(CLI::ExistingFile);
  format_opt(stats);

  auto* diff = app.add_subcommand("diff", "Compare two versions of a treebank");
  diff->add_option("files", o.inputs, "old and new file")->required()->expected(2)->check(CLI::ExistingFile);
  diff->add_option("--fields", o.fields, "comma-separated columns to compare");
  format_opt(diff);

  auto* agree = app.add_subcommand("agree", "Inter-annotator agreement");
  agree->add_option("files", o.inputs, "two annotations of one text")->required()->expected(2)->check(CLI::ExistingFile);
  format_opt(agree);

  auto* eval = app.add_subcommand("eval", "Attachment scores");
  eval->add_option("--gold", o.gold, "gold file")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", o.pred, "predicted file")->required()->check(CLI::ExistingFile);
  format_opt(eval);

  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  serve->add_option("file", o.inputs, "document to open")->expected(0, 1);
  serve->add_option("--port", o.port, "localhost port")->check(CLI::Range(1, 65535));
  serve->add_option("--data", o.data, "data directory")->check(CLI::ExistingDirectory);
  serve->add_option("--inventory", o.inventory, "inventory JSON")->check(CLI::ExistingFile);
  serve->add_option("--lexicon", o.lexicon, "lexicon directory")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (validate->parsed()) return run_validate(o);
    if (transform->parsed()) return run_transform(o);
    if (stats->parsed()) return run_stats(o);
    if (diff->parsed()) return run_diff(o);
    if (agree->parsed()) return run_agree(o);
    if (eval->parsed()) return run_eval(o);
    if (serve->parsed()) return run_serve(o);
  } catch (const IoError& e) {
    std::cerr << "tbkit: " << e.what() << "\n";
    return kUsage;
  } catch (const tbkit::ArgumentError& e) {
    std::cerr << "tbkit: " << e.what() << "\n";
    return kUsage;
  } catch (const tbkit::Error& e) {
    std::cerr << "tbkit: " << e.what() << "\n";
    return kFindings;
  }
  return kUsage;
}
