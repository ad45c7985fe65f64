// Command-line front end: validate, score, merge, closure, stats.
//
// Exit codes: 0 success; 1 validation/scoring found errors; 2 usage or
// configuration error; 3 I/O or parse failure.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempoeval/tempoeval.hpp"

namespace fs = std::filesystem;
using namespace tempoeval;

namespace {

Palette make_palette() {
  Palette palette;
  if (const char* env = std::getenv("TEMPOEVAL_COLOR"))
    palette.enabled = std::string_view(env) == "1";
  else
    palette.enabled = isatty(fileno(stdout));
  return palette;
}

// Files named on the command line, directories expanded to their *.tml
// members in lexicographic order.
std::vector<std::string> expand_paths(const std::vector<std::string>& paths, bool recursive) {
  std::vector<std::string> files;
  for (const auto& path : paths) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      std::vector<fs::path> found;
      auto consider = [&](const fs::directory_entry& entry) {
        if (entry.is_regular_file() && entry.path().extension() == ".tml")
          found.push_back(entry.path());
      };
      if (recursive) {
        for (const auto& entry : fs::recursive_directory_iterator(path)) consider(entry);
      } else {
        for (const auto& entry : fs::directory_iterator(path)) consider(entry);
      }
      std::sort(found.begin(), found.end());
      for (const auto& p : found) files.push_back(p.generic_string());
    } else if (fs::is_regular_file(path, ec)) {
      files.push_back(path);
    } else {
      throw IoError("no such file or directory: " + path);
    }
  }
  return files;
}

int cmd_validate(const std::vector<std::string>& paths, const std::string& profile_name,
                 bool recursive, bool json, bool quiet, int jobs, const Palette& palette) {
  ValidationProfile profile =
      profile_name == "gold" ? ValidationProfile::GOLD : ValidationProfile::STRUCTURAL;
  std::vector<std::string> files = expand_paths(paths, recursive);

  std::vector<std::vector<ValidationIssue>> per_file(files.size());
  std::vector<std::string> io_failures(files.size());
  detail::parallel_for(files.size(), jobs, [&](std::size_t i) {
    const std::string& file = files[i];
    std::string fallback_id = fs::path(file).filename().string();
    try {
      per_file[i] = validate_document(parse_document(read_file(file)), profile);
    } catch (const ParseError& e) {
      per_file[i].push_back({Severity::ERROR, e.code, e.what(), {fallback_id, ""}});
    } catch (const ModelError& e) {
      IssueLocation loc = e.location;
      if (loc.doc_id.empty()) loc.doc_id = fallback_id;
      per_file[i].push_back({Severity::ERROR, e.code, e.what(), loc});
    } catch (const IoError& e) {
      io_failures[i] = e.what();
    }
  });

  std::vector<ValidationIssue> issues;
  for (auto& list : per_file)
    issues.insert(issues.end(), list.begin(), list.end());

  std::size_t errors = 0, warnings = 0;
  for (const auto& issue : issues)
    (issue.severity == Severity::ERROR ? errors : warnings) += 1;

  if (json)
    std::cout << issues_to_json(issues).dump(2) << "\n";
  else
    std::cout << render_issues(issues, palette);
  if (!quiet)
    std::cerr << "checked " << files.size() << " file(s): " << errors << " error(s), " << warnings
              << " warning(s)\n";

  for (const auto& failure : io_failures) {
    if (!failure.empty()) {
      std::cerr << failure << "\n";
      return 3;
    }
  }
  return errors ? 1 : 0;
}

CorpusLoad load_or_die(const std::string& dir, int jobs, bool quiet) {
  CorpusLoad load = load_corpus(dir, jobs);
  if (!load.failures.empty()) {
    for (const auto& f : load.failures) std::cerr << f.path << ": " << f.message << "\n";
    throw IoError(std::to_string(load.failures.size()) + " file(s) under " + dir +
                  " failed to parse");
  }
  if (load.documents.empty() && !quiet)
    std::cerr << "warning: EMPTY_CORPUS no .tml documents under " << dir << "\n";
  return load;
}

int cmd_score(const std::string& ref_dir, const std::string& resp_dir, const std::string& task,
              const std::string& mode, bool all_attributes, bool no_reduce, bool json, bool quiet,
              int jobs, const Palette& palette) {
  ScoreOptions options;
  options.task = task == "A" ? TaskSelection::A
                 : task == "B" ? TaskSelection::B
                 : task == "C" ? TaskSelection::C
                                : TaskSelection::ALL;
  options.mode = mode == "strict" ? MatchMode::STRICT : MatchMode::RELAXED;
  options.all_attributes = all_attributes;
  options.reduce = !no_reduce;
  options.jobs = jobs;

  CorpusLoad ref = load_or_die(ref_dir, jobs, quiet);
  CorpusLoad resp = load_or_die(resp_dir, jobs, quiet);
  ScoreReport report = score_corpus(ref.documents, resp.documents, options);

  if (json)
    std::cout << score_to_json(report).dump(2) << "\n";
  else
    std::cout << render_score(report, palette);
  if (!quiet)
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_merge(const std::string& config_path, const std::string& out_dir, bool no_repair,
              bool json, int jobs, const Palette& palette) {
  MergeConfig config = MergeConfig::from_json_file(config_path);
  MergeSummary summary = merge_corpus(config, out_dir, !no_repair, jobs);
  if (json)
    std::cout << merge_to_json(summary, out_dir).dump(2) << "\n";
  else
    std::cout << render_merge(summary, out_dir, palette);
  return 0;
}

int cmd_closure(const std::string& file, bool emit, bool reduced, bool json,
                const Palette& palette) {
  AnnotatedDocument doc = parse_document(read_file(file));
  std::vector<std::string> universe = entity_instance_ids(doc);
  std::vector<TemporalLink> links;
  for (const auto& l : doc.links)
    if (l.relation != RelationType::NONE) links.push_back(l);

  CloseResult result = close_links(links, universe);
  if (!emit) {
    if (json) {
      nlohmann::json j{{"consistent", result.consistent()}};
      if (!result.consistent()) j["witness"] = result.inconsistency->witness;
      std::cout << j.dump(2) << "\n";
    } else if (result.consistent()) {
      std::cout << "consistent\n";
    } else {
      std::cout << palette.red("inconsistent") << ": " << result.inconsistency->witness << "\n";
    }
    return result.consistent() ? 0 : 1;
  }

  if (!result.consistent()) {
    std::cerr << "inconsistent: " << result.inconsistency->witness << "\n";
    return 1;
  }
  std::vector<TemporalLink> emitted;
  if (reduced) {
    emitted = reduce(links, universe);
  } else {
    for (std::size_t i = 0; i < universe.size(); ++i) {
      for (std::size_t j = i + 1; j < universe.size(); ++j) {
        if (auto rel = entailed_relation(*result.closed, universe[i], universe[j]))
          emitted.push_back({"", universe[i], universe[j], *rel, {}});
      }
    }
  }
  std::map<std::string, std::size_t> ordinal;
  for (std::size_t i = 0; i < universe.size(); ++i) ordinal[universe[i]] = i;
  std::sort(emitted.begin(), emitted.end(), [&](const TemporalLink& a, const TemporalLink& b) {
    return std::tie(ordinal[a.source], ordinal[a.target], a.relation) <
           std::tie(ordinal[b.source], ordinal[b.target], b.relation);
  });
  AnnotatedDocument out = doc;
  out.links.clear();
  int lid = 1;
  for (auto& l : emitted)
    out.links.push_back({"l" + std::to_string(lid++), l.source, l.target, l.relation, {}});
  std::cout << serialize_document(out);
  return 0;
}

int cmd_stats(const std::vector<std::string>& dirs, bool recursive, bool json, bool quiet,
              int jobs, const Palette& palette) {
  std::vector<CorpusStats> all;
  for (const auto& dir : dirs) {
    CorpusLoad load = load_corpus(dir, jobs, recursive);
    if (!quiet) {
      for (const auto& f : load.failures)
        std::cerr << "warning: " << f.path << ": " << f.message << "\n";
      if (load.documents.empty() && load.failures.empty())
        std::cerr << "warning: EMPTY_CORPUS no .tml documents under " << dir << "\n";
    }
    all.push_back(corpus_stats(load, dir));
  }
  if (json)
    std::cout << stats_to_json(all).dump(2) << "\n";
  else
    std::cout << render_stats(all, palette);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TimeML datafile toolkit: validation, scoring, closure, ensemble merging"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the verb
  bool json = false, quiet = false;
  int jobs = 0;
  app.add_flag("--json", json, "emit JSON instead of text reports");
  app.add_option("--jobs", jobs, "worker threads (default: number of processors)");
  app.add_flag("--quiet", quiet, "suppress warnings on stderr");

  auto* validate = app.add_subcommand("validate", "check datafiles against the format rules");
  std::vector<std::string> validate_paths;
  std::string profile = "structural";
  bool validate_recursive = false;
  validate->add_option("paths", validate_paths, "files or directories")->required();
  validate->add_option("--profile", profile, "structural or gold")
      ->check(CLI::IsMember({"structural", "gold"}));
  validate->add_flag("--recursive", validate_recursive, "descend into subdirectories");

  auto* score = app.add_subcommand("score", "score a response corpus against a reference");
  std::string ref_dir, resp_dir, task = "all", mode = "relaxed";
  bool all_attributes = false, no_reduce = false;
  score->add_option("--reference", ref_dir, "reference corpus directory")->required();
  score->add_option("--response", resp_dir, "response corpus directory")->required();
  score->add_option("--task", task, "A, B, C or all")->check(CLI::IsMember({"A", "B", "C", "all"}));
  score->add_option("--mode", mode, "extent matching: strict or relaxed")
      ->check(CLI::IsMember({"strict", "relaxed"}));
  score->add_flag("--all-attributes", all_attributes, "also score tense/aspect/polarity/modality/pos");
  score->add_flag("--no-reduce", no_reduce, "score raw link sets instead of reduced ones");

  auto* merge = app.add_subcommand("merge", "combine system corpora into a silver standard");
  std::string merge_config, merge_out;
  bool no_repair = false;
  merge->add_option("--config", merge_config, "merge configuration (JSON)")->required();
  merge->add_option("--out", merge_out, "output directory")->required();
  merge->add_flag("--no-repair", no_repair, "keep inconsistent merged link sets");

  auto* closure = app.add_subcommand("closure", "reason over a document's temporal links");
  std::string closure_file;
  bool emit = false, check = false, reduced = false;
  closure->add_option("file", closure_file, "datafile")->required();
  closure->add_flag("--check", check, "report consistency (default)");
  closure->add_flag("--emit", emit, "print the document with derived links");
  closure->add_flag("--reduced", reduced, "emit the non-redundant core instead of the closure");

  auto* stats = app.add_subcommand("stats", "token/entity/link counts per corpus directory");
  std::vector<std::string> stats_dirs;
  bool stats_recursive = false;
  stats->add_option("dirs", stats_dirs, "corpus directories")->required();
  stats->add_flag("--recursive", stats_recursive, "descend into subdirectories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (check && emit) {
    std::cerr << "closure: --check and --emit are mutually exclusive\n";
    return 2;
  }

  const Palette palette = make_palette();
  try {
    if (validate->parsed())
      return cmd_validate(validate_paths, profile, validate_recursive, json, quiet, jobs, palette);
    if (score->parsed())
      return cmd_score(ref_dir, resp_dir, task, mode, all_attributes, no_reduce, json, quiet,
                       jobs, palette);
    if (merge->parsed()) return cmd_merge(merge_config, merge_out, no_repair, json, jobs, palette);
    if (closure->parsed()) return cmd_closure(closure_file, emit, reduced, json, palette);
    if (stats->parsed())
      return cmd_stats(stats_dirs, stats_recursive, json, quiet, jobs, palette);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
