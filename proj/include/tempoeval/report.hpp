#pragma once

// Text and JSON rendering of score reports, validation findings, merge
// summaries, and corpus statistics. Text output is column-aligned; JSON keys
// are stable. Both are byte-deterministic for identical inputs.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempoeval/merging.hpp"
#include "tempoeval/scoring.hpp"
#include "tempoeval/stats.hpp"

namespace tempoeval {

struct Palette {
  bool enabled = false;
  std::string bold(const std::string& s) const { return enabled ? "\033[1m" + s + "\033[0m" : s; }
  std::string red(const std::string& s) const { return enabled ? "\033[31m" + s + "\033[0m" : s; }
  std::string yellow(const std::string& s) const {
    return enabled ? "\033[33m" + s + "\033[0m" : s;
  }
};

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation findings: "SEVERITY CODE doc_id[:id] message".

inline std::string render_issues(const std::vector<ValidationIssue>& issues,
                                 const Palette& palette) {
  std::ostringstream out;
  for (const auto& issue : issues) {
    std::string head = std::string(to_string(issue.severity));
    head = issue.severity == Severity::ERROR ? palette.red(head) : palette.yellow(head);
    out << head << " " << issue.code << " " << issue.location.doc_id;
    if (!issue.location.id.empty()) out << ":" << issue.location.id;
    out << " " << issue.message << "\n";
  }
  return out.str();
}

inline nlohmann::json issues_to_json(const std::vector<ValidationIssue>& issues) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& issue : issues) {
    nlohmann::json loc{{"doc_id", issue.location.doc_id}};
    if (!issue.location.id.empty()) loc["id"] = issue.location.id;
    arr.push_back({{"severity", std::string(to_string(issue.severity))},
                   {"code", issue.code},
                   {"message", issue.message},
                   {"location", loc}});
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Score reports.

inline nlohmann::json prf_to_json(const PRF& prf, bool with_counts = true) {
  nlohmann::json j{{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
  if (with_counts) {
    j["tp"] = prf.tp;
    j["fp"] = prf.fp;
    j["fn"] = prf.fn;
  }
  return j;
}

inline nlohmann::json awareness_to_json(const TaskRow& row, const AwarenessCounts& totals) {
  nlohmann::json j{{"precision", row.micro.precision},
                   {"recall", row.micro.recall},
                   {"f1", row.micro.f1},
                   {"verified_response", totals.p_num},
                   {"response_total", totals.p_den},
                   {"verified_reference", totals.r_num},
                   {"reference_total", totals.r_den},
                   {"unverifiable", totals.unverifiable}};
  j["macro"] = {{"precision", row.macro_precision},
                {"recall", row.macro_recall},
                {"f1", row.macro_f1}};
  return j;
}

inline nlohmann::json score_to_json(const ScoreReport& report) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(report.mode));
  j["reduced"] = report.reduced;
  j["documents"] = report.documents;
  nlohmann::json tasks, macro;
  for (const auto& name : report.task_order) {
    const TaskRow& row = report.tasks.at(name);
    tasks[name] = prf_to_json(row.micro);
    macro[name] = {{"precision", row.macro_precision},
                   {"recall", row.macro_recall},
                   {"f1", row.macro_f1}};
  }
  j["tasks"] = tasks;
  j["macro"] = macro;
  nlohmann::json kappa;
  for (const auto& [name, value] : report.kappas)
    kappa[name] = value ? nlohmann::json(*value) : nlohmann::json();
  j["kappa"] = kappa;
  j["awareness"] = report.awareness
                       ? awareness_to_json(*report.awareness, report.awareness_totals)
                       : nlohmann::json();
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : report.per_document) {
    nlohmann::json dj;
    dj["doc_id"] = d.doc_id;
    if (d.missing_response) dj["missing_response"] = true;
    nlohmann::json dt;
    for (const auto& [name, prf] : d.tasks) dt[name] = prf_to_json(prf);
    dj["tasks"] = dt;
    if (d.awareness) {
      dj["awareness"] = prf_to_json(d.awareness->prf, false);
      if (d.awareness->counts.response_inconsistent) dj["response_inconsistent"] = true;
    }
    docs.push_back(dj);
  }
  j["per_document"] = docs;
  j["warnings"] = report.warnings;
  j["inconsistent_response_docs"] = report.inconsistent_response_docs;
  return j;
}

inline std::string render_score(const ScoreReport& report, const Palette& palette) {
  using detail::fixed4;
  using detail::pad;
  std::ostringstream out;
  out << palette.bold("scores") << "  (mode: " << to_string(report.mode)
      << ", documents: " << report.documents
      << (report.awareness ? std::string(", awareness: ") + (report.reduced ? "reduced" : "raw")
                           : "")
      << ")\n\n";

  std::size_t name_width = 12;
  for (const auto& name : report.task_order) name_width = std::max(name_width, name.size() + 2);
  out << pad("task", name_width) << pad("P", 8) << pad("R", 8) << pad("F1", 8) << pad("tp", 7)
      << pad("fp", 7) << pad("fn", 7) << pad("macroP", 8) << pad("macroR", 8) << "macroF1\n";
  for (const auto& name : report.task_order) {
    const TaskRow& row = report.tasks.at(name);
    out << pad(name, name_width) << pad(fixed4(row.micro.precision), 8)
        << pad(fixed4(row.micro.recall), 8) << pad(fixed4(row.micro.f1), 8)
        << pad(std::to_string(row.micro.tp), 7) << pad(std::to_string(row.micro.fp), 7)
        << pad(std::to_string(row.micro.fn), 7) << pad(fixed4(row.macro_precision), 8)
        << pad(fixed4(row.macro_recall), 8) << fixed4(row.macro_f1) << "\n";
  }

  if (!report.kappas.empty()) {
    out << "\n" << palette.bold("kappa") << "\n";
    for (const auto& [name, value] : report.kappas)
      out << pad(name, name_width) << (value ? fixed4(*value) : "n/a") << "\n";
  }

  if (report.awareness) {
    const TaskRow& aw = *report.awareness;
    const AwarenessCounts& t = report.awareness_totals;
    out << "\n" << palette.bold("temporal awareness") << "\n";
    out << pad("awareness", name_width) << pad(fixed4(aw.micro.precision), 8)
        << pad(fixed4(aw.micro.recall), 8) << pad(fixed4(aw.micro.f1), 8) << "verified "
        << t.p_num << "/" << t.p_den << " response, " << t.r_num << "/" << t.r_den
        << " reference";
    if (t.unverifiable) out << ", " << t.unverifiable << " unverifiable";
    out << "\n";
    out << pad("  macro", name_width) << pad(fixed4(aw.macro_precision), 8)
        << pad(fixed4(aw.macro_recall), 8) << fixed4(aw.macro_f1) << "\n";
  }

  if (!report.inconsistent_response_docs.empty()) {
    out << "\n" << palette.red("inconsistent responses:");
    for (const auto& id : report.inconsistent_response_docs) out << " " << id;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Merge summaries.

inline nlohmann::json merge_stats_to_json(const DocMergeStats& s) {
  return {{"entities_kept", s.entities_kept},
          {"entities_dropped", s.entities_dropped},
          {"links_kept", s.links_kept},
          {"links_dropped", s.links_dropped},
          {"links_conflicted", s.links_conflicted},
          {"repair_dropped", s.repair_dropped},
          {"consistent", s.consistent}};
}

inline nlohmann::json merge_to_json(const MergeSummary& summary, const std::string& out_dir) {
  nlohmann::json j;
  j["output"] = out_dir;
  j["documents"] = summary.documents;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& [id, stats] : summary.per_document) {
    nlohmann::json d = merge_stats_to_json(stats);
    d["doc_id"] = id;
    per.push_back(d);
  }
  j["per_document"] = per;
  j["totals"] = merge_stats_to_json(summary.totals);
  return j;
}

inline std::string render_merge(const MergeSummary& summary, const std::string& out_dir,
                                const Palette& palette) {
  using detail::pad;
  std::ostringstream out;
  out << palette.bold("merged " + std::to_string(summary.documents) + " documents") << " -> "
      << out_dir << "\n\n";
  std::size_t id_width = 10;
  for (const auto& [id, stats] : summary.per_document) id_width = std::max(id_width, id.size() + 2);
  out << pad("doc_id", id_width) << pad("entities", 10) << pad("dropped", 9) << pad("links", 7)
      << pad("dropped", 9) << pad("conflicts", 11) << pad("repaired", 10) << "consistent\n";
  auto row = [&](const std::string& id, const DocMergeStats& s) {
    out << pad(id, id_width) << pad(std::to_string(s.entities_kept), 10)
        << pad(std::to_string(s.entities_dropped), 9) << pad(std::to_string(s.links_kept), 7)
        << pad(std::to_string(s.links_dropped), 9) << pad(std::to_string(s.links_conflicted), 11)
        << pad(std::to_string(s.repair_dropped), 10) << (s.consistent ? "yes" : palette.red("NO"))
        << "\n";
  };
  for (const auto& [id, stats] : summary.per_document) row(id, stats);
  row("total", summary.totals);
  return out.str();
}

// ---------------------------------------------------------------------------
// Corpus statistics.

inline nlohmann::json stats_to_json(const std::vector<CorpusStats>& all) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : all) {
    nlohmann::json j{{"directory", s.directory}, {"documents", s.documents},
                     {"tokens", s.tokens},      {"events", s.events},
                     {"timexes", s.timexes},    {"dcts", s.dcts},
                     {"links", s.links},        {"failures", s.failures}};
    j["relations"] = s.relations;
    arr.push_back(j);
  }
  return arr;
}

inline std::string render_stats(const std::vector<CorpusStats>& all, const Palette& palette) {
  using detail::pad;
  std::ostringstream out;
  std::size_t dir_width = 11;
  for (const auto& s : all) dir_width = std::max(dir_width, s.directory.size() + 2);
  out << palette.bold(pad("directory", dir_width) + pad("docs", 7) + pad("tokens", 9) +
                      pad("events", 8) + pad("timexes", 9) + pad("dcts", 6) + pad("links", 7) +
                      "failures")
      << "\n";
  for (const auto& s : all) {
    out << pad(s.directory, dir_width) << pad(std::to_string(s.documents), 7)
        << pad(std::to_string(s.tokens), 9) << pad(std::to_string(s.events), 8)
        << pad(std::to_string(s.timexes), 9) << pad(std::to_string(s.dcts), 6)
        << pad(std::to_string(s.links), 7) << s.failures << "\n";
    if (!s.relations.empty()) {
      out << "  relations:";
      for (const auto& [name, count] : s.relations) out << " " << name << "=" << count;
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace tempoeval
