// Acceptance suite: exercises the toolkit's end-to-end guarantees and prints
// one PASS/FAIL line per criterion. Returns the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tempoeval/tempoeval.hpp"

using namespace tempoeval;

namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& rel) {
  return std::string(TEMPOEVAL_FIXTURE_DIR) + "/" + rel;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = fs::temp_directory_path() /
                 ("tempoeval_acc_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++) + ".out");
  std::string cmd =
      std::string(TEMPOEVAL_BIN) + " " + args + " > " + out.string() + " 2> /dev/null";
  int rc = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  result.out = buf.str();
  fs::remove(out);
  return result;
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

AnnotatedDocument chain_doc(const std::string& id, int n_events) {
  AnnotatedDocument d;
  d.doc_id = id;
  d.dct = TimexAnnotation{"t0",           std::nullopt, TimexType::DATE, "2013-01-01",
                          "CREATION_TIME", std::nullopt, "Jan 1",        {}};
  std::string text;
  for (int i = 0; i < n_events; ++i) {
    std::string token(2, static_cast<char>('a' + i));
    Span s{static_cast<std::size_t>(3 * i), static_cast<std::size_t>(3 * i + 2)};
    d.events.push_back(EventAnnotation{"e" + std::to_string(i + 1), "ei" + std::to_string(i + 1),
                                       s, "OCCURRENCE", std::nullopt, std::nullopt, std::nullopt,
                                       std::nullopt, std::nullopt, token, {}});
    text += token + " ";
  }
  d.text = text;
  return d;
}

void add_link(AnnotatedDocument& d, const std::string& src, const std::string& tgt,
              RelationType rel) {
  d.links.push_back(TemporalLink{"l" + std::to_string(d.links.size() + 1), src, tgt, rel, {}});
}

// Identifier-independent digest used by the unanimity criterion.
std::string doc_fingerprint(const AnnotatedDocument& d) {
  struct Ent {
    Span span;
    std::string desc;
  };
  std::vector<Ent> ents;
  for (const auto& t : d.timexes)
    if (t.span)
      ents.push_back({*t.span, "T/" + std::string(to_string(t.type)) + "/" + t.value});
  for (const auto& e : d.events) ents.push_back({e.span, "E/" + e.eclass});
  std::sort(ents.begin(), ents.end(),
            [](const Ent& a, const Ent& b) { return a.span < b.span; });
  auto index_of = [&](const std::string& id) -> long {
    if (id == d.dct.tid) return -1;
    Span s = *resolve_endpoint(d, id).span();
    for (std::size_t i = 0; i < ents.size(); ++i)
      if (ents[i].span == s) return static_cast<long>(i);
    return -2;
  };
  std::vector<std::string> links;
  for (const auto& l : d.links) {
    long a = index_of(l.source), b = index_of(l.target);
    RelationType rel = l.relation;
    if (a > b) {
      std::swap(a, b);
      if (rel != RelationType::NONE) rel = inverse(rel);
    }
    links.push_back(std::to_string(a) + ">" + std::to_string(b) + ":" +
                    std::string(to_string(rel)));
  }
  std::sort(links.begin(), links.end());
  std::ostringstream out;
  out << "DCT/" << to_string(d.dct.type) << "/" << d.dct.value << ";";
  for (const auto& e : ents) out << e.span.start << "-" << e.span.end << e.desc << ";";
  for (const auto& l : links) out << l << ";";
  return out.str();
}

// --------------------------------------------------------------------------

Check criterion_format_fidelity() {
  Check c;
  AnnotatedDocument doc = parse_document(read_file(fixture("sample/XIN_ENG_20061119.0021.tml")));
  c.expect(doc.doc_id == "XIN_ENG_20061119.0021", "doc_id");
  c.expect(doc.dct.type == TimexType::TIME && doc.dct.value == "2006-11-19", "DCT timex");
  c.expect(doc.timexes.empty(), "exactly one timex, the DCT");
  c.expect(doc.events.size() == 2, "two events");
  if (doc.events.size() == 2) {
    const auto& e1 = doc.events[0];
    c.expect(e1.eid == "e1" && e1.surface == "signed" && e1.eclass == "OCCURRENCE" &&
                 e1.tense == "PAST" && e1.pos == "VERB",
             "event e1 'signed'");
    const auto& e2 = doc.events[1];
    c.expect(e2.eid == "e2" && e2.surface == "agreement" && e2.eclass == "OCCURRENCE" &&
                 e2.tense == "PAST" && e2.pos == "NOUN",
             "event e2 'agreement'");
  }
  c.expect(doc.links.size() == 2, "two links");
  if (doc.links.size() == 2) {
    c.expect(doc.links[0].source == "ei1" && doc.links[0].target == "t0" &&
                 doc.links[0].relation == RelationType::NONE,
             "link l1 ei1->t0 NONE");
    c.expect(doc.links[1].source == "ei2" && doc.links[1].target == "ei1" &&
                 doc.links[1].relation == RelationType::NONE,
             "link l2 ei2->ei1 NONE");
  }
  c.expect(parse_document(serialize_document(doc)) == doc, "round-trip model equality");
  return c;
}

Check criterion_closure_oracle() {
  Check c;
  std::mt19937 rng(20130131);
  std::uniform_int_distribution<int> n_entities(2, 4);
  std::uniform_int_distribution<int> n_links(1, 3);
  std::uniform_int_distribution<int> rel_pick(0, 12);
  const int kCases = 10000;
  long long queries = 0;
  int consistent_cases = 0;

  for (int iter = 0; iter < kCases && c.ok; ++iter) {
    int n = n_entities(rng);
    std::vector<std::string> ents;
    for (int i = 0; i < n; ++i) ents.push_back(std::string(1, static_cast<char>('A' + i)));
    std::uniform_int_distribution<int> ent_pick(0, n - 1);
    std::vector<TemporalLink> links;
    int m = n_links(rng);
    for (int i = 0; i < m; ++i) {
      int a = ent_pick(rng), b = ent_pick(rng);
      if (a == b) continue;
      links.push_back(TemporalLink{"l" + std::to_string(i + 1),
                                   ents[static_cast<std::size_t>(a)],
                                   ents[static_cast<std::size_t>(b)],
                                   static_cast<RelationType>(rel_pick(rng)), {}});
    }

    testoracle::ModelEnumerator oracle(links, ents);
    CloseResult engine = close_links(links, ents);
    c.expect(oracle.consistent() == engine.consistent(),
             "consistency disagreement at case " + std::to_string(iter));
    if (!engine.consistent() || !c.ok) continue;
    ++consistent_cases;
    for (const auto& a : ents) {
      for (const auto& b : ents) {
        if (a == b) continue;
        for (int rel = 0; rel < 13 && c.ok; ++rel) {
          auto rt = static_cast<RelationType>(rel);
          bool engine_says = entails(*engine.closed, TemporalLink{"q", a, b, rt, {}});
          bool oracle_says = oracle.entails(a, b, rt);
          ++queries;
          c.expect(engine_says == oracle_says,
                   "entailment disagreement at case " + std::to_string(iter) + ": " + a + " " +
                       std::string(to_string(rt)) + " " + b);
        }
      }
    }
  }
  if (c.ok)
    c.detail = std::to_string(kCases) + " cases (" + std::to_string(consistent_cases) +
               " consistent), " + std::to_string(queries) + " entailment queries";
  return c;
}

Check criterion_awareness() {
  Check c;
  AnnotatedDocument ref = chain_doc("d", 3);
  add_link(ref, "ei1", "ei2", RelationType::BEFORE);
  add_link(ref, "ei2", "ei3", RelationType::BEFORE);
  add_link(ref, "ei1", "ei3", RelationType::BEFORE);

  AwarenessResult self = temporal_awareness(ref, ref);
  c.expect(self.prf.f1 == 1.0, "(a) self-score F1 must be exactly 1");

  AnnotatedDocument equivalent = chain_doc("d", 3);
  add_link(equivalent, "ei1", "ei2", RelationType::BEFORE);
  add_link(equivalent, "ei2", "ei3", RelationType::BEFORE);
  AwarenessResult eq = temporal_awareness(ref, equivalent);
  c.expect(eq.prf.precision == 1.0 && eq.prf.recall == 1.0 && eq.prf.f1 == 1.0,
           "(b) closure-equivalent response must score exactly 1");

  AnnotatedDocument partial = chain_doc("d", 3);
  add_link(partial, "ei1", "ei3", RelationType::BEFORE);
  AwarenessResult pr = temporal_awareness(ref, partial);
  c.expect(pr.prf.precision == 1.0, "(c) precision must be exactly 1");
  c.expect(pr.prf.recall == 0.0, "(c) recall must be exactly 0");
  return c;
}

Check criterion_scorer_conventions() {
  Check c;
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9; };

  PRF mixed = PRF::from_counts(2, 1, 1);
  c.expect(near(mixed.precision, 2.0 / 3.0) && near(mixed.recall, 2.0 / 3.0) &&
               near(mixed.f1, 2.0 / 3.0),
           "extent counts 2/1/1");
  PRF empty_resp = PRF::from_counts(0, 0, 3);
  c.expect(empty_resp.precision == 0.0 && empty_resp.recall == 0.0, "0/0 convention");
  c.expect(PRF::from_counts(0, 0, 0).f1 == 1.0, "both-empty convention");

  // Attribute rule: 1 equal pair + 1 missed entity -> P 1, R 1/2.
  PRF attr = PRF::from_counts(1, 0, 1);
  c.expect(near(attr.precision, 1.0) && near(attr.recall, 0.5), "attribute counting rule");

  // Kappa: the worked three-pair instance of the formula, and real pairs.
  c.expect(near(kappa_from_rates(1.0 / 3.0, 4.0 / 9.0), -0.2),
           "kappa at observed 1/3, expected 4/9 must be -0.2");
  auto fixture_kappa =
      kappa_from_pairs({{"date", "date"}, {"date", "time"}, {"time", "time"}});
  c.expect(fixture_kappa && near(*fixture_kappa, 0.4),
           "kappa over (DATE,DATE,TIME)/(DATE,TIME,TIME) must be 0.4");
  auto degenerate = kappa_from_pairs({{"date", "date"}, {"date", "date"}});
  c.expect(degenerate && *degenerate == 1.0, "degenerate agreement convention");
  auto perfect = kappa_from_pairs({{"date", "date"}, {"time", "time"}});
  c.expect(perfect && near(*perfect, 1.0), "perfect agreement");
  return c;
}

Check criterion_merge_rules() {
  Check c;
  MergeConfig config = MergeConfig::from_json_file(fixture("merge_config.json"));
  c.expect(config.systems.size() == 3 && config.systems[0].weight == 0.36 &&
               config.systems[1].weight == 0.32 && config.systems[2].weight == 0.32 &&
               config.support_threshold == 2,
           "fixture mirrors the published weights and threshold");

  auto load = [&](std::size_t system, const char* name) {
    return parse_document(read_file(config.systems[system].path + "/" + name));
  };
  AnnotatedDocument tipsem = load(0, "storm.tml");
  AnnotatedDocument tipsemb = load(1, "storm.tml");
  AnnotatedDocument trios = load(2, "storm.tml");
  AnnotatedDocument merged = merge_document({&tipsem, &tipsemb, &trios}, config);

  bool has_dawn = false, has_started = false, has_followed = false;
  for (const auto& t : merged.timexes)
    if (t.surface == "dawn") has_dawn = true;
  for (const auto& e : merged.events) {
    if (e.surface == "started") has_started = true;
    if (e.surface == "followed") has_followed = true;
  }
  c.expect(has_dawn, "(a) best-system-only entity is emitted");
  c.expect(has_started, "(b) two-support non-best entity is emitted");
  c.expect(!has_followed, "(c) one-support non-best entity is dropped");

  AnnotatedDocument p1 = load(0, "picnic.tml");
  AnnotatedDocument p2 = load(1, "picnic.tml");
  AnnotatedDocument p3 = load(2, "picnic.tml");
  AnnotatedDocument unanimous = merge_document({&p1, &p2, &p3}, config);
  c.expect(doc_fingerprint(unanimous) == doc_fingerprint(p1),
           "(d) unanimity reproduces the input modulo renumbering");

  fs::path out = fs::temp_directory_path() / "tempoeval_acc_merge";
  fs::remove_all(out);
  merge_corpus(config, out.string());
  for (const auto& entry : fs::directory_iterator(out)) {
    CliResult check = run_cli("closure " + entry.path().string() + " --check");
    c.expect(check.exit_code == 0,
             "(e) merged document fails closure --check: " + entry.path().string());
  }
  fs::remove_all(out);
  return c;
}

Check criterion_determinism() {
  Check c;
  fs::path base = fs::temp_directory_path() / "tempoeval_acc_det";
  fs::remove_all(base);
  fs::create_directories(base);

  auto twice_stdout = [&](const std::string& args, const std::string& what) {
    CliResult first = run_cli(args);
    CliResult second = run_cli(args);
    c.expect(first.exit_code == second.exit_code && first.out == second.out,
             what + " output differs between runs");
  };
  twice_stdout("score --reference " + fixture("gold") + " --response " +
                   fixture("systems/tipsem"),
               "score");
  twice_stdout("--json score --reference " + fixture("gold") + " --response " +
                   fixture("systems/tipsem"),
               "score --json");
  twice_stdout("closure " + fixture("gold/storm.tml") + " --emit --reduced", "closure --emit");
  twice_stdout("stats " + fixture("gold") + " " + fixture("systems/tipsem"), "stats");
  twice_stdout("--json stats " + fixture("gold"), "stats --json");

  fs::path out1 = base / "m1", out2 = base / "m2";
  CliResult m1 = run_cli("--json merge --config " + fixture("merge_config.json") + " --out " +
                         out1.string());
  CliResult m2 = run_cli("--json merge --config " + fixture("merge_config.json") + " --out " +
                         out2.string());
  c.expect(m1.exit_code == 0 && m2.exit_code == 0, "merge runs succeed");
  // Summaries embed the output path; drop it before comparing.
  nlohmann::json j1 = nlohmann::json::parse(m1.out);
  nlohmann::json j2 = nlohmann::json::parse(m2.out);
  j1.erase("output");
  j2.erase("output");
  c.expect(j1.dump() == j2.dump(), "merge summaries differ");
  for (const auto& entry : fs::directory_iterator(out1)) {
    std::string a = read_file(entry.path().string());
    std::string b = read_file((out2 / entry.path().filename()).string());
    c.expect(a == b, "merged file differs between runs: " + entry.path().filename().string());
  }
  fs::remove_all(base);
  return c;
}

Check criterion_smoke() {
  Check c;
  fs::path out = fs::temp_directory_path() / "tempoeval_acc_smoke";
  fs::remove_all(out);

  CliResult validate = run_cli("validate " + fixture("gold") + " " + fixture("systems/tipsem") +
                               " " + fixture("systems/tipsemb") + " " +
                               fixture("systems/trios") + " --profile structural");
  c.expect(validate.exit_code == 0, "validate exit code");

  CliResult merge = run_cli("merge --config " + fixture("merge_config.json") + " --out " +
                            out.string());
  c.expect(merge.exit_code == 0, "merge exit code");

  CliResult score =
      run_cli("score --reference " + fixture("gold") + " --response " + out.string());
  c.expect(score.exit_code == 0, "score exit code");
  c.expect(score.out.find("awareness") != std::string::npos, "score reports awareness");
  fs::remove_all(out);
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {"format-fidelity", 1.0, criterion_format_fidelity},
      {"closure-vs-oracle", 60.0, criterion_closure_oracle},
      {"awareness-metric", 0.0, criterion_awareness},
      {"scorer-conventions", 0.0, criterion_scorer_conventions},
      {"merge-rules", 0.0, criterion_merge_rules},
      {"determinism", 0.0, criterion_determinism},
      {"pipeline-smoke", 10.0, criterion_smoke},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& criterion = criteria[i];
    auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criterion.run();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.budget_seconds > 0 && seconds > criterion.budget_seconds) {
      check.ok = false;
      check.detail = "exceeded " + std::to_string(criterion.budget_seconds) + "s budget";
    }
    char line[512];
    std::snprintf(line, sizeof(line), "%s  %zu %-18s (%.2fs)%s%s", check.ok ? "PASS" : "FAIL",
                  i + 1, criterion.name, seconds, check.detail.empty() ? "" : ": ",
                  check.detail.c_str());
    std::cout << line << "\n";
    if (!check.ok) ++failed;
  }
  if (failed) std::cout << failed << " criterion(s) failed\n";
  return failed;
}
