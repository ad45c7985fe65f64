#pragma once

// Scoring: extent and attribute precision/recall/F1 with Cohen's kappa over
// aligned entities, the closure-based temporal awareness measure, and corpus
// aggregation (micro pooling of counts plus per-document macro averages).
//
// Conventions (applied throughout, chosen for reproducibility):
//   - 0/0 precision or recall is 0, except that a comparison where both
//     reference and response are empty scores 1.
//   - Attribute values compare case-insensitively; a pair where both sides
//     lack the attribute is skipped.
//   - The DCT never enters extent/attribute scoring (it is given, not
//     extracted); it does align for link rewriting in the awareness measure.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tempoeval/closure.hpp"
#include "tempoeval/core.hpp"
#include "tempoeval/parallel.hpp"
#include "tempoeval/timeml.hpp"

namespace tempoeval {

// ---------------------------------------------------------------------------
// Entity views and alignment.

enum class MatchMode { STRICT, RELAXED };

inline std::string_view to_string(MatchMode m) {
  return m == MatchMode::STRICT ? "strict" : "relaxed";
}

// Uniform view over timexes and events; `id` is the instance identifier links
// use (tid or eiid).
struct EntityView {
  std::string id;
  std::optional<Span> span;
  bool is_dct = false;
  const TimexAnnotation* timex = nullptr;
  const EventAnnotation* event = nullptr;
};

inline std::vector<EntityView> timex_views(const AnnotatedDocument& doc, bool include_dct) {
  std::vector<EntityView> out;
  if (include_dct) out.push_back({doc.dct.tid, doc.dct.span, true, &doc.dct, nullptr});
  for (const auto& t : doc.timexes) out.push_back({t.tid, t.span, false, &t, nullptr});
  return out;
}

inline std::vector<EntityView> event_views(const AnnotatedDocument& doc) {
  std::vector<EntityView> out;
  for (const auto& e : doc.events) out.push_back({e.eiid, e.span, false, nullptr, &e});
  return out;
}

// One-to-one greedy alignment between same-kind entity sets. Candidates are
// taken in order of (overlap length desc, ref start asc, resp start asc);
// STRICT demands identical spans, RELAXED any overlap. DCTs, which carry no
// span, match each other unconditionally.
struct Alignment {
  MatchMode mode = MatchMode::STRICT;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (ref index, resp index)
  std::vector<std::size_t> unmatched_ref;
  std::vector<std::size_t> unmatched_resp;
};

inline Alignment align_entities(const std::vector<EntityView>& ref,
                                const std::vector<EntityView>& resp, MatchMode mode) {
  Alignment out;
  out.mode = mode;
  std::vector<bool> ref_used(ref.size(), false), resp_used(resp.size(), false);

  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (!ref[i].is_dct) continue;
    for (std::size_t j = 0; j < resp.size(); ++j) {
      if (resp[j].is_dct && !resp_used[j]) {
        out.pairs.emplace_back(i, j);
        ref_used[i] = resp_used[j] = true;
        break;
      }
    }
  }

  struct Candidate {
    std::size_t overlap;
    std::size_t ref_start, resp_start;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (!ref[i].span) continue;
    for (std::size_t j = 0; j < resp.size(); ++j) {
      if (!resp[j].span) continue;
      if (mode == MatchMode::STRICT && !(*ref[i].span == *resp[j].span)) continue;
      std::size_t overlap = ref[i].span->overlap_length(*resp[j].span);
      if (overlap == 0) continue;
      candidates.push_back({overlap, ref[i].span->start, resp[j].span->start, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return std::tie(a.ref_start, a.resp_start, a.i, a.j) <
           std::tie(b.ref_start, b.resp_start, b.i, b.j);
  });
  for (const Candidate& c : candidates) {
    if (ref_used[c.i] || resp_used[c.j]) continue;
    ref_used[c.i] = resp_used[c.j] = true;
    out.pairs.emplace_back(c.i, c.j);
  }

  for (std::size_t i = 0; i < ref.size(); ++i)
    if (!ref_used[i]) out.unmatched_ref.push_back(i);
  for (std::size_t j = 0; j < resp.size(); ++j)
    if (!resp_used[j]) out.unmatched_resp.push_back(j);
  return out;
}

// ---------------------------------------------------------------------------
// Precision / recall / F1.

struct PRF {
  double precision = 0, recall = 0, f1 = 0;
  long long tp = 0, fp = 0, fn = 0;

  static PRF from_counts(long long tp, long long fp, long long fn) {
    PRF r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    if (tp + fp == 0 && tp + fn == 0) {
      r.precision = r.recall = r.f1 = 1.0;  // nothing asked, nothing missed
      return r;
    }
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall)
                                      : 0.0;
    return r;
  }

  static PRF from_ratios(long long p_num, long long p_den, long long r_num, long long r_den) {
    PRF r;
    if (p_den == 0 && r_den == 0) {
      r.precision = r.recall = r.f1 = 1.0;
      return r;
    }
    r.precision = p_den > 0 ? static_cast<double>(p_num) / static_cast<double>(p_den) : 0.0;
    r.recall = r_den > 0 ? static_cast<double>(r_num) / static_cast<double>(r_den) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall)
                                      : 0.0;
    return r;
  }
};

inline PRF extent_prf(const Alignment& alignment) {
  return PRF::from_counts(static_cast<long long>(alignment.pairs.size()),
                          static_cast<long long>(alignment.unmatched_resp.size()),
                          static_cast<long long>(alignment.unmatched_ref.size()));
}

// ---------------------------------------------------------------------------
// Attributes.

enum class EntityAttribute {
  TIMEX_TYPE,
  TIMEX_VALUE,
  EVENT_CLASS,
  EVENT_TENSE,
  EVENT_ASPECT,
  EVENT_POLARITY,
  EVENT_MODALITY,
  EVENT_POS,
};

inline std::string_view attribute_name(EntityAttribute a) {
  switch (a) {
    case EntityAttribute::TIMEX_TYPE: return "timex_type";
    case EntityAttribute::TIMEX_VALUE: return "timex_value";
    case EntityAttribute::EVENT_CLASS: return "event_class";
    case EntityAttribute::EVENT_TENSE: return "event_tense";
    case EntityAttribute::EVENT_ASPECT: return "event_aspect";
    case EntityAttribute::EVENT_POLARITY: return "event_polarity";
    case EntityAttribute::EVENT_MODALITY: return "event_modality";
    case EntityAttribute::EVENT_POS: return "event_pos";
  }
  return "";
}

inline std::optional<std::string> attribute_value(const EntityView& v, EntityAttribute a) {
  switch (a) {
    case EntityAttribute::TIMEX_TYPE:
      return v.timex ? std::optional<std::string>(std::string(to_string(v.timex->type)))
                     : std::nullopt;
    case EntityAttribute::TIMEX_VALUE:
      return v.timex ? std::optional<std::string>(v.timex->value) : std::nullopt;
    case EntityAttribute::EVENT_CLASS:
      return v.event ? std::optional<std::string>(v.event->eclass) : std::nullopt;
    case EntityAttribute::EVENT_TENSE: return v.event ? v.event->tense : std::nullopt;
    case EntityAttribute::EVENT_ASPECT: return v.event ? v.event->aspect : std::nullopt;
    case EntityAttribute::EVENT_POLARITY: return v.event ? v.event->polarity : std::nullopt;
    case EntityAttribute::EVENT_MODALITY: return v.event ? v.event->modality : std::nullopt;
    case EntityAttribute::EVENT_POS: return v.event ? v.event->pos : std::nullopt;
  }
  return std::nullopt;
}

// Attribute score over the alignment: a matched pair with equal values
// (case-insensitive) is a tp; a differing pair counts as both fp and fn;
// extent misses stay fn and spurious entities fp, so attribute F1 never
// exceeds extent F1. Pairs lacking the attribute on both sides are skipped.
inline PRF attribute_prf(const Alignment& alignment, const std::vector<EntityView>& ref,
                         const std::vector<EntityView>& resp, EntityAttribute attribute) {
  long long tp = 0, diff = 0;
  for (const auto& [i, j] : alignment.pairs) {
    auto rv = attribute_value(ref[i], attribute);
    auto sv = attribute_value(resp[j], attribute);
    if (!rv && !sv) continue;
    if (rv && sv && iequals(*rv, *sv)) ++tp;
    else ++diff;
  }
  return PRF::from_counts(tp, diff + static_cast<long long>(alignment.unmatched_resp.size()),
                          diff + static_cast<long long>(alignment.unmatched_ref.size()));
}

// Kappa core: chance-corrected agreement from the observed and expected
// agreement rates. The degenerate case p_e = 1 is 1 for perfect observed
// agreement and 0 otherwise.
inline double kappa_from_rates(double p_o, double p_e) {
  if (std::abs(1.0 - p_e) < 1e-12) return p_o >= 1.0 - 1e-12 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

inline std::string lowercased(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Cohen's kappa over a list of (reference label, response label) pairs, with
// p_e from the per-side marginal label distributions. Undefined (absent) when
// there are no pairs.
inline std::optional<double> kappa_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) return std::nullopt;
  const double n = static_cast<double>(pairs.size());
  std::map<std::string, double> ref_marginal, resp_marginal;
  double agree = 0;
  for (const auto& [r, s] : pairs) {
    ref_marginal[r] += 1;
    resp_marginal[s] += 1;
    if (r == s) agree += 1;
  }
  double p_o = agree / n;
  double p_e = 0;
  for (const auto& [label, count] : ref_marginal) {
    auto it = resp_marginal.find(label);
    if (it != resp_marginal.end()) p_e += (count / n) * (it->second / n);
  }
  return kappa_from_rates(p_o, p_e);
}

// Label pairs of an attribute over the matched pairs of an alignment; used
// both for per-document kappa and for corpus-level pooling. A one-sided
// missing attribute becomes the empty label; both-sides-missing is skipped.
inline std::vector<std::pair<std::string, std::string>> attribute_label_pairs(
    const Alignment& alignment, const std::vector<EntityView>& ref,
    const std::vector<EntityView>& resp, EntityAttribute attribute) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [i, j] : alignment.pairs) {
    auto rv = attribute_value(ref[i], attribute);
    auto sv = attribute_value(resp[j], attribute);
    if (!rv && !sv) continue;
    out.emplace_back(rv ? lowercased(*rv) : "", sv ? lowercased(*sv) : "");
  }
  return out;
}

inline std::optional<double> attribute_kappa(const Alignment& alignment,
                                             const std::vector<EntityView>& ref,
                                             const std::vector<EntityView>& resp,
                                             EntityAttribute attribute) {
  return kappa_from_pairs(attribute_label_pairs(alignment, ref, resp, attribute));
}

// ---------------------------------------------------------------------------
// Temporal awareness.

struct AwarenessCounts {
  long long p_num = 0, p_den = 0;  // verified / total response links
  long long r_num = 0, r_den = 0;  // verified / total reference links
  long long unverifiable = 0;      // response links with an unalignable endpoint
  bool response_inconsistent = false;

  void operator+=(const AwarenessCounts& o) {
    p_num += o.p_num;
    p_den += o.p_den;
    r_num += o.r_num;
    r_den += o.r_den;
    unverifiable += o.unverifiable;
    response_inconsistent = response_inconsistent || o.response_inconsistent;
  }
};

struct AwarenessResult {
  AwarenessCounts counts;
  PRF prf;
};

namespace detail {

inline std::vector<TemporalLink> non_none_links(const std::vector<TemporalLink>& links) {
  std::vector<TemporalLink> out;
  for (const auto& l : links)
    if (l.relation != RelationType::NONE) out.push_back(l);
  return out;
}

}  // namespace detail

// Closure-verified relation score for one document pair. Response entities
// are aligned onto reference entities (RELAXED overlap); response links are
// rewritten onto reference identifiers and reduced to a non-redundant core,
// then each side's core is verified against the closure of the other side.
// Relations that are equivalent to the reference but stated differently are
// thereby rewarded. Links whose endpoints cannot be aligned stay in the
// precision denominator as unverifiable; an inconsistent (rewritten) response
// scores zero and is flagged. An inconsistent reference is an error.
inline AwarenessResult temporal_awareness(const AnnotatedDocument& ref,
                                          const AnnotatedDocument& resp,
                                          bool reduce_links = true) {
  const std::vector<std::string> universe = entity_instance_ids(ref);
  const std::vector<TemporalLink> ref_links = detail::non_none_links(ref.links);
  CloseResult ref_closed = close_links(ref_links, universe);
  if (!ref_closed.consistent())
    throw DataError("reference document " + ref.doc_id +
                    " carries inconsistent links: " + ref_closed.inconsistency->witness);

  auto ref_tx = timex_views(ref, true);
  auto resp_tx = timex_views(resp, true);
  auto ref_ev = event_views(ref);
  auto resp_ev = event_views(resp);
  Alignment tx = align_entities(ref_tx, resp_tx, MatchMode::RELAXED);
  Alignment ev = align_entities(ref_ev, resp_ev, MatchMode::RELAXED);
  std::unordered_map<std::string, std::string> to_ref;
  for (const auto& [i, j] : tx.pairs) to_ref.emplace(resp_tx[j].id, ref_tx[i].id);
  for (const auto& [i, j] : ev.pairs) to_ref.emplace(resp_ev[j].id, ref_ev[i].id);

  AwarenessCounts c;
  std::vector<TemporalLink> rewritten;
  for (const auto& l : resp.links) {
    if (l.relation == RelationType::NONE) continue;
    auto s = to_ref.find(l.source);
    auto t = to_ref.find(l.target);
    if (s == to_ref.end() || t == to_ref.end()) {
      ++c.unverifiable;
      continue;
    }
    rewritten.push_back({l.lid, s->second, t->second, l.relation, {}});
  }

  const std::vector<TemporalLink> ref_base =
      reduce_links ? reduce(ref_links, universe) : ref_links;
  c.r_den = static_cast<long long>(ref_base.size());

  CloseResult resp_closed = close_links(rewritten, universe);
  if (!resp_closed.consistent()) {
    c.response_inconsistent = true;
    c.p_den = static_cast<long long>(rewritten.size()) + c.unverifiable;
    return {c, PRF::from_ratios(0, c.p_den, 0, c.r_den)};
  }

  const std::vector<TemporalLink> resp_base =
      reduce_links ? reduce(rewritten, universe) : rewritten;
  c.p_den = static_cast<long long>(resp_base.size()) + c.unverifiable;
  for (const auto& l : resp_base)
    if (entails(*ref_closed.closed, l)) ++c.p_num;
  for (const auto& l : ref_base)
    if (entails(*resp_closed.closed, l)) ++c.r_num;
  return {c, PRF::from_ratios(c.p_num, c.p_den, c.r_num, c.r_den)};
}

// ---------------------------------------------------------------------------
// Corpus scoring.

enum class TaskSelection { A, B, C, ALL };

struct ScoreOptions {
  TaskSelection task = TaskSelection::ALL;
  MatchMode mode = MatchMode::RELAXED;  // extent/attribute alignment
  bool all_attributes = false;
  bool reduce = true;  // awareness over reduced link sets
  int jobs = 0;
};

struct TaskRow {
  PRF micro;
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
};

struct DocumentScores {
  std::string doc_id;
  bool missing_response = false;
  std::vector<std::pair<std::string, PRF>> tasks;  // task name -> per-doc PRF
  std::optional<AwarenessResult> awareness;
};

struct ScoreReport {
  MatchMode mode = MatchMode::RELAXED;
  bool reduced = true;
  bool all_attributes = false;
  std::size_t documents = 0;
  std::vector<std::string> task_order;
  std::map<std::string, TaskRow> tasks;
  std::vector<std::pair<std::string, std::optional<double>>> kappas;
  std::optional<TaskRow> awareness;  // absent unless both corpora carry links
  AwarenessCounts awareness_totals;
  std::vector<DocumentScores> per_document;  // doc_id order
  std::vector<std::string> warnings;
  std::vector<std::string> inconsistent_response_docs;
};

namespace detail {

struct DocTaskCounts {
  long long tp = 0, fp = 0, fn = 0;
};

struct PairedDoc {
  std::string doc_id;
  const AnnotatedDocument* ref = nullptr;
  const AnnotatedDocument* resp = nullptr;  // null when the response is missing
};

inline std::vector<PairedDoc> pair_documents(const std::vector<LoadedDocument>& ref,
                                             const std::vector<LoadedDocument>& resp,
                                             std::vector<std::string>& warnings) {
  if (ref.empty()) throw DataError("empty reference corpus");
  auto index_by_id = [](const std::vector<LoadedDocument>& docs, const char* side) {
    std::unordered_map<std::string, std::size_t> map;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!map.emplace(docs[i].doc.doc_id, i).second)
        throw DataError(std::string(side) + " corpus repeats doc_id '" + docs[i].doc.doc_id + "'");
    }
    return map;
  };
  auto ref_ids = index_by_id(ref, "reference");
  auto resp_ids = index_by_id(resp, "response");

  // First pass pairs by doc_id; only then may leftover documents fall back to
  // filename matching, so an id match can never be stolen by a name match.
  std::vector<bool> resp_used(resp.size(), false);
  std::vector<PairedDoc> out;
  for (const auto& r : ref) {
    PairedDoc p;
    p.doc_id = r.doc.doc_id;
    p.ref = &r.doc;
    auto it = resp_ids.find(r.doc.doc_id);
    if (it != resp_ids.end()) {
      p.resp = &resp[it->second].doc;
      resp_used[it->second] = true;
    }
    out.push_back(p);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].resp) continue;
    for (std::size_t j = 0; j < resp.size(); ++j) {
      if (!resp_used[j] && resp[j].filename == ref[i].filename) {
        out[i].resp = &resp[j].doc;
        resp_used[j] = true;
        break;
      }
    }
    if (!out[i].resp)
      warnings.push_back("no response for reference document " + out[i].doc_id +
                         "; counted as fully missed");
  }
  for (std::size_t j = 0; j < resp.size(); ++j) {
    if (!resp_used[j])
      throw DataError("response document " + resp[j].doc.doc_id + " (" + resp[j].filename +
                      ") has no reference counterpart");
  }
  std::sort(out.begin(), out.end(),
            [](const PairedDoc& a, const PairedDoc& b) { return a.doc_id < b.doc_id; });
  return out;
}

}  // namespace detail

// Scores a response corpus against a reference corpus. Documents are paired
// by doc_id with filename as a fallback; a response without a reference
// counterpart is an error, a reference without a response counts as fully
// missed. Task C is skipped (report field absent) unless both corpora carry
// non-NONE links; requesting task C alone without them is a ConfigError.
inline ScoreReport score_corpus(const std::vector<LoadedDocument>& ref,
                                const std::vector<LoadedDocument>& resp,
                                const ScoreOptions& options) {
  ScoreReport report;
  report.mode = options.mode;
  report.reduced = options.reduce;
  report.all_attributes = options.all_attributes;

  auto pairs = detail::pair_documents(ref, resp, report.warnings);
  report.documents = pairs.size();

  const bool want_a = options.task == TaskSelection::A || options.task == TaskSelection::ALL;
  const bool want_b = options.task == TaskSelection::B || options.task == TaskSelection::ALL;
  bool want_c = options.task == TaskSelection::C || options.task == TaskSelection::ALL;

  auto has_links = [](const std::vector<LoadedDocument>& docs) {
    for (const auto& d : docs)
      for (const auto& l : d.doc.links)
        if (l.relation != RelationType::NONE) return true;
    return false;
  };
  if (want_c && (!has_links(ref) || !has_links(resp))) {
    if (options.task == TaskSelection::C)
      throw ConfigError(
          "task C needs temporal relations on both corpora; at least one carries none");
    want_c = false;
  }

  std::vector<EntityAttribute> timex_attrs{EntityAttribute::TIMEX_TYPE,
                                           EntityAttribute::TIMEX_VALUE};
  std::vector<EntityAttribute> event_attrs{EntityAttribute::EVENT_CLASS};
  if (options.all_attributes) {
    event_attrs.push_back(EntityAttribute::EVENT_TENSE);
    event_attrs.push_back(EntityAttribute::EVENT_ASPECT);
    event_attrs.push_back(EntityAttribute::EVENT_POLARITY);
    event_attrs.push_back(EntityAttribute::EVENT_MODALITY);
    event_attrs.push_back(EntityAttribute::EVENT_POS);
  }
  if (want_a) {
    report.task_order.push_back("timex_extent");
    for (auto a : timex_attrs) report.task_order.push_back(std::string(attribute_name(a)));
  }
  if (want_b) {
    report.task_order.push_back("event_extent");
    for (auto a : event_attrs) report.task_order.push_back(std::string(attribute_name(a)));
  }

  struct DocResult {
    DocumentScores scores;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
        kappa_pairs;  // attribute name -> label pairs
  };
  std::vector<DocResult> results(pairs.size());

  detail::parallel_for(pairs.size(), options.jobs, [&](std::size_t n) {
    const auto& p = pairs[n];
    DocResult& res = results[n];
    res.scores.doc_id = p.doc_id;
    res.scores.missing_response = p.resp == nullptr;

    auto ref_tx = timex_views(*p.ref, false);
    auto ref_ev = event_views(*p.ref);
    std::vector<EntityView> resp_tx, resp_ev;
    if (p.resp) {
      resp_tx = timex_views(*p.resp, false);
      resp_ev = event_views(*p.resp);
    }

    auto score_kind = [&](const std::vector<EntityView>& rv, const std::vector<EntityView>& sv,
                          const std::string& extent_name,
                          const std::vector<EntityAttribute>& attributes) {
      Alignment alignment = align_entities(rv, sv, options.mode);
      res.scores.tasks.emplace_back(extent_name, extent_prf(alignment));
      for (EntityAttribute a : attributes) {
        res.scores.tasks.emplace_back(std::string(attribute_name(a)),
                                      attribute_prf(alignment, rv, sv, a));
        res.kappa_pairs.emplace_back(std::string(attribute_name(a)),
                                     attribute_label_pairs(alignment, rv, sv, a));
      }
    };
    if (want_a) score_kind(ref_tx, resp_tx, "timex_extent", timex_attrs);
    if (want_b) score_kind(ref_ev, resp_ev, "event_extent", event_attrs);

    if (want_c) {
      if (p.resp) {
        res.scores.awareness = temporal_awareness(*p.ref, *p.resp, options.reduce);
      } else {
        AwarenessCounts c;
        const auto universe = entity_instance_ids(*p.ref);
        auto ref_links = detail::non_none_links(p.ref->links);
        CloseResult closed = close_links(ref_links, universe);
        if (!closed.consistent())
          throw DataError("reference document " + p.doc_id +
                          " carries inconsistent links: " + closed.inconsistency->witness);
        c.r_den = static_cast<long long>(
            options.reduce ? reduce(ref_links, universe).size() : ref_links.size());
        res.scores.awareness = AwarenessResult{c, PRF::from_ratios(0, 0, 0, c.r_den)};
      }
    }
  });

  // Deterministic fold in doc_id order.
  std::map<std::string, detail::DocTaskCounts> totals;
  std::map<std::string, std::vector<double>> macro_p, macro_r, macro_f;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> kappa_pool;
  std::vector<double> aw_p, aw_r, aw_f;

  for (auto& res : results) {
    for (const auto& [name, prf] : res.scores.tasks) {
      auto& t = totals[name];
      t.tp += prf.tp;
      t.fp += prf.fp;
      t.fn += prf.fn;
      macro_p[name].push_back(prf.precision);
      macro_r[name].push_back(prf.recall);
      macro_f[name].push_back(prf.f1);
    }
    for (auto& [name, pairs_] : res.kappa_pairs) {
      auto& pool = kappa_pool[name];
      pool.insert(pool.end(), pairs_.begin(), pairs_.end());
    }
    if (res.scores.awareness) {
      report.awareness_totals += res.scores.awareness->counts;
      aw_p.push_back(res.scores.awareness->prf.precision);
      aw_r.push_back(res.scores.awareness->prf.recall);
      aw_f.push_back(res.scores.awareness->prf.f1);
      if (res.scores.awareness->counts.response_inconsistent)
        report.inconsistent_response_docs.push_back(res.scores.doc_id);
    }
    report.per_document.push_back(std::move(res.scores));
  }

  auto mean = [](const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };

  for (const auto& name : report.task_order) {
    TaskRow row;
    const auto& t = totals[name];
    row.micro = PRF::from_counts(t.tp, t.fp, t.fn);
    row.macro_precision = mean(macro_p[name]);
    row.macro_recall = mean(macro_r[name]);
    row.macro_f1 = mean(macro_f[name]);
    report.tasks[name] = row;
  }
  for (auto a : timex_attrs)
    if (want_a)
      report.kappas.emplace_back(std::string(attribute_name(a)),
                                 kappa_from_pairs(kappa_pool[std::string(attribute_name(a))]));
  for (auto a : event_attrs)
    if (want_b)
      report.kappas.emplace_back(std::string(attribute_name(a)),
                                 kappa_from_pairs(kappa_pool[std::string(attribute_name(a))]));

  if (want_c) {
    TaskRow aw;
    const auto& t = report.awareness_totals;
    aw.micro = PRF::from_ratios(t.p_num, t.p_den, t.r_num, t.r_den);
    aw.macro_precision = mean(aw_p);
    aw.macro_recall = mean(aw_r);
    aw.macro_f1 = mean(aw_f);
    report.awareness = aw;
  }
  return report;
}

// Directory-level entry point: loads both corpora and scores them. Parse
// failures in either corpus are fatal here; callers that want to continue
// past bad files should load explicitly and filter.
inline ScoreReport score_corpus(const std::string& ref_dir, const std::string& resp_dir,
                                const ScoreOptions& options) {
  CorpusLoad ref = load_corpus(ref_dir, options.jobs);
  CorpusLoad resp = load_corpus(resp_dir, options.jobs);
  std::string problems;
  for (const auto& f : ref.failures) problems += "\n  " + f.path + ": " + f.message;
  for (const auto& f : resp.failures) problems += "\n  " + f.path + ": " + f.message;
  if (!problems.empty()) throw DataError("unparsable corpus files:" + problems);
  return score_corpus(ref.documents, resp.documents, options);
}

}  // namespace tempoeval
