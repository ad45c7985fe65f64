#pragma once

// Ensemble merger: combines N systems' annotations of the same raw text into
// one silver-standard document. Entities are clustered by transitive span
// overlap; a cluster survives when the designated best system contributed to
// it or when at least `support_threshold` systems did. Extents come from the
// highest-weight contributor, attributes from a weighted vote. Links are
// rewritten onto the merged entities, converse spellings are normalized
// before support is counted, conflicts on a pair resolve by total weight, and
// the final link set is repaired to consistency by greedily dropping the
// weakest links (disable with repair = false).

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempoeval/closure.hpp"
#include "tempoeval/core.hpp"
#include "tempoeval/parallel.hpp"
#include "tempoeval/timeml.hpp"

namespace tempoeval {

struct MergeSystem {
  std::string name;
  double weight = 0.0;
  std::string path;
};

struct MergeConfig {
  std::vector<MergeSystem> systems;
  std::string best_system;
  int support_threshold = 2;

  // The shared-task configuration: TIPSem 0.36 (best), TIPSemB 0.32,
  // TRIOS 0.32, suggestions kept when supported by 2 of the 3 systems.
  static MergeConfig defaults() {
    MergeConfig c;
    c.systems = {{"TIPSem", 0.36, ""}, {"TIPSemB", 0.32, ""}, {"TRIOS", 0.32, ""}};
    c.best_system = "TIPSem";
    c.support_threshold = 2;
    return c;
  }

  void check() const {
    if (systems.empty()) throw ConfigError("merge configuration lists no systems");
    std::set<std::string> names;
    for (const auto& s : systems) {
      if (s.name.empty()) throw ConfigError("merge system without a name");
      if (!names.insert(s.name).second)
        throw ConfigError("merge system '" + s.name + "' listed twice");
      if (!(s.weight > 0)) throw ConfigError("system '" + s.name + "' needs a positive weight");
    }
    if (!names.count(best_system))
      throw ConfigError("best_system '" + best_system + "' is not among the systems");
    if (support_threshold < 1) throw ConfigError("support_threshold must be at least 1");
  }

  std::size_t best_index() const {
    for (std::size_t i = 0; i < systems.size(); ++i)
      if (systems[i].name == best_system) return i;
    throw ConfigError("best_system '" + best_system + "' is not among the systems");
  }

  // JSON file: {"systems":[{"name":..,"weight":..,"path":..},...],
  //             "best_system":.., "support_threshold":2}
  // Relative corpus paths resolve against the config file's directory.
  static MergeConfig from_json_file(const std::string& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    MergeConfig c;
    try {
      for (const auto& s : j.at("systems")) {
        MergeSystem sys;
        sys.name = s.at("name").get<std::string>();
        sys.weight = s.at("weight").get<double>();
        sys.path = s.at("path").get<std::string>();
        std::filesystem::path p(sys.path);
        if (p.is_relative())
          sys.path = (std::filesystem::path(path).parent_path() / p).generic_string();
        c.systems.push_back(std::move(sys));
      }
      c.best_system = j.at("best_system").get<std::string>();
      c.support_threshold = j.value("support_threshold", 2);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad merge configuration in " + path + ": " + e.what());
    }
    c.check();
    return c;
  }
};

// ---------------------------------------------------------------------------
// Entity clustering.

struct ClusterMember {
  std::size_t system = 0;
  std::string id;  // instance id within that system's document
  Span span;
  const TimexAnnotation* timex = nullptr;
  const EventAnnotation* event = nullptr;
};

struct EntityCluster {
  bool is_event = false;
  std::vector<ClusterMember> members;       // every overlapping entity
  std::vector<std::size_t> chosen;          // one member index per system (its longest)

  int support() const {
    std::set<std::size_t> systems;
    for (const auto& m : members) systems.insert(m.system);
    return static_cast<int>(systems.size());
  }
};

// Clusters same-kind entities from all systems by transitive span overlap.
// Within a cluster each system is represented by its longest candidate.
inline std::vector<EntityCluster> cluster_entities(
    const std::vector<const AnnotatedDocument*>& docs, bool events) {
  std::vector<ClusterMember> all;
  for (std::size_t s = 0; s < docs.size(); ++s) {
    if (events) {
      for (const auto& e : docs[s]->events) all.push_back({s, e.eiid, e.span, nullptr, &e});
    } else {
      for (const auto& t : docs[s]->timexes)
        if (t.span) all.push_back({s, t.tid, *t.span, &t, nullptr});
    }
  }
  std::sort(all.begin(), all.end(), [](const ClusterMember& a, const ClusterMember& b) {
    return std::tie(a.span.start, a.span.end, a.system) <
           std::tie(b.span.start, b.span.end, b.system);
  });

  std::vector<EntityCluster> clusters;
  std::size_t frontier = 0;  // max end of the open cluster
  for (const auto& m : all) {
    if (clusters.empty() || m.span.start >= frontier) {
      clusters.push_back({events, {}, {}});
      frontier = m.span.end;
    } else {
      frontier = std::max(frontier, m.span.end);
    }
    clusters.back().members.push_back(m);
  }

  for (auto& cluster : clusters) {
    std::map<std::size_t, std::size_t> per_system;  // system -> member index
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
      const auto& m = cluster.members[i];
      auto it = per_system.find(m.system);
      if (it == per_system.end()) {
        per_system[m.system] = i;
        continue;
      }
      const auto& held = cluster.members[it->second];
      if (std::make_tuple(m.span.length(), held.span.start) >
          std::make_tuple(held.span.length(), m.span.start))
        it->second = i;  // longer wins; earlier start keeps on equal length
    }
    for (const auto& [system, index] : per_system) cluster.chosen.push_back(index);
  }
  return clusters;
}

// ---------------------------------------------------------------------------
// Document merge.

struct DocMergeStats {
  long long entities_kept = 0;
  long long entities_dropped = 0;   // clusters failing both keep rules
  long long links_kept = 0;
  long long links_dropped = 0;      // lost an endpoint or failed the keep rule
  long long links_conflicted = 0;   // kept by rule but beaten on their pair
  long long repair_dropped = 0;     // removed to restore consistency
  bool consistent = true;

  void operator+=(const DocMergeStats& o) {
    entities_kept += o.entities_kept;
    entities_dropped += o.entities_dropped;
    links_kept += o.links_kept;
    links_dropped += o.links_dropped;
    links_conflicted += o.links_conflicted;
    repair_dropped += o.repair_dropped;
    consistent = consistent && o.consistent;
  }
};

namespace detail {

struct WeightedVote {
  double weight = 0;
  bool has_best = false;
  double max_weight = 0;
  std::size_t first_system = static_cast<std::size_t>(-1);
};

// Attribute-by-attribute weighted vote over the chosen cluster members.
// Ties break toward the best system's value, then toward the value backed by
// the single heaviest system, then config order.
template <typename Getter>
std::optional<std::string> vote_attribute(const EntityCluster& cluster, const MergeConfig& config,
                                          std::size_t best, Getter get) {
  std::map<std::pair<bool, std::string>, WeightedVote> groups;
  for (std::size_t index : cluster.chosen) {
    const ClusterMember& m = cluster.members[index];
    std::optional<std::string> value = get(m);
    auto& g = groups[{value.has_value(), value.value_or("")}];
    double w = config.systems[m.system].weight;
    g.weight += w;
    g.max_weight = std::max(g.max_weight, w);
    g.has_best = g.has_best || m.system == best;
    g.first_system = std::min(g.first_system, m.system);
  }
  auto winner = groups.begin();
  for (auto it = std::next(groups.begin()); it != groups.end(); ++it) {
    const auto& a = it->second;
    const auto& b = winner->second;
    if (std::make_tuple(a.weight, a.has_best, a.max_weight, b.first_system) >
        std::make_tuple(b.weight, b.has_best, b.max_weight, a.first_system))
      winner = it;
  }
  if (!winner->first.first) return std::nullopt;
  return winner->first.second;
}

}  // namespace detail

// Merges the per-system annotations of one document. `per_system` must be
// aligned with config.systems. Identifiers are renumbered in text order
// (DCT t0, body timexes t1.., events e1../ei1..).
inline AnnotatedDocument merge_document(const std::vector<const AnnotatedDocument*>& per_system,
                                        const MergeConfig& config, bool repair = true,
                                        DocMergeStats* stats_out = nullptr) {
  config.check();
  if (per_system.size() != config.systems.size())
    throw DataError("merge_document: document list does not match the configured systems");
  const std::size_t best = config.best_index();
  DocMergeStats stats;

  for (std::size_t s = 1; s < per_system.size(); ++s) {
    if (per_system[s]->text != per_system[0]->text)
      throw DataError("document " + per_system[0]->doc_id + ": TEXT of system " +
                      config.systems[s].name + " differs from system " + config.systems[0].name);
    if (per_system[s]->doc_id != per_system[0]->doc_id)
      throw DataError("merge_document: doc_id mismatch (" + per_system[s]->doc_id + " vs " +
                      per_system[0]->doc_id + ")");
  }

  // System priority for extent selection.
  auto rank = [&](std::size_t sys) {
    return std::make_tuple(-config.systems[sys].weight, sys == best ? 0 : 1, sys);
  };

  auto keep_cluster = [&](const EntityCluster& c) {
    for (std::size_t index : c.chosen)
      if (c.members[index].system == best) return true;
    return c.support() >= config.support_threshold;
  };

  const AnnotatedDocument& best_doc = *per_system[best];
  AnnotatedDocument merged;
  merged.doc_id = best_doc.doc_id;
  merged.extra_info = best_doc.extra_info;
  merged.title = best_doc.title;
  merged.root_attrs = best_doc.root_attrs;
  merged.text = best_doc.text;
  merged.dct = best_doc.dct;
  merged.dct.tid = "t0";
  merged.dct_prefix = best_doc.dct_prefix;
  merged.dct_suffix = best_doc.dct_suffix;

  std::map<std::pair<std::size_t, std::string>, std::string> id_map;  // (system, id) -> merged id
  for (std::size_t s = 0; s < per_system.size(); ++s)
    id_map[{s, per_system[s]->dct.tid}] = "t0";

  struct Pending {
    Span span;
    bool is_event;
    EntityCluster cluster;
    const ClusterMember* representative;
    double weight = 0;
    bool has_best = false;
  };
  auto timex_clusters = cluster_entities(per_system, false);
  auto event_clusters = cluster_entities(per_system, true);
  std::vector<Pending> pending;
  for (auto* clusters : {&timex_clusters, &event_clusters}) {
    for (auto& c : *clusters) {
      if (!keep_cluster(c)) {
        ++stats.entities_dropped;
        continue;
      }
      Pending p;
      p.is_event = c.is_event;
      const ClusterMember* repr = nullptr;
      for (std::size_t index : c.chosen) {
        const ClusterMember& m = c.members[index];
        p.weight += config.systems[m.system].weight;
        p.has_best = p.has_best || m.system == best;
        if (!repr || rank(m.system) < rank(repr->system)) repr = &m;
      }
      p.span = repr->span;
      p.representative = repr;
      p.cluster = std::move(c);
      pending.push_back(std::move(p));
    }
  }

  // A merged timex and a merged event may overlap when they come from
  // different systems; inline tags cannot, so the heavier cluster wins.
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::make_tuple(-a.weight, a.has_best ? 0 : 1, a.span, a.is_event ? 1 : 0) <
           std::make_tuple(-b.weight, b.has_best ? 0 : 1, b.span, b.is_event ? 1 : 0);
  });
  std::vector<Pending> resolved;
  for (auto& p : pending) {
    bool clear = true;
    for (const auto& kept : resolved) {
      if (kept.span.overlaps(p.span)) {
        clear = false;
        break;
      }
    }
    if (clear) resolved.push_back(std::move(p));
    else ++stats.entities_dropped;
  }
  std::sort(resolved.begin(), resolved.end(),
            [](const Pending& a, const Pending& b) { return a.span < b.span; });

  auto merge_kind = [&](bool events) {
    int counter = 1;
    for (const auto& p : resolved) {
      if (p.is_event != events) continue;
      std::string surface(utf8::slice(merged.text, p.span.start, p.span.end));
      std::string merged_id;
      if (events) {
        EventAnnotation e;
        e.eid = "e" + std::to_string(counter);
        e.eiid = "ei" + std::to_string(counter);
        e.span = p.span;
        e.surface = surface;
        auto pick = [&](auto getter) {
          return detail::vote_attribute(p.cluster, config, best,
                                        [&](const ClusterMember& m) { return getter(*m.event); });
        };
        e.eclass = pick([](const EventAnnotation& ev) {
                     return std::optional<std::string>(ev.eclass);
                   }).value_or("");
        e.tense = pick([](const EventAnnotation& ev) { return ev.tense; });
        e.aspect = pick([](const EventAnnotation& ev) { return ev.aspect; });
        e.polarity = pick([](const EventAnnotation& ev) { return ev.polarity; });
        e.modality = pick([](const EventAnnotation& ev) { return ev.modality; });
        e.pos = pick([](const EventAnnotation& ev) { return ev.pos; });
        e.extras = p.representative->event->extras;
        merged_id = e.eiid;
        merged.events.push_back(std::move(e));
      } else {
        TimexAnnotation t;
        t.tid = "t" + std::to_string(counter);
        t.span = p.span;
        t.surface = surface;
        auto pick = [&](auto getter) {
          return detail::vote_attribute(p.cluster, config, best,
                                        [&](const ClusterMember& m) { return getter(*m.timex); });
        };
        std::string type =
            pick([](const TimexAnnotation& tx) {
              return std::optional<std::string>(std::string(to_string(tx.type)));
            }).value_or("DATE");
        t.type = timex_type_from(type).value_or(TimexType::DATE);
        t.value = pick([](const TimexAnnotation& tx) {
                    return std::optional<std::string>(tx.value);
                  }).value_or("");
        t.function_in_document =
            pick([](const TimexAnnotation& tx) { return tx.function_in_document; });
        auto tf = pick([](const TimexAnnotation& tx) {
          return tx.temporal_function
                     ? std::optional<std::string>(*tx.temporal_function ? "true" : "false")
                     : std::nullopt;
        });
        if (tf) t.temporal_function = *tf == "true";
        t.extras = p.representative->timex->extras;
        merged_id = t.tid;
        merged.timexes.push_back(std::move(t));
      }
      ++counter;
      ++stats.entities_kept;
      for (const auto& m : p.cluster.members) id_map[{m.system, m.id}] = merged_id;
    }
  };
  merge_kind(false);
  merge_kind(true);

  // Entity ordinal for link ordering: DCT, body timexes, events, each in
  // text order.
  std::map<std::string, int> ordinal;
  ordinal["t0"] = 0;
  int next_ordinal = 1;
  for (const auto& t : merged.timexes) ordinal[t.tid] = next_ordinal++;
  for (const auto& e : merged.events) ordinal[e.eiid] = next_ordinal++;

  // Link candidates, converse-normalized onto ordinal order.
  struct Candidate {
    std::set<std::size_t> supporters;
    double weight = 0;
    bool has_best = false;
  };
  std::map<std::tuple<std::string, std::string, RelationType>, Candidate> candidates;
  std::set<std::tuple<std::size_t, std::string, std::string, RelationType>> seen;
  for (std::size_t s = 0; s < per_system.size(); ++s) {
    for (const auto& l : per_system[s]->links) {
      auto src = id_map.find({s, l.source});
      auto tgt = id_map.find({s, l.target});
      if (src == id_map.end() || tgt == id_map.end()) {
        ++stats.links_dropped;  // an endpoint did not survive the entity merge
        continue;
      }
      std::string a = src->second, b = tgt->second;
      RelationType rel = l.relation;
      if (ordinal[a] > ordinal[b]) {
        std::swap(a, b);
        if (rel != RelationType::NONE) rel = inverse(rel);
      }
      if (a == b) {
        ++stats.links_dropped;  // both endpoints merged into one entity
        continue;
      }
      if (!seen.insert({s, a, b, rel}).second) continue;  // one vote per system
      auto& c = candidates[{a, b, rel}];
      c.supporters.insert(s);
      c.weight += config.systems[s].weight;
      c.has_best = c.has_best || s == best;
    }
  }

  // Keep rule, then per-pair conflict resolution by total weight.
  struct Kept {
    std::string source, target;
    RelationType relation;
    double weight;
    bool has_best;
  };
  std::map<std::pair<std::string, std::string>, std::vector<Kept>> by_pair;
  for (const auto& [key, c] : candidates) {
    const auto& [a, b, rel] = key;
    if (!c.has_best && static_cast<int>(c.supporters.size()) < config.support_threshold) {
      ++stats.links_dropped;
      continue;
    }
    by_pair[{a, b}].push_back({a, b, rel, c.weight, c.has_best});
  }
  std::vector<Kept> winners;
  for (auto& [pair, list] : by_pair) {
    std::sort(list.begin(), list.end(), [](const Kept& x, const Kept& y) {
      return std::make_tuple(-x.weight, x.has_best ? 0 : 1, static_cast<int>(x.relation)) <
             std::make_tuple(-y.weight, y.has_best ? 0 : 1, static_cast<int>(y.relation));
    });
    winners.push_back(list.front());
    stats.links_conflicted += static_cast<long long>(list.size()) - 1;
  }

  // Consistency repair: drop the weakest links until close() succeeds.
  std::vector<std::string> universe = entity_instance_ids(merged);
  auto relational = [&](const std::vector<Kept>& ls) {
    std::vector<TemporalLink> out;
    for (const auto& k : ls)
      if (k.relation != RelationType::NONE)
        out.push_back({"x", k.source, k.target, k.relation, {}});
    return out;
  };
  std::sort(winners.begin(), winners.end(), [&](const Kept& x, const Kept& y) {
    return std::make_tuple(ordinal[x.source], ordinal[x.target], static_cast<int>(x.relation)) <
           std::make_tuple(ordinal[y.source], ordinal[y.target], static_cast<int>(y.relation));
  });
  if (repair) {
    for (;;) {
      CloseResult r = close_links(relational(winners), universe);
      if (r.consistent()) break;
      // Ascending total weight; ties resolve in ordinal order.
      std::size_t victim = winners.size();
      for (std::size_t i = 0; i < winners.size(); ++i) {
        if (winners[i].relation == RelationType::NONE) continue;
        if (victim == winners.size() || winners[i].weight < winners[victim].weight) victim = i;
      }
      if (victim == winners.size()) break;  // nothing relational left; cannot happen
      winners.erase(winners.begin() + static_cast<std::ptrdiff_t>(victim));
      ++stats.repair_dropped;
    }
  }
  stats.consistent = close_links(relational(winners), universe).consistent();

  int lid = 1;
  for (const auto& k : winners) {
    merged.links.push_back(
        {"l" + std::to_string(lid++), k.source, k.target, k.relation, {}});
    ++stats.links_kept;
  }

  check_document(merged);
  if (stats_out) *stats_out = stats;
  return merged;
}

// ---------------------------------------------------------------------------
// Corpus merge.

struct MergeSummary {
  std::vector<std::pair<std::string, DocMergeStats>> per_document;  // doc_id order
  DocMergeStats totals;
  std::size_t documents = 0;
};

// Merges every document of the configured system corpora and writes one .tml
// per document into out_dir (named after the best system's file). All systems
// must provide exactly the same doc_ids.
inline MergeSummary merge_corpus(const MergeConfig& config, const std::string& out_dir,
                                 bool repair = true, int jobs = 0) {
  config.check();
  std::vector<CorpusLoad> corpora;
  std::string problems;
  for (const auto& s : config.systems) {
    CorpusLoad load = load_corpus(s.path, jobs);
    for (const auto& f : load.failures) problems += "\n  " + f.path + ": " + f.message;
    corpora.push_back(std::move(load));
  }
  if (!problems.empty()) throw DataError("unparsable corpus files:" + problems);

  std::vector<std::map<std::string, const LoadedDocument*>> by_id(corpora.size());
  std::set<std::string> all_ids;
  for (std::size_t s = 0; s < corpora.size(); ++s) {
    for (const auto& d : corpora[s].documents) {
      if (!by_id[s].emplace(d.doc.doc_id, &d).second)
        throw DataError("system " + config.systems[s].name + " repeats doc_id '" +
                        d.doc.doc_id + "'");
      all_ids.insert(d.doc.doc_id);
    }
  }
  std::string missing;
  for (const auto& id : all_ids)
    for (std::size_t s = 0; s < corpora.size(); ++s)
      if (!by_id[s].count(id)) missing += "\n  " + config.systems[s].name + " lacks " + id;
  if (!missing.empty()) throw DataError("document sets differ across systems:" + missing);

  std::filesystem::create_directories(out_dir);
  const std::size_t best = config.best_index();
  std::vector<std::string> ids(all_ids.begin(), all_ids.end());

  MergeSummary summary;
  summary.documents = ids.size();
  summary.per_document.resize(ids.size());
  detail::parallel_for(ids.size(), jobs, [&](std::size_t n) {
    std::vector<const AnnotatedDocument*> docs;
    for (std::size_t s = 0; s < corpora.size(); ++s) docs.push_back(&by_id[s].at(ids[n])->doc);
    DocMergeStats stats;
    AnnotatedDocument merged = merge_document(docs, config, repair, &stats);
    std::filesystem::path out =
        std::filesystem::path(out_dir) / by_id[best].at(ids[n])->filename;
    std::ofstream file(out, std::ios::binary);
    if (!file) throw IoError("cannot write " + out.string());
    file << serialize_document(merged);
    summary.per_document[n] = {ids[n], stats};
  });
  for (const auto& [id, stats] : summary.per_document) summary.totals += stats;
  return summary;
}

}  // namespace tempoeval
