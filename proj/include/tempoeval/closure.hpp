#pragma once

// Temporal reasoning over interval endpoints. Every interval relation is a
// conjunction of basic point constraints (<, =, >) between the two intervals'
// start and end points. Closure propagates compositions to a fixpoint
// (all-pairs, Floyd-Warshall style); since all input constraints are basic,
// path consistency is exact for this fragment: the closed matrix holds every
// entailed basic relation, and a contradiction is found iff no model exists.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tempoeval/core.hpp"

namespace tempoeval {

enum class PointRelation : std::uint8_t { LESS, EQUAL, GREATER, UNKNOWN };

inline std::string_view to_string(PointRelation r) {
  switch (r) {
    case PointRelation::LESS: return "<";
    case PointRelation::EQUAL: return "=";
    case PointRelation::GREATER: return ">";
    default: return "?";
  }
}

inline PointRelation converse(PointRelation r) {
  switch (r) {
    case PointRelation::LESS: return PointRelation::GREATER;
    case PointRelation::GREATER: return PointRelation::LESS;
    default: return r;  // EQUAL and UNKNOWN are symmetric
  }
}

// Composition of basic point relations; UNKNOWN absorbs.
//   EQUAL o x = x,  LESS o LESS = LESS,  GREATER o GREATER = GREATER,
//   LESS o GREATER = GREATER o LESS = UNKNOWN.
inline PointRelation compose(PointRelation a, PointRelation b) {
  if (a == PointRelation::EQUAL) return b;
  if (b == PointRelation::EQUAL) return a;
  if (a == PointRelation::UNKNOWN || b == PointRelation::UNKNOWN) return PointRelation::UNKNOWN;
  return a == b ? a : PointRelation::UNKNOWN;
}

enum class Endpoint : std::uint8_t { START, END };

// One conjunct of an interval relation: (a.<endpoint>) rel (b.<endpoint>).
struct PointConstraint {
  Endpoint a;
  PointRelation rel;
  Endpoint b;
};

// Defining endpoint constraints of each interval relation. IDENTITY and
// DURING share the SIMULTANEOUS constraints; the label distinction lives only
// in the model layer. IBEFORE/IAFTER are "meets": a shared endpoint.
inline std::vector<PointConstraint> interval_to_points(RelationType r) {
  using E = Endpoint;
  using P = PointRelation;
  switch (r) {
    case RelationType::BEFORE: return {{E::END, P::LESS, E::START}};
    case RelationType::AFTER: return {{E::START, P::GREATER, E::END}};
    case RelationType::IBEFORE: return {{E::END, P::EQUAL, E::START}};
    case RelationType::IAFTER: return {{E::START, P::EQUAL, E::END}};
    case RelationType::INCLUDES: return {{E::START, P::LESS, E::START}, {E::END, P::GREATER, E::END}};
    case RelationType::IS_INCLUDED: return {{E::START, P::GREATER, E::START}, {E::END, P::LESS, E::END}};
    case RelationType::BEGINS: return {{E::START, P::EQUAL, E::START}, {E::END, P::LESS, E::END}};
    case RelationType::BEGUN_BY: return {{E::START, P::EQUAL, E::START}, {E::END, P::GREATER, E::END}};
    case RelationType::ENDS: return {{E::END, P::EQUAL, E::END}, {E::START, P::GREATER, E::START}};
    case RelationType::ENDED_BY: return {{E::END, P::EQUAL, E::END}, {E::START, P::LESS, E::START}};
    case RelationType::DURING:
    case RelationType::SIMULTANEOUS:
    case RelationType::IDENTITY:
      return {{E::START, P::EQUAL, E::START}, {E::END, P::EQUAL, E::END}};
    case RelationType::NONE: break;
  }
  throw std::invalid_argument("interval_to_points: NONE carries no constraints");
}

// ---------------------------------------------------------------------------
// Point graph: two points per entity instance (start 2i, end 2i+1), one
// PointRelation per ordered point pair, converse-consistent by construction.

struct PointGraph {
  struct Conflict {
    int a = 0, b = 0;
    PointRelation existing = PointRelation::UNKNOWN;
    PointRelation incoming = PointRelation::UNKNOWN;
    std::string lid;
  };

  std::vector<std::string> entities;
  std::unordered_map<std::string, int> entity_index;
  std::vector<PointRelation> matrix;  // points() * points(), row-major
  std::vector<Conflict> conflicts;    // insertion-time contradictions, surfaced by close()

  int points() const { return static_cast<int>(entities.size()) * 2; }

  PointRelation at(int a, int b) const { return matrix[static_cast<std::size_t>(a) * points() + b]; }

  void set(int a, int b, PointRelation r) {
    matrix[static_cast<std::size_t>(a) * points() + b] = r;
    matrix[static_cast<std::size_t>(b) * points() + a] = converse(r);
  }

  std::string point_name(int p) const { return entities[p / 2] + (p % 2 ? "+" : "-"); }

  int point_of(std::string_view entity, Endpoint e) const {
    auto it = entity_index.find(std::string(entity));
    if (it == entity_index.end())
      throw std::invalid_argument("unknown entity instance '" + std::string(entity) + "'");
    return it->second * 2 + (e == Endpoint::END ? 1 : 0);
  }

  bool operator==(const PointGraph& o) const {
    return entities == o.entities && matrix == o.matrix;
  }
};

// Builds the constraint network for a link set. NONE links are skipped; every
// other endpoint must name a member of `entities`. Contradicting constraints
// on a pair are recorded as conflicts, not overwritten.
inline PointGraph build_point_graph(std::span<const TemporalLink> links,
                                    const std::vector<std::string>& entities) {
  PointGraph g;
  g.entities = entities;
  for (std::size_t i = 0; i < entities.size(); ++i)
    g.entity_index.emplace(entities[i], static_cast<int>(i));
  if (g.entity_index.size() != entities.size())
    throw std::invalid_argument("duplicate entity instance in point graph");
  const int n = g.points();
  g.matrix.assign(static_cast<std::size_t>(n) * n, PointRelation::UNKNOWN);
  for (int p = 0; p < n; ++p) g.set(p, p, PointRelation::EQUAL);
  for (std::size_t i = 0; i < entities.size(); ++i)
    g.set(static_cast<int>(2 * i), static_cast<int>(2 * i + 1), PointRelation::LESS);

  for (const TemporalLink& l : links) {
    if (l.relation == RelationType::NONE) continue;
    for (const PointConstraint& c : interval_to_points(l.relation)) {
      int a = g.point_of(l.source, c.a);
      int b = g.point_of(l.target, c.b);
      PointRelation existing = g.at(a, b);
      if (existing == PointRelation::UNKNOWN) {
        g.set(a, b, c.rel);
      } else if (existing != c.rel) {
        g.conflicts.push_back({a, b, existing, c.rel, l.lid});
      }
    }
  }
  return g;
}

struct Inconsistency {
  std::string witness;          // human-readable contradiction, names the points
  std::vector<int> cycle;       // the points involved
};

// A path-consistent point graph; composing any two edges adds nothing.
struct ClosedGraph {
  PointGraph graph;

  bool operator==(const ClosedGraph& o) const { return graph == o.graph; }
};

struct CloseResult {
  std::optional<ClosedGraph> closed;
  std::optional<Inconsistency> inconsistency;

  bool consistent() const { return closed.has_value(); }
};

// Propagates compositions to a fixpoint. A merge keeps the more specific
// value; a clash between two basic values (or any point before itself) yields
// an Inconsistency carrying a witness cycle.
inline CloseResult close(PointGraph g) {
  if (!g.conflicts.empty()) {
    const auto& c = g.conflicts.front();
    Inconsistency inc;
    inc.cycle = {c.a, c.b};
    inc.witness = "conflicting constraints on (" + g.point_name(c.a) + ", " + g.point_name(c.b) +
                  "): " + std::string(to_string(c.existing)) + " vs " +
                  std::string(to_string(c.incoming)) +
                  (c.lid.empty() ? "" : " (link " + c.lid + ")");
    return {std::nullopt, std::move(inc)};
  }
  const int n = g.points();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        PointRelation ik = g.at(i, k);
        if (ik == PointRelation::UNKNOWN) continue;
        for (int j = 0; j < n; ++j) {
          PointRelation kj = g.at(k, j);
          PointRelation derived = compose(ik, kj);
          if (derived == PointRelation::UNKNOWN) continue;
          PointRelation existing = g.at(i, j);
          if (existing == derived) continue;
          if (existing == PointRelation::UNKNOWN) {
            g.set(i, j, derived);
            changed = true;
            continue;
          }
          // Basic vs basic clash: i -> k -> j contradicts the known (i, j).
          // A cycle p < p surfaces here as EQUAL vs LESS on the diagonal.
          Inconsistency inc;
          inc.cycle = {i, k, j};
          inc.witness = g.point_name(i) + " " + std::string(to_string(existing)) + " " +
                        g.point_name(j) + " is given, but " + g.point_name(i) + " " +
                        std::string(to_string(ik)) + " " + g.point_name(k) + " " +
                        std::string(to_string(kj)) + " " + g.point_name(j) + " derives " +
                        std::string(to_string(derived));
          return {std::nullopt, std::move(inc)};
        }
      }
    }
  }
  return {ClosedGraph{std::move(g)}, std::nullopt};
}

// Verification query: YES (true) iff every endpoint constraint of the link's
// relation is derived in the closed graph; false means "no information",
// never refutation.
inline bool entails(const ClosedGraph& closed, const TemporalLink& link) {
  if (link.relation == RelationType::NONE)
    throw std::invalid_argument("entails: NONE is not a queryable relation");
  for (const PointConstraint& c : interval_to_points(link.relation)) {
    int a = closed.graph.point_of(link.source, c.a);
    int b = closed.graph.point_of(link.target, c.b);
    if (closed.graph.at(a, b) != c.rel) return false;
  }
  return true;
}

// The strongest basic interval relation from `source` to `target` derivable
// in the closed graph, if any. The SIMULTANEOUS/IDENTITY/DURING class is
// reported as SIMULTANEOUS.
inline std::optional<RelationType> entailed_relation(const ClosedGraph& closed,
                                                     const std::string& source,
                                                     const std::string& target) {
  static constexpr RelationType kCandidates[] = {
      RelationType::SIMULTANEOUS, RelationType::BEFORE,   RelationType::AFTER,
      RelationType::IBEFORE,      RelationType::IAFTER,   RelationType::BEGINS,
      RelationType::BEGUN_BY,     RelationType::ENDS,     RelationType::ENDED_BY,
      RelationType::INCLUDES,     RelationType::IS_INCLUDED};
  for (RelationType r : kCandidates) {
    if (entails(closed, TemporalLink{"", source, target, r, {}})) return r;
  }
  return std::nullopt;
}

// Drops links entailed by the remaining ones, visiting links in a fixed order
// (source, target, relation). The closure of the result equals the closure of
// the input. Inconsistent input is an error.
inline std::vector<TemporalLink> reduce(std::vector<TemporalLink> links,
                                        const std::vector<std::string>& entities) {
  std::erase_if(links, [](const TemporalLink& l) { return l.relation == RelationType::NONE; });
  std::sort(links.begin(), links.end(), [](const TemporalLink& a, const TemporalLink& b) {
    return std::tie(a.source, a.target, a.relation) < std::tie(b.source, b.target, b.relation);
  });
  {
    CloseResult full = close(build_point_graph(links, entities));
    if (!full.consistent())
      throw DataError("reduce: inconsistent link set: " + full.inconsistency->witness);
  }
  std::size_t i = 0;
  while (i < links.size()) {
    std::vector<TemporalLink> rest;
    rest.reserve(links.size() - 1);
    for (std::size_t k = 0; k < links.size(); ++k)
      if (k != i) rest.push_back(links[k]);
    CloseResult r = close(build_point_graph(rest, entities));
    if (r.consistent() && entails(*r.closed, links[i])) {
      links.erase(links.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return links;
}

// Convenience: consistency of a link set over the given entities.
inline CloseResult close_links(std::span<const TemporalLink> links,
                               const std::vector<std::string>& entities) {
  return close(build_point_graph(links, entities));
}

}  // namespace tempoeval
