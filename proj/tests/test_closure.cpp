#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracle.hpp"
#include "tempoeval/closure.hpp"

using namespace tempoeval;

namespace {

TemporalLink link(const std::string& src, const std::string& tgt, RelationType rel,
                  const std::string& lid = "l1") {
  return TemporalLink{lid, src, tgt, rel, {}};
}

std::vector<std::string> abc(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
  return out;
}

}  // namespace

TEST_CASE("oracle sanity") {
  auto ents = abc(3);
  testoracle::ModelEnumerator chain({link("A", "B", RelationType::BEFORE, "l1"),
                                     link("B", "C", RelationType::BEFORE, "l2")},
                                    ents);
  REQUIRE(chain.consistent());
  CHECK(chain.entails("A", "C", RelationType::BEFORE));
  CHECK_FALSE(chain.entails("A", "C", RelationType::INCLUDES));

  testoracle::ModelEnumerator cyc({link("A", "B", RelationType::BEFORE, "l1"),
                                   link("B", "A", RelationType::BEFORE, "l2")},
                                  abc(2));
  CHECK_FALSE(cyc.consistent());
}

TEST_CASE("interval_to_points definitions") {
  auto before = interval_to_points(RelationType::BEFORE);
  REQUIRE(before.size() == 1);
  CHECK(before[0].a == Endpoint::END);
  CHECK(before[0].rel == PointRelation::LESS);
  CHECK(before[0].b == Endpoint::START);

  auto begins = interval_to_points(RelationType::BEGINS);
  REQUIRE(begins.size() == 2);
  CHECK(begins[0].a == Endpoint::START);
  CHECK(begins[0].rel == PointRelation::EQUAL);
  CHECK(begins[0].b == Endpoint::START);
  CHECK(begins[1].a == Endpoint::END);
  CHECK(begins[1].rel == PointRelation::LESS);
  CHECK(begins[1].b == Endpoint::END);

  auto is_included = interval_to_points(RelationType::IS_INCLUDED);
  REQUIRE(is_included.size() == 2);
  CHECK(is_included[0].a == Endpoint::START);
  CHECK(is_included[0].rel == PointRelation::GREATER);
  CHECK(is_included[0].b == Endpoint::START);
  CHECK(is_included[1].a == Endpoint::END);
  CHECK(is_included[1].rel == PointRelation::LESS);
  CHECK(is_included[1].b == Endpoint::END);

  CHECK_THROWS_AS(interval_to_points(RelationType::NONE), std::invalid_argument);
}

TEST_CASE("build_point_graph basics") {
  auto ents = abc(2);
  PointGraph g = build_point_graph(std::vector<TemporalLink>{link("A", "B", RelationType::BEFORE)},
                                   ents);
  REQUIRE(g.points() == 4);
  CHECK(g.at(g.point_of("A", Endpoint::END), g.point_of("B", Endpoint::START)) ==
        PointRelation::LESS);
  CHECK(g.at(g.point_of("A", Endpoint::START), g.point_of("A", Endpoint::END)) ==
        PointRelation::LESS);

  PointGraph empty = build_point_graph(std::vector<TemporalLink>{}, ents);
  CHECK(empty.at(empty.point_of("A", Endpoint::END), empty.point_of("B", Endpoint::START)) ==
        PointRelation::UNKNOWN);

  // BEFORE and AFTER constrain different point pairs: both are carried in the
  // graph and the contradiction is flagged at close().
  PointGraph bad = build_point_graph(
      std::vector<TemporalLink>{link("A", "B", RelationType::BEFORE, "l1"),
                                link("A", "B", RelationType::AFTER, "l2")},
      ents);
  CHECK(bad.conflicts.empty());
  CHECK(bad.at(bad.point_of("A", Endpoint::END), bad.point_of("B", Endpoint::START)) ==
        PointRelation::LESS);
  CHECK(bad.at(bad.point_of("A", Endpoint::START), bad.point_of("B", Endpoint::END)) ==
        PointRelation::GREATER);
  CloseResult r = close(bad);
  REQUIRE_FALSE(r.consistent());
  CHECK_FALSE(r.inconsistency->witness.empty());

  // Two relations on the same point pair clash at insertion; the conflict is
  // recorded rather than overwritten and surfaces at close().
  PointGraph clash = build_point_graph(
      std::vector<TemporalLink>{link("A", "B", RelationType::BEFORE, "l1"),
                                link("A", "B", RelationType::IBEFORE, "l2")},
      ents);
  REQUIRE_FALSE(clash.conflicts.empty());
  CHECK(clash.at(clash.point_of("A", Endpoint::END), clash.point_of("B", Endpoint::START)) ==
        PointRelation::LESS);
  CloseResult rc = close(clash);
  REQUIRE_FALSE(rc.consistent());
  CHECK(rc.inconsistency->witness.find("l2") != std::string::npos);

  // NONE links are skipped.
  PointGraph skipped =
      build_point_graph(std::vector<TemporalLink>{link("A", "B", RelationType::NONE)}, ents);
  CHECK(skipped.at(skipped.point_of("A", Endpoint::END), skipped.point_of("B", Endpoint::START)) ==
        PointRelation::UNKNOWN);
}

TEST_CASE("close derives transitive consequences") {
  auto ents = abc(3);
  std::vector<TemporalLink> links{link("A", "B", RelationType::BEFORE, "l1"),
                                  link("B", "C", RelationType::BEFORE, "l2")};
  CloseResult r = close_links(links, ents);
  REQUIRE(r.consistent());
  CHECK(r.closed->graph.at(r.closed->graph.point_of("A", Endpoint::END),
                           r.closed->graph.point_of("C", Endpoint::START)) == PointRelation::LESS);
  CHECK(entails(*r.closed, link("A", "C", RelationType::BEFORE)));

  CloseResult cyc = close_links(std::vector<TemporalLink>{link("A", "B", RelationType::BEFORE, "l1"),
                                                          link("B", "A", RelationType::BEFORE, "l2")},
                                abc(2));
  CHECK_FALSE(cyc.consistent());
}

TEST_CASE("BEGINS then BEFORE entails BEFORE") {
  // Expected result established with the enumerator: in every model of
  // {A BEGINS B, B BEFORE C}, A's end precedes C's start.
  auto ents = abc(3);
  std::vector<TemporalLink> links{link("A", "B", RelationType::BEGINS, "l1"),
                                  link("B", "C", RelationType::BEFORE, "l2")};
  testoracle::ModelEnumerator ref(links, ents);
  REQUIRE(ref.consistent());
  REQUIRE(ref.entails("A", "C", RelationType::BEFORE));

  CloseResult r = close_links(links, ents);
  REQUIRE(r.consistent());
  CHECK(entails(*r.closed, link("A", "C", RelationType::BEFORE)));
}

TEST_CASE("entails treats IDENTITY and SIMULTANEOUS alike") {
  auto ents = abc(2);
  std::vector<TemporalLink> links{link("A", "B", RelationType::IDENTITY)};
  testoracle::ModelEnumerator ref(links, ents);
  REQUIRE(ref.entails("B", "A", RelationType::SIMULTANEOUS));

  CloseResult r = close_links(links, ents);
  REQUIRE(r.consistent());
  CHECK(entails(*r.closed, link("B", "A", RelationType::SIMULTANEOUS)));
  CHECK(entails(*r.closed, link("A", "B", RelationType::DURING)));
  CHECK_FALSE(entails(*r.closed, link("A", "B", RelationType::BEFORE)));
}

TEST_CASE("entails rejects NONE and unknown endpoints") {
  auto ents = abc(2);
  CloseResult r = close_links(std::vector<TemporalLink>{link("A", "B", RelationType::BEFORE)}, ents);
  REQUIRE(r.consistent());
  CHECK_THROWS_AS(entails(*r.closed, link("A", "B", RelationType::NONE)), std::invalid_argument);
  CHECK_THROWS_AS(entails(*r.closed, link("A", "Z", RelationType::BEFORE)), std::invalid_argument);
}

TEST_CASE("reduce drops transitive consequences") {
  auto ents = abc(3);
  std::vector<TemporalLink> links{link("A", "B", RelationType::BEFORE, "l1"),
                                  link("B", "C", RelationType::BEFORE, "l2"),
                                  link("A", "C", RelationType::BEFORE, "l3")};
  auto reduced = reduce(links, ents);
  REQUIRE(reduced.size() == 2);
  CHECK(reduced[0].source == "A");
  CHECK(reduced[0].target == "B");
  CHECK(reduced[1].source == "B");
  CHECK(reduced[1].target == "C");

  auto single = reduce({link("A", "B", RelationType::BEFORE)}, abc(2));
  REQUIRE(single.size() == 1);

  // Two spellings of the same point constraints: one survives.
  auto dup = reduce({link("A", "B", RelationType::IDENTITY, "l1"),
                     link("A", "B", RelationType::SIMULTANEOUS, "l2")},
                    abc(2));
  REQUIRE(dup.size() == 1);

  CHECK_THROWS_AS(reduce({link("A", "B", RelationType::BEFORE, "l1"),
                          link("B", "A", RelationType::BEFORE, "l2")},
                         abc(2)),
                  DataError);
}

TEST_CASE("closure properties on random link sets") {
  std::mt19937 rng(424243);
  std::uniform_int_distribution<int> n_entities(2, 4);
  std::uniform_int_distribution<int> n_links(1, 3);
  std::uniform_int_distribution<int> rel_pick(0, 12);

  int consistent_seen = 0;
  for (int iter = 0; iter < 300; ++iter) {
    auto ents = abc(n_entities(rng));
    std::uniform_int_distribution<int> ent_pick(0, static_cast<int>(ents.size()) - 1);
    std::vector<TemporalLink> links;
    int m = n_links(rng);
    for (int i = 0; i < m; ++i) {
      int a = ent_pick(rng), b = ent_pick(rng);
      if (a == b) continue;
      links.push_back(link(ents[static_cast<std::size_t>(a)], ents[static_cast<std::size_t>(b)],
                           static_cast<RelationType>(rel_pick(rng)),
                           "l" + std::to_string(i + 1)));
    }

    CloseResult r = close_links(links, ents);
    if (!r.consistent()) continue;
    ++consistent_seen;

    // Idempotence: closing a closed graph changes nothing.
    CloseResult again = close(r.closed->graph);
    REQUIRE(again.consistent());
    CHECK(again.closed->graph == r.closed->graph);

    // reduce preserves the closed matrix exactly.
    auto reduced = reduce(links, ents);
    CloseResult r2 = close_links(reduced, ents);
    REQUIRE(r2.consistent());
    CHECK(r2.closed->graph.matrix == r.closed->graph.matrix);

    // Monotonicity: adding an entailed link never changes the closure.
    for (std::size_t i = 0; i + 1 < ents.size(); ++i) {
      if (auto rel = entailed_relation(*r.closed, ents[i], ents[i + 1])) {
        auto extended = links;
        extended.push_back(link(ents[i], ents[i + 1], *rel, "lx"));
        CloseResult r3 = close_links(extended, ents);
        REQUIRE(r3.consistent());
        CHECK(r3.closed->graph.matrix == r.closed->graph.matrix);
      }
    }

    // Monotonicity, general form: any extra link either keeps every derived
    // constraint or makes the set inconsistent.
    {
      auto extended = links;
      int a = ent_pick(rng), b = ent_pick(rng);
      if (a != b) {
        extended.push_back(link(ents[static_cast<std::size_t>(a)],
                                ents[static_cast<std::size_t>(b)],
                                static_cast<RelationType>(rel_pick(rng)), "ly"));
        CloseResult r4 = close_links(extended, ents);
        if (r4.consistent()) {
          const auto& before = r.closed->graph;
          const auto& after = r4.closed->graph;
          for (int p = 0; p < before.points(); ++p)
            for (int q = 0; q < before.points(); ++q)
              if (before.at(p, q) != PointRelation::UNKNOWN)
                CHECK(after.at(p, q) == before.at(p, q));
        }
      }
    }
  }
  CHECK(consistent_seen > 50);
}

TEST_CASE("closure agrees with the exhaustive enumerator") {
  std::mt19937 rng(987654);
  std::uniform_int_distribution<int> n_entities(2, 4);
  std::uniform_int_distribution<int> n_links(1, 3);
  std::uniform_int_distribution<int> rel_pick(0, 12);

  for (int iter = 0; iter < 1500; ++iter) {
    auto ents = abc(n_entities(rng));
    std::uniform_int_distribution<int> ent_pick(0, static_cast<int>(ents.size()) - 1);
    std::vector<TemporalLink> links;
    int m = n_links(rng);
    for (int i = 0; i < m; ++i) {
      int a = ent_pick(rng), b = ent_pick(rng);
      if (a == b) continue;
      links.push_back(link(ents[static_cast<std::size_t>(a)], ents[static_cast<std::size_t>(b)],
                           static_cast<RelationType>(rel_pick(rng)),
                           "l" + std::to_string(i + 1)));
    }

    testoracle::ModelEnumerator ref(links, ents);
    CloseResult r = close_links(links, ents);
    REQUIRE(ref.consistent() == r.consistent());
    if (!r.consistent()) continue;

    for (const auto& a : ents) {
      for (const auto& b : ents) {
        if (a == b) continue;
        for (int rel = 0; rel < 13; ++rel) {
          auto rt = static_cast<RelationType>(rel);
          bool engine = entails(*r.closed, link(a, b, rt));
          bool oracle = ref.entails(a, b, rt);
          REQUIRE(engine == oracle);
        }
      }
    }
  }
}
