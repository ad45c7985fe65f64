#include <catch2/catch_amalgamated.hpp>

#include "tempoeval/core.hpp"

using namespace tempoeval;

namespace {

AnnotatedDocument tiny_doc() {
  AnnotatedDocument doc;
  doc.doc_id = "doc1";
  doc.dct = TimexAnnotation{"t0", std::nullopt, TimexType::DATE, "2013-01-01",
                            "CREATION_TIME", false, "January 1", {}};
  doc.text = "Alice signed the deal on Friday.";
  //          0123456789...
  doc.events.push_back(EventAnnotation{"e1", "ei1", Span{6, 12}, "OCCURRENCE", "PAST",
                                       std::nullopt, std::nullopt, std::nullopt, "VERB",
                                       "signed", {}});
  doc.timexes.push_back(TimexAnnotation{"t1", Span{25, 31}, TimexType::DATE, "2013-01-04",
                                        std::nullopt, std::nullopt, "Friday", {}});
  doc.links.push_back(TemporalLink{"l1", "ei1", "t0", RelationType::BEFORE, {}});
  return doc;
}

}  // namespace

TEST_CASE("inverse is an involution; fixed points as documented") {
  for (int i = 0; i < kRelationCount - 1; ++i) {
    auto r = static_cast<RelationType>(i);
    CHECK(inverse(inverse(r)) == r);
  }
  CHECK(inverse(RelationType::BEFORE) == RelationType::AFTER);
  CHECK(inverse(RelationType::BEGINS) == RelationType::BEGUN_BY);
  CHECK(inverse(RelationType::ENDS) == RelationType::ENDED_BY);
  CHECK(inverse(RelationType::IBEFORE) == RelationType::IAFTER);
  CHECK(inverse(RelationType::SIMULTANEOUS) == RelationType::SIMULTANEOUS);
  CHECK(inverse(RelationType::IDENTITY) == RelationType::IDENTITY);
  CHECK(inverse(RelationType::DURING) == RelationType::DURING);
  CHECK_THROWS_AS(inverse(RelationType::NONE), std::invalid_argument);
}

TEST_CASE("label parsing is case-insensitive, canonical on output") {
  CHECK(relation_from("before") == RelationType::BEFORE);
  CHECK(relation_from("Is_Included") == RelationType::IS_INCLUDED);
  CHECK(relation_from("none") == RelationType::NONE);
  CHECK_FALSE(relation_from("overlaps").has_value());
  CHECK(to_string(RelationType::ENDED_BY) == "ENDED_BY");

  CHECK(timex_type_from("date") == TimexType::DATE);
  CHECK(timex_type_from("SET") == TimexType::SET);
  CHECK_FALSE(timex_type_from("era").has_value());
}

TEST_CASE("span arithmetic") {
  Span a{0, 4}, b{2, 12}, c{10, 14}, d{4, 6};
  CHECK(a.overlaps(b));
  CHECK(b.overlaps(c));
  CHECK_FALSE(a.overlaps(c));
  CHECK_FALSE(a.overlaps(d));  // half-open: [0,4) and [4,6) touch, no overlap
  CHECK(a.overlap_length(b) == 2);
  CHECK(c.overlap_length(b) == 2);
  CHECK(a.overlap_length(c) == 0);
}

TEST_CASE("utf8 offsets count scalar values") {
  std::string s = "a\xC3\xA9z";  // "aéz"
  CHECK(utf8::length(s) == 3);
  CHECK(utf8::byte_offset(s, 1) == 1);
  CHECK(utf8::byte_offset(s, 2) == 3);
  CHECK(utf8::byte_offset(s, 3) == 4);
  CHECK(utf8::slice(s, 1, 2) == "\xC3\xA9");
  CHECK_THROWS_AS(utf8::byte_offset(s, 4), std::out_of_range);

  CHECK(utf8::valid(s));
  std::size_t bad = 0;
  CHECK_FALSE(utf8::valid("a\xC3", &bad));  // truncated sequence
  CHECK(bad == 1);
  CHECK_FALSE(utf8::valid("\x80", &bad));  // stray continuation byte
  CHECK_FALSE(utf8::valid("\xC0\xAF", &bad));  // overlong
}

TEST_CASE("resolve_endpoint finds timexes and event instances") {
  AnnotatedDocument doc = tiny_doc();
  EntityHandle dct = resolve_endpoint(doc, "t0");
  REQUIRE(dct.is_timex());
  CHECK(dct.timex->function_in_document == "CREATION_TIME");
  CHECK_FALSE(dct.span().has_value());

  EntityHandle ev = resolve_endpoint(doc, "ei1");
  REQUIRE(ev.is_event());
  CHECK(ev.surface() == "signed");
  CHECK(ev.span() == Span{6, 12});

  try {
    resolve_endpoint(doc, "ei99", "l7");
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(e.code == "DANGLING_REF");
    CHECK(std::string(e.what()).find("ei99") != std::string::npos);
    CHECK(std::string(e.what()).find("l7") != std::string::npos);
  }
}

TEST_CASE("model invariants are enforced") {
  SECTION("valid document is clean") {
    AnnotatedDocument doc = tiny_doc();
    for (const auto& issue : model_issues(doc)) CHECK(issue.severity != Severity::ERROR);
    CHECK_NOTHROW(check_document(doc));
  }

  SECTION("duplicate identifiers are rejected") {
    AnnotatedDocument doc = tiny_doc();
    auto extra = doc.events[0];
    extra.span = Span{13, 16};
    extra.surface = "the";
    doc.events.push_back(extra);  // same eid/eiid
    try {
      check_document(doc);
      FAIL("expected ModelError");
    } catch (const ModelError& e) {
      CHECK(e.code == "DUPLICATE_ID");
    }
  }

  SECTION("dangling link endpoint") {
    AnnotatedDocument doc = tiny_doc();
    doc.links.push_back(TemporalLink{"l2", "ei1", "t9", RelationType::AFTER, {}});
    bool found = false;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "DANGLING_REF" && issue.location.id == "l2") found = true;
    CHECK(found);
  }

  SECTION("self link") {
    AnnotatedDocument doc = tiny_doc();
    doc.links.push_back(TemporalLink{"l2", "ei1", "ei1", RelationType::AFTER, {}});
    bool found = false;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "SELF_LINK") found = true;
    CHECK(found);
  }

  SECTION("surface must match the text at the span") {
    AnnotatedDocument doc = tiny_doc();
    doc.events[0].surface = "signs";
    bool found = false;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "SURFACE_MISMATCH") found = true;
    CHECK(found);
  }

  SECTION("overlapping entity spans") {
    AnnotatedDocument doc = tiny_doc();
    doc.timexes[0].span = Span{10, 27};
    doc.timexes[0].surface = "ed the deal on Fr";
    bool found = false;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "OVERLAPPING_SPANS") found = true;
    CHECK(found);
  }

  SECTION("span out of range") {
    AnnotatedDocument doc = tiny_doc();
    doc.timexes[0].span = Span{25, 99};
    bool found = false;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "SPAN_OUT_OF_RANGE") found = true;
    CHECK(found);
  }

  SECTION("empty value and class") {
    AnnotatedDocument doc = tiny_doc();
    doc.timexes[0].value.clear();
    doc.events[0].eclass.clear();
    int errors = 0;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "EMPTY_TIMEX_VALUE" || issue.code == "EMPTY_EVENT_CLASS") ++errors;
    CHECK(errors == 2);
  }

  SECTION("identifier shape warnings") {
    AnnotatedDocument doc = tiny_doc();
    doc.timexes[0].tid = "timex1";
    bool found = false;
    for (const auto& issue : model_issues(doc))
      if (issue.code == "BAD_ID_SHAPE" && issue.severity == Severity::WARNING) found = true;
    CHECK(found);
  }
}

TEST_CASE("entity_instance_ids follows document order") {
  AnnotatedDocument doc = tiny_doc();
  auto ids = entity_instance_ids(doc);
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == "t0");
  CHECK(ids[1] == "t1");
  CHECK(ids[2] == "ei1");
}

TEST_CASE("surface extraction on multibyte text") {
  AnnotatedDocument doc = tiny_doc();
  doc.text = "La r\xC3\xA9union a commenc\xC3\xA9 hier.";  // "La réunion a commencé hier."
  doc.events[0].span = Span{13, 21};
  doc.events[0].surface = "commenc\xC3\xA9";
  doc.timexes[0].span = Span{22, 26};
  doc.timexes[0].surface = "hier";
  CHECK_NOTHROW(check_document(doc));
}
