#pragma once

// Core domain model: temporal entities, links, documents, and the symbolic
// layer of the interval relation vocabulary (inverses, label parsing).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tempoeval {

// ---------------------------------------------------------------------------
// UTF-8 helpers. All character offsets in this library count Unicode scalar
// values of the plain (tag-stripped, unescaped) text, never bytes.

namespace utf8 {

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

inline std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if (!is_continuation(c)) ++n;
  return n;
}

// Byte offset of the scalar with index `cp`; `cp == length(s)` maps to s.size().
inline std::size_t byte_offset(std::string_view s, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_continuation(static_cast<unsigned char>(s[i]))) {
      if (seen == cp) return i;
      ++seen;
    }
  }
  if (seen == cp) return s.size();
  throw std::out_of_range("utf8: scalar offset past end of string");
}

inline std::string_view slice(std::string_view s, std::size_t cp_start, std::size_t cp_end) {
  std::size_t a = byte_offset(s, cp_start);
  std::size_t b = byte_offset(s, cp_end);
  return s.substr(a, b - a);
}

inline void append_scalar(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Returns false and sets *bad to the byte offset of the first malformed
// sequence; overlong forms and stray continuation bytes are rejected.
inline bool valid(std::string_view s, std::size_t* bad = nullptr) {
  std::size_t i = 0;
  auto fail = [&](std::size_t at) {
    if (bad) *bad = at;
    return false;
  };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t need;
    std::uint32_t cp;
    if (c < 0x80) { i += 1; continue; }
    else if ((c & 0xE0) == 0xC0) { need = 1; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { need = 2; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { need = 3; cp = c & 0x07; }
    else return fail(i);
    if (i + need >= s.size()) return fail(i);
    for (std::size_t k = 1; k <= need; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if (!is_continuation(cc)) return fail(i);
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((need == 1 && cp < 0x80) || (need == 2 && cp < 0x800) || (need == 3 && cp < 0x10000))
      return fail(i);
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return fail(i);
    i += need + 1;
  }
  return true;
}

}  // namespace utf8

// ---------------------------------------------------------------------------
// Errors and validation issues.

enum class Severity { ERROR, WARNING };

inline std::string_view to_string(Severity s) {
  return s == Severity::ERROR ? "ERROR" : "WARNING";
}

struct IssueLocation {
  std::string doc_id;
  std::string id;  // entity or link identifier, may be empty

  bool operator==(const IssueLocation&) const = default;
};

// One finding of the validator. `code` is drawn from the closed set listed
// in timeml.hpp next to validate_document().
struct ValidationIssue {
  Severity severity = Severity::ERROR;
  std::string code;
  std::string message;
  IssueLocation location;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::string code_, const std::string& message, int line_ = 0, int column_ = 0)
      : Error(line_ > 0 ? std::to_string(line_) + ":" + std::to_string(column_) + ": " + message
                        : message),
        code(std::move(code_)),
        line(line_),
        column(column_) {}

  std::string code;
  int line = 0;
  int column = 0;
};

class ModelError : public Error {
 public:
  ModelError(std::string code_, IssueLocation location_, const std::string& message)
      : Error(message), code(std::move(code_)), location(std::move(location_)) {}

  std::string code;
  IssueLocation location;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad input data at the level of whole corpora or scoring/merging runs
// (inconsistent reference annotations, mismatched document sets, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Spans.

// Half-open character range [start, end) in scalar-value offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool overlaps(const Span& o) const { return start < o.end && o.start < end; }
  std::size_t overlap_length(const Span& o) const {
    if (!overlaps(o)) return 0;
    return std::min(end, o.end) - std::max(start, o.start);
  }

  auto operator<=>(const Span&) const = default;
};

// ---------------------------------------------------------------------------
// Vocabularies.

enum class TimexType { DATE, TIME, DURATION, SET };

inline constexpr std::string_view kTimexTypeNames[] = {"DATE", "TIME", "DURATION", "SET"};

inline std::string_view to_string(TimexType t) { return kTimexTypeNames[static_cast<int>(t)]; }

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'a' && x <= 'z') x = static_cast<char>(x - 'a' + 'A');
    if (y >= 'a' && y <= 'z') y = static_cast<char>(y - 'a' + 'A');
    if (x != y) return false;
  }
  return true;
}

inline std::optional<TimexType> timex_type_from(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (iequals(name, kTimexTypeNames[i])) return static_cast<TimexType>(i);
  return std::nullopt;
}

// Interval relation labels. NONE marks an identified-but-unclassified pair in
// the datafiles; it never enters closure or relation scoring.
enum class RelationType {
  BEFORE,
  AFTER,
  INCLUDES,
  IS_INCLUDED,
  DURING,
  SIMULTANEOUS,
  IAFTER,
  IBEFORE,
  IDENTITY,
  BEGINS,
  ENDS,
  BEGUN_BY,
  ENDED_BY,
  NONE,
};

inline constexpr int kRelationCount = 14;  // including NONE
inline constexpr std::string_view kRelationNames[kRelationCount] = {
    "BEFORE", "AFTER",   "INCLUDES", "IS_INCLUDED", "DURING", "SIMULTANEOUS", "IAFTER",
    "IBEFORE", "IDENTITY", "BEGINS",  "ENDS",        "BEGUN_BY", "ENDED_BY",   "NONE"};

inline std::string_view to_string(RelationType r) {
  return kRelationNames[static_cast<int>(r)];
}

inline std::optional<RelationType> relation_from(std::string_view name) {
  for (int i = 0; i < kRelationCount; ++i)
    if (iequals(name, kRelationNames[i])) return static_cast<RelationType>(i);
  return std::nullopt;
}

// Converse relation: inverse(a R b) holds between b and a.
// SIMULTANEOUS, IDENTITY and DURING are self-inverse.
inline RelationType inverse(RelationType r) {
  switch (r) {
    case RelationType::BEFORE: return RelationType::AFTER;
    case RelationType::AFTER: return RelationType::BEFORE;
    case RelationType::INCLUDES: return RelationType::IS_INCLUDED;
    case RelationType::IS_INCLUDED: return RelationType::INCLUDES;
    case RelationType::DURING: return RelationType::DURING;
    case RelationType::SIMULTANEOUS: return RelationType::SIMULTANEOUS;
    case RelationType::IAFTER: return RelationType::IBEFORE;
    case RelationType::IBEFORE: return RelationType::IAFTER;
    case RelationType::IDENTITY: return RelationType::IDENTITY;
    case RelationType::BEGINS: return RelationType::BEGUN_BY;
    case RelationType::BEGUN_BY: return RelationType::BEGINS;
    case RelationType::ENDS: return RelationType::ENDED_BY;
    case RelationType::ENDED_BY: return RelationType::ENDS;
    case RelationType::NONE: break;
  }
  throw std::invalid_argument("inverse: NONE has no converse");
}

// ---------------------------------------------------------------------------
// Entities and documents. Plain value types; treat as immutable once built.

// Attributes not covered by the model, preserved verbatim for round-trips.
// Kept sorted by name.
using ExtraAttrs = std::vector<std::pair<std::string, std::string>>;

struct TimexAnnotation {
  std::string tid;
  std::optional<Span> span;  // absent for the DCT (its extent lies outside TEXT)
  TimexType type = TimexType::DATE;
  std::string value;
  std::optional<std::string> function_in_document;
  std::optional<bool> temporal_function;
  std::string surface;
  ExtraAttrs extras;

  bool operator==(const TimexAnnotation&) const = default;
};

struct EventAnnotation {
  std::string eid;
  std::string eiid;
  Span span;
  std::string eclass;
  std::optional<std::string> tense;
  std::optional<std::string> aspect;
  std::optional<std::string> polarity;
  std::optional<std::string> modality;
  std::optional<std::string> pos;
  std::string surface;
  ExtraAttrs extras;

  bool operator==(const EventAnnotation&) const = default;
};

// Directed typed relation between two entity instances (eiid or tid).
struct TemporalLink {
  std::string lid;
  std::string source;
  std::string target;
  RelationType relation = RelationType::NONE;
  ExtraAttrs extras;

  bool operator==(const TemporalLink&) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::optional<std::string> extra_info;
  std::optional<std::string> title;
  TimexAnnotation dct;
  std::string dct_prefix;  // literal text around the DCT timex inside its element
  std::string dct_suffix;
  std::string text;  // plain body text, tags stripped, escapes resolved
  std::vector<TimexAnnotation> timexes;  // body timexes, document order
  std::vector<EventAnnotation> events;   // document order
  std::vector<TemporalLink> links;       // document order
  ExtraAttrs root_attrs;                 // attributes of the outer element

  bool operator==(const AnnotatedDocument&) const = default;

  // Timex lookup by tid; the DCT participates.
  const TimexAnnotation* find_timex(std::string_view tid) const {
    if (dct.tid == tid) return &dct;
    for (const auto& t : timexes)
      if (t.tid == tid) return &t;
    return nullptr;
  }

  const EventAnnotation* find_event_instance(std::string_view eiid) const {
    for (const auto& e : events)
      if (e.eiid == eiid) return &e;
    return nullptr;
  }
};

// Uniform handle over a resolved link endpoint.
struct EntityHandle {
  const TimexAnnotation* timex = nullptr;
  const EventAnnotation* event = nullptr;

  bool is_timex() const { return timex != nullptr; }
  bool is_event() const { return event != nullptr; }
  std::string_view id() const { return timex ? std::string_view(timex->tid) : std::string_view(event->eiid); }
  std::optional<Span> span() const { return timex ? timex->span : std::optional<Span>(event->span); }
  std::string_view surface() const { return timex ? timex->surface : event->surface; }
};

// Resolves an entity-instance reference: timexes by tid, events by eiid.
// Unknown identifiers raise a dangling-reference ModelError; `context`
// (typically a link id) is included in the message when given.
inline EntityHandle resolve_endpoint(const AnnotatedDocument& doc, std::string_view ref,
                                     std::string_view context = {}) {
  if (const TimexAnnotation* t = doc.find_timex(ref)) return EntityHandle{t, nullptr};
  if (const EventAnnotation* e = doc.find_event_instance(ref)) return EntityHandle{nullptr, e};
  std::string msg = "dangling reference '" + std::string(ref) + "'";
  if (!context.empty()) msg += " in link " + std::string(context);
  msg += " in document " + doc.doc_id;
  throw ModelError("DANGLING_REF", {doc.doc_id, std::string(ref)}, msg);
}

// Entity instance identifiers in document order: DCT, body timexes, events.
// This is the canonical point ordering used by the closure engine.
inline std::vector<std::string> entity_instance_ids(const AnnotatedDocument& doc) {
  std::vector<std::string> ids;
  ids.reserve(1 + doc.timexes.size() + doc.events.size());
  ids.push_back(doc.dct.tid);
  for (const auto& t : doc.timexes) ids.push_back(t.tid);
  for (const auto& e : doc.events) ids.push_back(e.eiid);
  return ids;
}

// ---------------------------------------------------------------------------
// Model invariants.

namespace detail {

inline bool id_shape_ok(std::string_view id, std::string_view prefix) {
  if (id.size() <= prefix.size() || id.substr(0, prefix.size()) != prefix) return false;
  for (char c : id.substr(prefix.size()))
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

// Checks the structural invariants of the in-memory model and returns every
// violation found. ERROR entries make the document unusable; WARNING entries
// are advisory (identifier shapes). Format-level checks (VAL shape, DCT link
// coverage) live in validate_document().
inline std::vector<ValidationIssue> model_issues(const AnnotatedDocument& doc) {
  std::vector<ValidationIssue> out;
  auto add = [&](Severity sev, std::string code, std::string id, std::string message) {
    out.push_back({sev, std::move(code), std::move(message), {doc.doc_id, std::move(id)}});
  };

  if (doc.doc_id.empty())
    add(Severity::ERROR, "MISSING_DOCID", "", "document has no identifier");

  const std::size_t text_len = utf8::length(doc.text);

  // Identifier uniqueness, one namespace per identifier kind.
  std::vector<std::string_view> tids{doc.dct.tid}, eids, eiids, lids;
  for (const auto& t : doc.timexes) tids.push_back(t.tid);
  for (const auto& e : doc.events) {
    eids.push_back(e.eid);
    eiids.push_back(e.eiid);
  }
  for (const auto& l : doc.links) lids.push_back(l.lid);
  auto check_unique = [&](std::vector<std::string_view>& ids) {
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 1; i < ids.size(); ++i)
      if (ids[i] == ids[i - 1] && !ids[i].empty())
        add(Severity::ERROR, "DUPLICATE_ID", std::string(ids[i]),
            "duplicate identifier '" + std::string(ids[i]) + "'");
  };
  check_unique(tids);
  check_unique(eids);
  check_unique(eiids);
  check_unique(lids);

  // Per-entity checks plus the pairwise non-overlap rule over all spans.
  std::vector<std::pair<Span, std::string>> spans;
  auto check_span = [&](const std::optional<Span>& span, std::string_view surface,
                        const std::string& id) {
    if (!span) return;
    if (!(span->start < span->end) || span->end > text_len) {
      add(Severity::ERROR, "SPAN_OUT_OF_RANGE", id,
          "span [" + std::to_string(span->start) + "," + std::to_string(span->end) +
              ") outside text of length " + std::to_string(text_len));
      return;
    }
    if (utf8::slice(doc.text, span->start, span->end) != surface)
      add(Severity::ERROR, "SURFACE_MISMATCH", id,
          "surface text does not match the document text at the span");
    spans.emplace_back(*span, id);
  };

  if (doc.dct.value.empty())
    add(Severity::ERROR, "EMPTY_TIMEX_VALUE", doc.dct.tid, "DCT timex has an empty value");
  if (!detail::id_shape_ok(doc.dct.tid, "t"))
    add(Severity::WARNING, "BAD_ID_SHAPE", doc.dct.tid, "timex id is not of the form t<digits>");
  check_span(doc.dct.span, doc.dct.surface, doc.dct.tid);

  for (const auto& t : doc.timexes) {
    if (t.value.empty())
      add(Severity::ERROR, "EMPTY_TIMEX_VALUE", t.tid, "timex has an empty value");
    if (!detail::id_shape_ok(t.tid, "t"))
      add(Severity::WARNING, "BAD_ID_SHAPE", t.tid, "timex id is not of the form t<digits>");
    check_span(t.span, t.surface, t.tid);
  }
  for (const auto& e : doc.events) {
    if (e.eclass.empty())
      add(Severity::ERROR, "EMPTY_EVENT_CLASS", e.eid, "event has an empty class");
    if (!detail::id_shape_ok(e.eid, "e") || detail::id_shape_ok(e.eid, "ei"))
      add(Severity::WARNING, "BAD_ID_SHAPE", e.eid, "event id is not of the form e<digits>");
    if (!detail::id_shape_ok(e.eiid, "ei"))
      add(Severity::WARNING, "BAD_ID_SHAPE", e.eiid,
          "event instance id is not of the form ei<digits>");
    check_span(e.span, e.surface, e.eid);
  }

  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i - 1].first.overlaps(spans[i].first))
      add(Severity::ERROR, "OVERLAPPING_SPANS", spans[i].second,
          "span of " + spans[i].second + " overlaps span of " + spans[i - 1].second);
  }

  for (const auto& l : doc.links) {
    if (!detail::id_shape_ok(l.lid, "l"))
      add(Severity::WARNING, "BAD_ID_SHAPE", l.lid, "link id is not of the form l<digits>");
    if (l.source == l.target) {
      add(Severity::ERROR, "SELF_LINK", l.lid, "link relates '" + l.source + "' to itself");
      continue;
    }
    for (const std::string* ep : {&l.source, &l.target}) {
      if (!doc.find_timex(*ep) && !doc.find_event_instance(*ep))
        add(Severity::ERROR, "DANGLING_REF", l.lid,
            "link " + l.lid + " references unknown entity '" + *ep + "'");
    }
  }
  return out;
}

// Throws ModelError for the first ERROR-severity violation. Construction of
// documents with duplicate identifiers, dangling links, bad spans or
// overlapping entities is rejected through this gate.
inline void check_document(const AnnotatedDocument& doc) {
  for (const auto& issue : model_issues(doc))
    if (issue.severity == Severity::ERROR)
      throw ModelError(issue.code, issue.location, issue.message + " (document " + doc.doc_id + ")");
}

}  // namespace tempoeval
