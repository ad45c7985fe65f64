#pragma once

// Reader, writer and validator for the shared-task datafile format: an outer
// TimeML element holding DOCID, optional EXTRAINFO and TITLE, a DCT element
// with the creation-time TIMEX3, a TEXT element with inline EVENT/TIMEX3
// annotations, and trailing TLINK elements. Inline tags are converted to
// character spans over the tag-stripped TEXT; serialization re-embeds them.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tempoeval/core.hpp"
#include "tempoeval/parallel.hpp"
#include "tempoeval/xml.hpp"

namespace tempoeval {

// ---------------------------------------------------------------------------
// VAL shape. A permissive ISO-8601-style family, not a normalizer: dates and
// times with X placeholders, week/season/quarter/half forms, durations
// starting with P, and the *_REF keywords. Used for WARNING-level checks only.

namespace detail {

inline bool digits_or_x(std::string_view s, std::size_t count) {
  if (s.size() != count) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || c == 'X')) return false;
  return true;
}

inline bool duration_shape(std::string_view v) {
  if (v.size() < 2 || v[0] != 'P') return false;
  bool has_amount = false;
  for (char c : v.substr(1)) {
    if ((c >= '0' && c <= '9') || c == 'X') has_amount = true;
    else if (c != '.' && c != 'T' && c != 'Y' && c != 'M' && c != 'W' && c != 'D' && c != 'H' &&
             c != 'S' && c != 'E' && c != 'C')  // DE/CE units: decades, centuries
      return false;
  }
  return has_amount;
}

inline bool date_shape(std::string_view d) {
  if (d.empty()) return true;  // bare time-of-day values
  std::vector<std::string_view> seg;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= d.size(); ++i) {
    if (i == d.size() || d[i] == '-') {
      seg.push_back(d.substr(start, i - start));
      start = i + 1;
    }
  }
  if (!digits_or_x(seg[0], 4)) return false;
  for (std::size_t i = 1; i < seg.size(); ++i) {
    std::string_view s = seg[i];
    if (digits_or_x(s, 2) || digits_or_x(s, 1)) continue;
    if (s.size() == 3 && s[0] == 'W' && digits_or_x(s.substr(1), 2)) continue;
    if (s == "SP" || s == "SU" || s == "FA" || s == "WI") continue;
    if (s.size() == 2 && (s[0] == 'Q' || s[0] == 'H') && s[1] >= '1' && s[1] <= '4') continue;
    if (s == "WE") continue;  // weekend
    return false;
  }
  return true;
}

inline bool time_shape(std::string_view t) {
  if (t == "MO" || t == "AF" || t == "EV" || t == "NI" || t == "DT" || t == "MI") return true;
  if (!t.empty() && t.back() == 'Z') t.remove_suffix(1);
  std::vector<std::string_view> seg;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == ':') {
      seg.push_back(t.substr(start, i - start));
      start = i + 1;
    }
  }
  if (seg.empty() || seg.size() > 3) return false;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    std::string_view s = seg[i];
    if (i == 2) {  // seconds may carry a fraction
      std::size_t dot = s.find('.');
      if (dot != std::string_view::npos) s = s.substr(0, dot);
    }
    if (!digits_or_x(s, 2)) return false;
  }
  return true;
}

}  // namespace detail

inline bool value_shape_ok(std::string_view v) {
  if (v.empty()) return false;
  if (v == "PAST_REF" || v == "PRESENT_REF" || v == "FUTURE_REF") return true;
  if (v[0] == 'P') return detail::duration_shape(v);
  std::size_t t = v.find('T');
  if (t == std::string_view::npos) return detail::date_shape(v);
  return detail::date_shape(v.substr(0, t)) && detail::time_shape(v.substr(t + 1));
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

[[noreturn]] inline void element_error(const xml::Node& el, const std::string& code,
                                       const std::string& message) {
  throw ParseError(code, message, el.line, el.column);
}

inline std::string text_content(const xml::Node& el) {
  std::string out;
  for (const auto& child : el.children) {
    if (const std::string* s = std::get_if<std::string>(&child)) {
      out += *s;
    } else {
      const xml::Node& n = std::get<xml::Node>(child);
      element_error(n, "UNEXPECTED_ELEMENT",
                    "<" + el.name + "> must contain plain text, found <" + n.name + ">");
    }
  }
  return out;
}

// Splits an element's attributes into the handled set and sorted extras.
class AttrReader {
 public:
  explicit AttrReader(const xml::Node& el) : el_(el), used_(el.attrs.size(), false) {}

  const std::string* get(std::string_view name) {
    for (std::size_t i = 0; i < el_.attrs.size(); ++i) {
      if (el_.attrs[i].first == name) {
        used_[i] = true;
        return &el_.attrs[i].second;
      }
    }
    return nullptr;
  }

  std::string require(std::string_view name) {
    if (const std::string* v = get(name)) return *v;
    element_error(el_, "MISSING_ATTRIBUTE",
                  "<" + el_.name + "> is missing required attribute '" + std::string(name) + "'");
  }

  ExtraAttrs extras() const {
    ExtraAttrs out;
    for (std::size_t i = 0; i < el_.attrs.size(); ++i)
      if (!used_[i]) out.push_back(el_.attrs[i]);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const xml::Node& el_;
  std::vector<bool> used_;
};

inline TimexAnnotation parse_timex(const xml::Node& el, std::optional<Span> span,
                                   std::string surface) {
  AttrReader attrs(el);
  TimexAnnotation t;
  t.tid = attrs.require("tid");
  std::string type = attrs.require("type");
  if (auto parsed = timex_type_from(type)) t.type = *parsed;
  else element_error(el, "BAD_TIMEX_TYPE", "unknown TIMEX3 type '" + type + "'");
  t.value = attrs.require("value");
  if (const std::string* v = attrs.get("functionInDocument")) t.function_in_document = *v;
  if (const std::string* v = attrs.get("temporalFunction")) {
    if (iequals(*v, "true")) t.temporal_function = true;
    else if (iequals(*v, "false")) t.temporal_function = false;
    else element_error(el, "BAD_ATTRIBUTE_VALUE", "temporalFunction must be true or false");
  }
  t.span = span;
  t.surface = std::move(surface);
  t.extras = attrs.extras();
  return t;
}

inline EventAnnotation parse_event(const xml::Node& el, Span span, std::string surface) {
  AttrReader attrs(el);
  EventAnnotation e;
  e.eid = attrs.require("eid");
  e.eiid = attrs.require("eiid");
  e.eclass = attrs.require("class");
  if (const std::string* v = attrs.get("tense")) e.tense = *v;
  if (const std::string* v = attrs.get("aspect")) e.aspect = *v;
  if (const std::string* v = attrs.get("polarity")) e.polarity = *v;
  if (const std::string* v = attrs.get("modality")) e.modality = *v;
  if (const std::string* v = attrs.get("pos")) e.pos = *v;
  e.span = span;
  e.surface = std::move(surface);
  e.extras = attrs.extras();
  return e;
}

inline TemporalLink parse_tlink(const xml::Node& el) {
  AttrReader attrs(el);
  TemporalLink l;
  l.lid = attrs.require("lid");
  std::string rel = attrs.require("relType");
  if (auto parsed = relation_from(rel)) l.relation = *parsed;
  else element_error(el, "BAD_RELATION_TYPE", "unknown relType '" + rel + "'");

  const std::string* src_event = attrs.get("eventInstanceID");
  const std::string* src_time = attrs.get("timeID");
  if (!!src_event == !!src_time)
    element_error(el, "BAD_TLINK_ENDPOINTS",
                  "<TLINK> needs exactly one of eventInstanceID or timeID");
  l.source = src_event ? *src_event : *src_time;

  const std::string* tgt_event = attrs.get("relatedToEventInstance");
  const std::string* tgt_time = attrs.get("relatedToTime");
  if (!!tgt_event == !!tgt_time)
    element_error(el, "BAD_TLINK_ENDPOINTS",
                  "<TLINK> needs exactly one of relatedToEventInstance or relatedToTime");
  l.target = tgt_event ? *tgt_event : *tgt_time;

  if (text_content(el).find_first_not_of(" \t\r\n") != std::string::npos)
    element_error(el, "UNEXPECTED_ELEMENT", "<TLINK> must be empty");
  l.extras = attrs.extras();
  return l;
}

inline void parse_dct(const xml::Node& el, AnnotatedDocument& doc) {
  bool seen_timex = false;
  std::string before, after;
  for (const auto& child : el.children) {
    if (const std::string* s = std::get_if<std::string>(&child)) {
      (seen_timex ? after : before) += *s;
      continue;
    }
    const xml::Node& n = std::get<xml::Node>(child);
    if (n.name != "TIMEX3")
      element_error(n, "UNEXPECTED_ELEMENT", "<DCT> may only contain a TIMEX3, found <" + n.name + ">");
    if (seen_timex)
      element_error(n, "BAD_DCT", "<DCT> contains more than one TIMEX3");
    seen_timex = true;
    doc.dct = parse_timex(n, std::nullopt, text_content(n));
  }
  if (!seen_timex) element_error(el, "MISSING_DCT", "<DCT> contains no TIMEX3");
  doc.dct_prefix = before;
  doc.dct_suffix = after;
}

inline void parse_text(const xml::Node& el, AnnotatedDocument& doc) {
  std::string text;
  std::size_t cp = 0;
  for (const auto& child : el.children) {
    if (const std::string* s = std::get_if<std::string>(&child)) {
      text += *s;
      cp += utf8::length(*s);
      continue;
    }
    const xml::Node& n = std::get<xml::Node>(child);
    if (n.name != "EVENT" && n.name != "TIMEX3")
      element_error(n, "UNEXPECTED_ELEMENT", "unexpected <" + n.name + "> inside TEXT");
    std::string inner = text_content(n);  // rejects nested markup
    Span span{cp, cp + utf8::length(inner)};
    if (n.name == "EVENT") doc.events.push_back(parse_event(n, span, inner));
    else doc.timexes.push_back(parse_timex(n, span, inner));
    text += inner;
    cp = span.end;
  }
  doc.text = std::move(text);
}

}  // namespace detail

// Parses one datafile. Throws ParseError for malformed markup or structural
// problems (the error code names the problem, e.g. MISSING_DOCID) and
// ModelError when the parsed content violates a model invariant.
inline AnnotatedDocument parse_document(std::string_view raw) {
  xml::Node root = xml::parse(raw);
  if (root.name != "TimeML")
    throw ParseError("UNEXPECTED_ELEMENT",
                     "root element must be <TimeML>, found <" + root.name + ">", root.line,
                     root.column);
  AnnotatedDocument doc;
  doc.root_attrs = root.attrs;
  std::sort(doc.root_attrs.begin(), doc.root_attrs.end());

  bool saw_docid = false, saw_extrainfo = false, saw_title = false, saw_dct = false,
       saw_text = false;
  auto once = [&](bool& flag, const xml::Node& el) {
    if (flag)
      detail::element_error(el, "UNEXPECTED_ELEMENT", "repeated <" + el.name + "> element");
    flag = true;
  };
  for (const auto& child : root.children) {
    if (const std::string* s = std::get_if<std::string>(&child)) {
      if (s->find_first_not_of(" \t\r\n") != std::string::npos)
        throw ParseError("UNEXPECTED_ELEMENT", "stray text outside elements", root.line,
                         root.column);
      continue;
    }
    const xml::Node& el = std::get<xml::Node>(child);
    if (el.name == "DOCID") {
      once(saw_docid, el);
      doc.doc_id = detail::text_content(el);
    } else if (el.name == "EXTRAINFO") {
      once(saw_extrainfo, el);
      doc.extra_info = detail::text_content(el);
    } else if (el.name == "TITLE") {
      once(saw_title, el);
      doc.title = detail::text_content(el);
    } else if (el.name == "DCT") {
      once(saw_dct, el);
      detail::parse_dct(el, doc);
    } else if (el.name == "TEXT") {
      once(saw_text, el);
      detail::parse_text(el, doc);
    } else if (el.name == "TLINK") {
      doc.links.push_back(detail::parse_tlink(el));
    } else {
      detail::element_error(el, "UNEXPECTED_ELEMENT", "unexpected <" + el.name + "> element");
    }
  }
  if (!saw_docid) throw ParseError("MISSING_DOCID", "document has no DOCID element");
  if (!saw_dct) throw ParseError("MISSING_DCT", "document has no DCT element");
  if (!saw_text) throw ParseError("MISSING_TEXT", "document has no TEXT element");
  check_document(doc);
  return doc;
}

// ---------------------------------------------------------------------------
// Serialization. Canonical element order, attributes sorted by name, inline
// entities re-embedded at their spans. parse(serialize(doc)) == doc holds on
// the model; whitespace outside TEXT is not preserved byte-for-byte.

namespace detail {

inline void render_attrs(std::string& out, std::vector<std::pair<std::string, std::string>> attrs) {
  std::sort(attrs.begin(), attrs.end());
  for (const auto& [k, v] : attrs) out += " " + k + "=\"" + xml::escape_attr(v) + "\"";
}

inline std::string timex_tag(const TimexAnnotation& t) {
  std::vector<std::pair<std::string, std::string>> attrs(t.extras.begin(), t.extras.end());
  attrs.emplace_back("tid", t.tid);
  attrs.emplace_back("type", std::string(to_string(t.type)));
  attrs.emplace_back("value", t.value);
  if (t.function_in_document) attrs.emplace_back("functionInDocument", *t.function_in_document);
  if (t.temporal_function) attrs.emplace_back("temporalFunction", *t.temporal_function ? "true" : "false");
  std::string out = "<TIMEX3";
  render_attrs(out, std::move(attrs));
  out += ">" + xml::escape_text(t.surface) + "</TIMEX3>";
  return out;
}

inline std::string event_tag(const EventAnnotation& e) {
  std::vector<std::pair<std::string, std::string>> attrs(e.extras.begin(), e.extras.end());
  attrs.emplace_back("eid", e.eid);
  attrs.emplace_back("eiid", e.eiid);
  attrs.emplace_back("class", e.eclass);
  if (e.tense) attrs.emplace_back("tense", *e.tense);
  if (e.aspect) attrs.emplace_back("aspect", *e.aspect);
  if (e.polarity) attrs.emplace_back("polarity", *e.polarity);
  if (e.modality) attrs.emplace_back("modality", *e.modality);
  if (e.pos) attrs.emplace_back("pos", *e.pos);
  std::string out = "<EVENT";
  render_attrs(out, std::move(attrs));
  out += ">" + xml::escape_text(e.surface) + "</EVENT>";
  return out;
}

inline std::string tlink_tag(const AnnotatedDocument& doc, const TemporalLink& l) {
  std::vector<std::pair<std::string, std::string>> attrs(l.extras.begin(), l.extras.end());
  attrs.emplace_back("lid", l.lid);
  attrs.emplace_back("relType", std::string(to_string(l.relation)));
  EntityHandle src = resolve_endpoint(doc, l.source, l.lid);
  EntityHandle tgt = resolve_endpoint(doc, l.target, l.lid);
  attrs.emplace_back(src.is_event() ? "eventInstanceID" : "timeID", l.source);
  attrs.emplace_back(tgt.is_event() ? "relatedToEventInstance" : "relatedToTime", l.target);
  std::string out = "<TLINK";
  render_attrs(out, std::move(attrs));
  out += "/>";
  return out;
}

}  // namespace detail

inline std::string serialize_document(const AnnotatedDocument& doc) {
  check_document(doc);  // overlapping or out-of-range spans cannot be embedded

  struct Inline {
    Span span;
    bool is_event;
    std::size_t index;
  };
  std::vector<Inline> inlines;
  for (std::size_t i = 0; i < doc.timexes.size(); ++i) {
    if (doc.timexes[i].span) inlines.push_back({*doc.timexes[i].span, false, i});
  }
  for (std::size_t i = 0; i < doc.events.size(); ++i)
    inlines.push_back({doc.events[i].span, true, i});
  std::sort(inlines.begin(), inlines.end(),
            [](const Inline& a, const Inline& b) { return a.span < b.span; });

  std::string out = "<?xml version=\"1.0\" ?>\n";
  out += "<TimeML";
  detail::render_attrs(out, doc.root_attrs);
  out += ">\n";
  out += "<DOCID>" + xml::escape_text(doc.doc_id) + "</DOCID>\n";
  if (doc.extra_info) out += "<EXTRAINFO>" + xml::escape_text(*doc.extra_info) + "</EXTRAINFO>\n";
  if (doc.title) out += "<TITLE>" + xml::escape_text(*doc.title) + "</TITLE>\n";
  out += "<DCT>" + xml::escape_text(doc.dct_prefix) + detail::timex_tag(doc.dct) +
         xml::escape_text(doc.dct_suffix) + "</DCT>\n";

  out += "<TEXT>";
  std::size_t cursor = 0;
  for (const auto& item : inlines) {
    out += xml::escape_text(utf8::slice(doc.text, cursor, item.span.start));
    out += item.is_event ? detail::event_tag(doc.events[item.index])
                         : detail::timex_tag(doc.timexes[item.index]);
    cursor = item.span.end;
  }
  out += xml::escape_text(utf8::slice(doc.text, cursor, utf8::length(doc.text)));
  out += "</TEXT>\n";

  for (const auto& l : doc.links) out += detail::tlink_tag(doc, l) + "\n";
  out += "</TimeML>\n";
  return out;
}

// ---------------------------------------------------------------------------
// Validation.
//
// Issue codes:
//   ERROR:   MISSING_DOCID, MISSING_DCT, MISSING_TEXT, MISSING_ATTRIBUTE,
//            MALFORMED_XML, UNEXPECTED_ELEMENT, BAD_DCT, BAD_TIMEX_TYPE,
//            BAD_RELATION_TYPE, BAD_ATTRIBUTE_VALUE, BAD_TLINK_ENDPOINTS,
//            DUPLICATE_ID, DANGLING_REF, SELF_LINK, OVERLAPPING_SPANS,
//            SPAN_OUT_OF_RANGE, SURFACE_MISMATCH, EMPTY_TIMEX_VALUE,
//            EMPTY_EVENT_CLASS
//   WARNING: BAD_ID_SHAPE, BAD_TIMEX_VALUE_SHAPE, EVENT_MISSING_DCT_LINK,
//            EMPTY_CORPUS
//
// The parse-level codes surface through thrown ParseError/ModelError; this
// function covers everything checkable on a constructed document.

enum class ValidationProfile { STRUCTURAL, GOLD };

inline std::vector<ValidationIssue> validate_document(const AnnotatedDocument& doc,
                                                      ValidationProfile profile) {
  std::vector<ValidationIssue> issues = model_issues(doc);
  auto warn = [&](std::string code, std::string id, std::string message) {
    issues.push_back(
        {Severity::WARNING, std::move(code), std::move(message), {doc.doc_id, std::move(id)}});
  };

  auto check_value = [&](const TimexAnnotation& t) {
    if (!t.value.empty() && !value_shape_ok(t.value))
      warn("BAD_TIMEX_VALUE_SHAPE", t.tid, "timex value \"" + t.value + "\" is not ISO-shaped");
  };
  check_value(doc.dct);
  for (const auto& t : doc.timexes) check_value(t);

  if (profile == ValidationProfile::GOLD) {
    for (const auto& e : doc.events) {
      bool linked = false;
      for (const auto& l : doc.links) {
        if ((l.source == e.eiid && l.target == doc.dct.tid) ||
            (l.target == e.eiid && l.source == doc.dct.tid)) {
          linked = true;
          break;
        }
      }
      if (!linked)
        warn("EVENT_MISSING_DCT_LINK", e.eiid,
             "event instance " + e.eiid + " has no link to the creation time " + doc.dct.tid);
    }
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Corpus loading.

struct LoadedDocument {
  std::string path;
  std::string filename;
  AnnotatedDocument doc;
};

struct LoadFailure {
  std::string path;
  std::string message;
};

struct CorpusLoad {
  std::vector<LoadedDocument> documents;  // lexicographic filename order
  std::vector<LoadFailure> failures;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return std::move(buf).str();
}

// Parses every *.tml file under `dir` in lexicographic filename order.
// Per-file failures are collected, not fatal.
inline CorpusLoad load_corpus(const std::string& dir, int jobs = 0, bool recursive = false) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir + " is not a readable directory");

  std::vector<fs::path> files;
  auto consider = [&](const fs::directory_entry& entry) {
    if (entry.is_regular_file() && entry.path().extension() == ".tml")
      files.push_back(entry.path());
  };
  if (recursive) {
    for (auto it = fs::recursive_directory_iterator(dir, ec);
         !ec && it != fs::recursive_directory_iterator(); ++it)
      consider(*it);
  } else {
    for (auto it = fs::directory_iterator(dir, ec); !ec && it != fs::directory_iterator(); ++it)
      consider(*it);
  }
  if (ec) throw IoError("cannot list " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

  std::vector<std::variant<LoadedDocument, LoadFailure>> slots(files.size(),
                                                               LoadFailure{"", "not parsed"});
  detail::parallel_for(files.size(), jobs, [&](std::size_t i) {
    const std::string path = files[i].generic_string();
    try {
      AnnotatedDocument doc = parse_document(read_file(path));
      slots[i] = LoadedDocument{path, files[i].filename().string(), std::move(doc)};
    } catch (const Error& e) {
      slots[i] = LoadFailure{path, e.what()};
    }
  });

  CorpusLoad out;
  for (auto& slot : slots) {
    if (auto* doc = std::get_if<LoadedDocument>(&slot)) out.documents.push_back(std::move(*doc));
    else out.failures.push_back(std::move(std::get<LoadFailure>(slot)));
  }
  return out;
}

}  // namespace tempoeval
