#pragma once

// Minimal XML reader for the datafile format: elements, attributes, character
// data, the five predefined character escapes plus numeric references,
// comments and a prolog. No namespaces-awareness, no CDATA, no processing
// instructions beyond the leading declaration. Positions are tracked for
// error messages (columns count scalar values).

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tempoeval/core.hpp"

namespace tempoeval::xml {

struct Node;
using Child = std::variant<std::string, Node>;  // text run | child element

struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;  // document order
  std::vector<Child> children;
  int line = 0;
  int column = 0;

  const std::string* attr(std::string_view name_) const {
    for (const auto& [k, v] : attrs)
      if (k == name_) return &v;
    return nullptr;
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  Node parse_document() {
    std::size_t bad = 0;
    if (!utf8::valid(in_, &bad))
      fail_at(bad, "invalid UTF-8 byte sequence");
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") advance(3);
    skip_prolog();
    if (eof()) fail("expected a root element");
    Node root = parse_element();
    skip_misc();
    if (!eof()) fail("trailing content after the root element");
    return root;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool eof() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < in_.size(); ++i, ++pos_) {
      unsigned char c = static_cast<unsigned char>(in_[pos_]);
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if (!utf8::is_continuation(c)) {
        ++col_;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("MALFORMED_XML", msg, line_, col_);
  }

  [[noreturn]] void fail_at(std::size_t byte_pos, const std::string& msg) {
    while (pos_ < byte_pos && !eof()) advance(1);
    fail(msg);
  }

  static bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

  void skip_ws() {
    while (!eof() && is_ws(peek())) advance(1);
  }

  void skip_comment() {
    advance(4);  // "<!--"
    while (!eof() && !starts_with("-->")) advance(1);
    if (eof()) fail("unterminated comment");
    advance(3);
  }

  void skip_prolog() {
    skip_ws();
    if (starts_with("<?xml")) {
      while (!eof() && !starts_with("?>")) advance(1);
      if (eof()) fail("unterminated XML declaration");
      advance(2);
    }
    skip_misc();
    if (starts_with("<!DOCTYPE")) {
      while (!eof() && peek() != '>') advance(1);
      if (eof()) fail("unterminated DOCTYPE");
      advance(1);
      skip_misc();
    }
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--"))
        skip_comment();
      else
        return;
    }
  }

  static bool name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':';
  }
  static bool name_char(char c) {
    return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  }

  std::string parse_name() {
    if (eof() || !name_start(peek())) fail("expected a name");
    std::size_t begin = pos_;
    while (!eof() && name_char(peek())) advance(1);
    return std::string(in_.substr(begin, pos_ - begin));
  }

  // Decodes one character reference starting at '&'.
  void parse_reference(std::string& out) {
    advance(1);  // '&'
    std::size_t begin = pos_;
    while (!eof() && peek() != ';' && pos_ - begin < 12) advance(1);
    if (eof() || peek() != ';') fail("unterminated character reference");
    std::string_view name = in_.substr(begin, pos_ - begin);
    advance(1);  // ';'
    if (name == "amp") out += '&';
    else if (name == "lt") out += '<';
    else if (name == "gt") out += '>';
    else if (name == "quot") out += '"';
    else if (name == "apos") out += '\'';
    else if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      std::string_view digits = name.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty numeric character reference");
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else fail("bad numeric character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) fail("character reference out of range");
      utf8::append_scalar(out, cp);
    } else {
      fail("unknown entity reference '&" + std::string(name) + ";'");
    }
  }

  std::string parse_attr_value() {
    char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected a quoted attribute value");
    advance(1);
    std::string out;
    while (!eof() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') parse_reference(out);
      else {
        out += peek();
        advance(1);
      }
    }
    if (eof()) fail("unterminated attribute value");
    advance(1);
    return out;
  }

  Node parse_element() {
    if (peek() != '<') fail("expected an element");
    Node node;
    node.line = line_;
    node.column = col_;
    advance(1);
    node.name = parse_name();
    for (;;) {
      bool had_ws = !eof() && is_ws(peek());
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '>') {
        advance(1);
        break;
      }
      if (starts_with("/>")) {
        advance(2);
        return node;
      }
      if (!had_ws) fail("expected whitespace before attribute");
      std::string name = parse_name();
      for (const auto& [k, v] : node.attrs)
        if (k == name) fail("duplicate attribute '" + name + "'");
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      advance(1);
      skip_ws();
      node.attrs.emplace_back(std::move(name), parse_attr_value());
    }
    // Content.
    std::string text;
    auto flush = [&] {
      if (!text.empty()) {
        node.children.emplace_back(std::move(text));
        text.clear();
      }
    };
    for (;;) {
      if (eof()) fail("unterminated element <" + node.name + ">");
      if (starts_with("<!--")) {
        skip_comment();
        continue;
      }
      if (starts_with("</")) {
        flush();
        advance(2);
        std::string name = parse_name();
        if (name != node.name)
          fail("mismatched end tag </" + name + "> for <" + node.name + ">");
        skip_ws();
        if (eof() || peek() != '>') fail("malformed end tag");
        advance(1);
        return node;
      }
      if (starts_with("<![")) fail("CDATA sections are not supported");
      if (starts_with("<?")) fail("processing instructions are not supported");
      if (peek() == '<') {
        flush();
        node.children.emplace_back(parse_element());
        continue;
      }
      if (peek() == '&') {
        parse_reference(text);
        continue;
      }
      text += peek();
      advance(1);
    }
  }
};

}  // namespace detail

// Parses one document; the result is the root element. Throws ParseError.
inline Node parse(std::string_view input) { return detail::Reader(input).parse_document(); }

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

inline std::string escape_attr(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

}  // namespace tempoeval::xml
