#pragma once

// Corpus statistics: token, document, entity and link counts plus a relation
// histogram. A token is a maximal run of non-whitespace characters in the
// tag-stripped TEXT and TITLE.

#include <map>
#include <string>
#include <string_view>

#include "tempoeval/core.hpp"
#include "tempoeval/timeml.hpp"

namespace tempoeval {

inline long long count_tokens(std::string_view s) {
  long long n = 0;
  bool in_token = false;
  for (char c : s) {
    bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!ws && !in_token) ++n;
    in_token = !ws;
  }
  return n;
}

struct CorpusStats {
  std::string directory;
  std::size_t documents = 0;
  long long tokens = 0;
  long long events = 0;
  long long timexes = 0;  // body timexes; the per-document DCT is counted apart
  long long dcts = 0;
  long long links = 0;
  std::map<std::string, long long> relations;
  std::size_t failures = 0;
};

inline CorpusStats corpus_stats(const CorpusLoad& load, const std::string& directory) {
  CorpusStats s;
  s.directory = directory;
  s.documents = load.documents.size();
  s.failures = load.failures.size();
  for (const auto& entry : load.documents) {
    const AnnotatedDocument& doc = entry.doc;
    s.tokens += count_tokens(doc.text);
    if (doc.title) s.tokens += count_tokens(*doc.title);
    s.events += static_cast<long long>(doc.events.size());
    s.timexes += static_cast<long long>(doc.timexes.size());
    s.dcts += 1;
    s.links += static_cast<long long>(doc.links.size());
    for (const auto& l : doc.links) s.relations[std::string(to_string(l.relation))] += 1;
  }
  return s;
}

}  // namespace tempoeval
