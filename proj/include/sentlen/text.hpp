#pragma once

// Text pipeline: raw UTF-8 -> sentences -> tokens, with stopword marking and
// lexicon lemmatization.
//
// Every '.', '!' and '?' ends a sentence; abbreviations are not special-cased.
// A run of terminators is one boundary and segments without any word
// character are dropped. A trailing unterminated segment is kept.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sentlen/error.hpp"
#include "sentlen/utf8.hpp"

namespace sentlen {

struct Token {
  std::string surface;     // as written, edge punctuation stripped
  std::string normalized;  // lowercased surface
  std::string lemma;       // lexicon lemma of normalized, or normalized
  bool stopword = false;
};

struct Sentence {
  std::vector<Token> tokens;
  std::size_t index = 0;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  std::size_t sentence_count() const noexcept { return sentences.size(); }
};

class StopwordList {
 public:
  StopwordList() = default;

  // Entries are lowercased on insertion; duplicates collapse.
  explicit StopwordList(const std::vector<std::string>& words) {
    for (const auto& w : words) insert(w);
  }

  static StopwordList load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(path.string(), "cannot open stopword file");
    StopwordList list;
    std::string line;
    while (std::getline(in, line)) {
      auto w = trim(line);
      if (!w.empty() && w.front() != '#') list.insert(w);
    }
    return list;
  }

  void insert(std::string_view w) { words_.insert(utf8::to_lower(w)); }
  bool contains(std::string_view normalized) const {
    return words_.find(std::string(normalized)) != words_.end();
  }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  static std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
  }

  std::unordered_set<std::string> words_;
};

class LemmaLexicon {
 public:
  LemmaLexicon() = default;

  // File format: `surface<TAB>lemma` per line, lowercase.
  static LemmaLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(path.string(), "cannot open lemma lexicon");
    LemmaLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
        throw IngestError(path.string(), "malformed lexicon line " + std::to_string(lineno));
      }
      lex.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return lex;
  }

  void add(std::string_view surface, std::string_view lemma) {
    auto key = utf8::to_lower(surface);
    auto value = utf8::to_lower(lemma);
    if (key.empty() || value.empty()) throw InvalidArgument("empty lexicon entry");
    map_[std::move(key)] = std::move(value);
  }

  // Lemma of a normalized form; the form itself when absent.
  const std::string& lookup(const std::string& normalized) const {
    auto it = map_.find(normalized);
    return it == map_.end() ? normalized : it->second;
  }

  bool contains(const std::string& normalized) const { return map_.count(normalized) > 0; }
  std::size_t size() const noexcept { return map_.size(); }

 private:
  std::unordered_map<std::string, std::string> map_;
};

namespace detail {

inline bool is_terminator(char32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

}  // namespace detail

// Splits text at sentence terminators. Malformed UTF-8 bytes are treated as
// non-word characters; load_document rejects such input before getting here.
inline std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t pos = 0;
  auto flush = [&](std::size_t end) {
    auto seg = text.substr(start, end - start);
    if (utf8::has_alnum(seg)) out.emplace_back(seg);
  };
  while (pos < text.size()) {
    auto d = utf8::decode(text, pos);
    const std::size_t len = d ? d->len : 1;
    if (d && detail::is_terminator(d->cp)) {
      flush(pos);
      pos += len;
      // swallow the rest of the terminator run
      while (pos < text.size() && detail::is_terminator(static_cast<unsigned char>(text[pos]))) ++pos;
      start = pos;
      continue;
    }
    pos += len;
  }
  flush(text.size());
  return out;
}

// Whitespace split, then leading/trailing non-alphanumerics stripped from each
// piece. Internal apostrophes and hyphens survive.
inline std::vector<Token> tokenize(std::string_view raw_sentence) {
  std::vector<Token> tokens;
  auto emit = [&](std::string_view piece) {
    // find first and last alnum code point
    std::size_t first = std::string_view::npos;
    std::size_t last_end = 0;
    std::size_t pos = 0;
    while (pos < piece.size()) {
      auto d = utf8::decode(piece, pos);
      const std::size_t len = d ? d->len : 1;
      if (d && utf8::is_alnum(d->cp)) {
        if (first == std::string_view::npos) first = pos;
        last_end = pos + len;
      }
      pos += len;
    }
    if (first == std::string_view::npos) return;
    Token t;
    t.surface = std::string(piece.substr(first, last_end - first));
    t.normalized = utf8::to_lower(t.surface);
    t.lemma = t.normalized;
    tokens.push_back(std::move(t));
  };

  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < raw_sentence.size()) {
    auto d = utf8::decode(raw_sentence, pos);
    const std::size_t len = d ? d->len : 1;
    if (d && utf8::is_space(d->cp)) {
      if (start != std::string_view::npos) emit(raw_sentence.substr(start, pos - start));
      start = std::string_view::npos;
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += len;
  }
  if (start != std::string_view::npos) emit(raw_sentence.substr(start));
  return tokens;
}

// Marks stopword status on every token in place.
inline void mark_stopwords(Sentence& sentence, const StopwordList& stops) {
  for (auto& t : sentence.tokens) t.stopword = stops.contains(t.normalized);
}

inline Sentence remove_stopwords(const Sentence& sentence, const StopwordList& stops) {
  Sentence out;
  out.index = sentence.index;
  for (const auto& t : sentence.tokens) {
    if (!stops.contains(t.normalized)) out.tokens.push_back(t);
  }
  return out;
}

inline Sentence lemmatize(const Sentence& sentence, const LemmaLexicon& lexicon) {
  Sentence out = sentence;
  for (auto& t : out.tokens) t.lemma = lexicon.lookup(t.normalized);
  return out;
}

// Runs the full pipeline over in-memory text. Tokens carry lemma and
// stopword status.
inline Document build_document(std::string id, std::string_view text, const StopwordList& stops,
                               const LemmaLexicon& lexicon) {
  Document doc;
  doc.id = std::move(id);
  for (auto& raw : segment_sentences(text)) {
    Sentence s;
    s.tokens = tokenize(raw);
    if (s.tokens.empty()) continue;
    s.index = doc.sentences.size();
    s = lemmatize(s, lexicon);
    mark_stopwords(s, stops);
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IngestError(path.string(), "read failure");
  std::string text = std::move(ss).str();
  if (auto bad = utf8::find_invalid(text)) {
    throw IngestError(path.string(), "invalid UTF-8 at byte " + std::to_string(*bad));
  }
  return text;
}

// Book id is the file stem.
inline Document load_document(const std::filesystem::path& path, const StopwordList& stops,
                              const LemmaLexicon& lexicon) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw IngestError(path.string(), "is a directory");
  auto text = read_text_file(path);
  std::string_view view = text;
  if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
  return build_document(path.stem().string(), view, stops, lexicon);
}

}  // namespace sentlen
