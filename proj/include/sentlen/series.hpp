#pragma once

// The six sentence-length series of a book.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentlen/error.hpp"
#include "sentlen/text.hpp"
#include "sentlen/utf8.hpp"

namespace sentlen {

enum class MeasureKind : std::uint8_t {
  Words,              // N_w
  Chars,              // N_c
  LemmaChars,         // N_l
  NonStopWords,       // N_Sw
  NonStopChars,       // N_Sc
  NonStopLemmaChars,  // N_Sl
};

inline constexpr std::size_t kMeasureCount = 6;

// Canonical order.
inline constexpr std::array<MeasureKind, kMeasureCount> kAllMeasures{
    MeasureKind::Words,        MeasureKind::Chars,        MeasureKind::LemmaChars,
    MeasureKind::NonStopWords, MeasureKind::NonStopChars, MeasureKind::NonStopLemmaChars};

constexpr std::size_t index_of(MeasureKind k) noexcept { return static_cast<std::size_t>(k); }

constexpr std::string_view name_of(MeasureKind k) noexcept {
  switch (k) {
    case MeasureKind::Words: return "N_w";
    case MeasureKind::Chars: return "N_c";
    case MeasureKind::LemmaChars: return "N_l";
    case MeasureKind::NonStopWords: return "N_Sw";
    case MeasureKind::NonStopChars: return "N_Sc";
    case MeasureKind::NonStopLemmaChars: return "N_Sl";
  }
  return "?";
}

inline std::optional<MeasureKind> parse_measure(std::string_view name) {
  for (auto k : kAllMeasures) {
    if (name_of(k) == name) return k;
  }
  return std::nullopt;
}

constexpr bool counts_characters(MeasureKind k) noexcept {
  return k != MeasureKind::Words && k != MeasureKind::NonStopWords;
}

struct LengthSeries {
  std::string book_id;
  MeasureKind kind = MeasureKind::Words;
  std::vector<std::int64_t> values;

  std::size_t size() const noexcept { return values.size(); }

  std::vector<double> as_reals() const { return {values.begin(), values.end()}; }
};

inline std::int64_t measure_sentence(const Sentence& s, MeasureKind kind) {
  std::int64_t n = 0;
  const bool skip_stops = kind == MeasureKind::NonStopWords || kind == MeasureKind::NonStopChars ||
                          kind == MeasureKind::NonStopLemmaChars;
  for (const auto& t : s.tokens) {
    if (skip_stops && t.stopword) continue;
    switch (kind) {
      case MeasureKind::Words:
      case MeasureKind::NonStopWords:
        n += 1;
        break;
      case MeasureKind::Chars:
      case MeasureKind::NonStopChars:
        n += static_cast<std::int64_t>(utf8::length(t.surface));
        break;
      case MeasureKind::LemmaChars:
      case MeasureKind::NonStopLemmaChars:
        n += static_cast<std::int64_t>(utf8::length(t.lemma));
        break;
    }
  }
  return n;
}

inline LengthSeries extract_series(const Document& doc, MeasureKind kind) {
  LengthSeries out{doc.id, kind, {}};
  out.values.reserve(doc.sentence_count());
  for (const auto& s : doc.sentences) out.values.push_back(measure_sentence(s, kind));
  return out;
}

inline std::array<LengthSeries, kMeasureCount> extract_all(const Document& doc) {
  std::array<LengthSeries, kMeasureCount> out;
  for (auto k : kAllMeasures) out[index_of(k)] = extract_series(doc, k);
  return out;
}

// CSV `sentence_index,value`.
inline void write_series_csv(const LengthSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write " + path.string());
  out << "sentence_index,value\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) out << i << ',' << series.values[i] << '\n';
  if (!out) throw OutputError("write failed: " + path.string());
}

}  // namespace sentlen
