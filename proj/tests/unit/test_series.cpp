#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sentlen/series.hpp"

using namespace sentlen;

namespace {

Document excerpt() {
  return load_document(SENTLEN_FIXTURES "/sherlock_opening.txt", StopwordList::load(SENTLEN_DATA_DIR "/stopwords_en.txt"),
                       LemmaLexicon::load(SENTLEN_FIXTURES "/sherlock_lemmas.tsv"));
}

}  // namespace

TEST_CASE("measure names and parsing round-trip") {
  for (auto k : kAllMeasures) {
    const auto parsed = parse_measure(name_of(k));
    REQUIRE(parsed);
    CHECK(*parsed == k);
  }
  CHECK_FALSE(parse_measure("N_x"));
  CHECK(index_of(MeasureKind::Words) == 0);
  CHECK(index_of(MeasureKind::NonStopLemmaChars) == 5);
  CHECK_FALSE(counts_characters(MeasureKind::NonStopWords));
  CHECK(counts_characters(MeasureKind::LemmaChars));
}

TEST_CASE("first Sherlock sentence measures") {
  const auto doc = excerpt();
  const auto& s = doc.sentences.at(0);
  CHECK(measure_sentence(s, MeasureKind::Words) == 8);
  CHECK(measure_sentence(s, MeasureKind::NonStopWords) == 4);
  CHECK(measure_sentence(s, MeasureKind::Chars) == 35);
  // "be" replaces "is": same length
  CHECK(measure_sentence(s, MeasureKind::LemmaChars) == 35);
  CHECK(measure_sentence(s, MeasureKind::NonStopChars) == 8 + 6 + 6 + 5);
  CHECK(measure_sentence(s, MeasureKind::NonStopLemmaChars) == 25);
}

TEST_CASE("Sherlock excerpt gives six aligned series of length 4") {
  const auto all = extract_all(excerpt());
  for (auto k : kAllMeasures) {
    CHECK(all[index_of(k)].kind == k);
    CHECK(all[index_of(k)].size() == 4);
    CHECK(all[index_of(k)].book_id == "sherlock_opening");
  }
  // sentence 3: "In his eyes she eclipses and predominates the whole of her sex"
  CHECK(all[index_of(MeasureKind::Words)].values[2] == 12);
  CHECK(all[index_of(MeasureKind::NonStopWords)].values[2] == 5);
  CHECK(all[index_of(MeasureKind::NonStopChars)].values[2] == 4 + 8 + 12 + 5 + 3);
  CHECK(all[index_of(MeasureKind::NonStopLemmaChars)].values[2] == 3 + 7 + 11 + 5 + 3);
}

TEST_CASE("empty document gives six empty series") {
  Document d{"empty", {}};
  for (const auto& s : extract_all(d)) CHECK(s.values.empty());
}

TEST_CASE("a sentence of only stopwords keeps a zero in the non-stop series") {
  const auto stops = StopwordList::load(SENTLEN_DATA_DIR "/stopwords_en.txt");
  const auto doc = build_document("z", "It was the. Big dog.", stops, LemmaLexicon{});
  const auto all = extract_all(doc);
  CHECK(all[index_of(MeasureKind::Words)].values == std::vector<std::int64_t>{3, 2});
  CHECK(all[index_of(MeasureKind::NonStopWords)].values == std::vector<std::int64_t>{0, 2});
  CHECK(all[index_of(MeasureKind::NonStopChars)].values == std::vector<std::int64_t>{0, 6});
}

TEST_CASE("characters are counted as code points") {
  const auto doc = build_document("u", "Naïve café.", StopwordList{}, LemmaLexicon{});
  CHECK(extract_series(doc, MeasureKind::Chars).values == std::vector<std::int64_t>{9});
}

TEST_CASE("series invariants on random text") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words{"the", "cat", "sat", "on", "a", "mat", "and", "dreamed", "of", "fish"};
  const auto stops = StopwordList::load(SENTLEN_DATA_DIR "/stopwords_en.txt");
  LemmaLexicon lex;
  lex.add("dreamed", "dream");
  for (int trial = 0; trial < 50; ++trial) {
    std::ostringstream text;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      text << words[rng() % words.size()];
      text << ((rng() % 5 == 0) ? ". " : " ");
    }
    const auto doc = build_document("r", text.str(), stops, lex);
    const auto all = extract_all(doc);
    for (std::size_t i = 0; i < doc.sentence_count(); ++i) {
      const auto w = all[index_of(MeasureKind::Words)].values[i];
      const auto c = all[index_of(MeasureKind::Chars)].values[i];
      const auto sw = all[index_of(MeasureKind::NonStopWords)].values[i];
      const auto sc = all[index_of(MeasureKind::NonStopChars)].values[i];
      CHECK(w >= 1);
      CHECK(c >= w);
      CHECK(sw <= w);
      CHECK(sc <= c);
      CHECK(sc >= sw);
    }
    for (const auto& s : all) CHECK(s.size() == doc.sentence_count());
  }
}

TEST_CASE("series CSV export") {
  const auto all = extract_all(excerpt());
  const auto path = std::filesystem::temp_directory_path() / "sentlen_series.csv";
  write_series_csv(all[0], path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "sentence_index,value\n0,8\n1,11\n2,12\n3,14\n");
  CHECK_THROWS_AS(write_series_csv(all[0], "/nonexistent_dir/x.csv"), OutputError);
}
