#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sentlen/sentlen.hpp"

#ifndef SENTLEN_DATA_DIR
#define SENTLEN_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Sentence-length series analysis over a directory of plain-text books"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Analyze every .txt book in a directory");
  std::string input_dir;
  std::string out_dir;
  std::string stopwords_path = std::string(SENTLEN_DATA_DIR) + "/stopwords_en.txt";
  std::string lemmas_path = std::string(SENTLEN_DATA_DIR) + "/lemmas_en.tsv";
  std::string format = "csv";
  sentlen::AnalysisConfig cfg;
  analyze->add_option("input_dir", input_dir, "Directory of UTF-8 .txt books")->required();
  analyze->add_option("--out", out_dir, "Output directory")->required();
  analyze->add_option("--stopwords", stopwords_path, "Stopword list, one word per line")->capture_default_str();
  analyze->add_option("--lemmas", lemmas_path, "Lemma lexicon, surface<TAB>lemma per line")->capture_default_str();
  analyze->add_option("--dfa-degree", cfg.dfa_degree, "DFA detrending degree")->capture_default_str()->check(CLI::PositiveNumber);
  analyze->add_option("--dfa-min", cfg.dfa_min_window, "Smallest DFA window")->capture_default_str();
  analyze->add_option("--dfa-max-frac", cfg.dfa_max_frac, "Largest DFA window as a fraction of N")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.25));
  analyze->add_option("--dfa-points", cfg.dfa_points, "Number of log-spaced window sizes")->capture_default_str();
  analyze->add_option("--seed", cfg.seed, "Seed for the shuffled DFA controls")->capture_default_str();
  analyze->add_option("--p-threshold", cfg.p_threshold, "Significance threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--min-sentences", cfg.min_sentences, "Skip books with fewer sentences")->capture_default_str();
  analyze->add_option("--histogram-bin", cfg.histogram_bin_width, "Sentence-count histogram bin width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  analyze->add_option("--format", format, "Structured record format")->capture_default_str()->check(
      CLI::IsMember({"csv", "json"}));
  analyze->add_option("--jobs", cfg.jobs, "Books analyzed in parallel (0 = hardware threads)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.stopwords = sentlen::StopwordList::load(stopwords_path);
    cfg.lexicon = sentlen::LemmaLexicon::load(lemmas_path);
    if (cfg.jobs == 0) cfg.jobs = std::max(1u, std::thread::hardware_concurrency());

    const auto result = sentlen::analyze_corpus(input_dir, cfg);
    sentlen::EmitOptions opts;
    opts.format = *sentlen::parse_format(format);
    sentlen::emit_reports(result.summary, result.reports, out_dir, opts);

    const auto& s = result.summary;
    std::fprintf(stderr, "analyzed %zu book(s), skipped %zu, %zu comparisons -> %s\n", s.book_count, s.skipped.size(),
                 s.comparison_count, out_dir.c_str());
    for (const auto& k : s.skipped) std::fprintf(stderr, "  skipped %s: %s\n", k.book_id.c_str(), k.reason.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sentlen: %s\n", e.what());
    return 1;
  }
}
