#pragma once

// Corpus orchestration: per-book analysis of the 15 measure pairs plus six
// DFA estimates, and the corpus-level reduction over finished books.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "sentlen/correlation.hpp"
#include "sentlen/dfa.hpp"
#include "sentlen/distribution.hpp"
#include "sentlen/error.hpp"
#include "sentlen/series.hpp"
#include "sentlen/text.hpp"

namespace sentlen {

inline constexpr std::size_t kPairCount = kMeasureCount * (kMeasureCount - 1) / 2;

struct AnalysisConfig {
  StopwordList stopwords;
  LemmaLexicon lexicon;
  int dfa_degree = 1;
  std::size_t dfa_min_window = 8;
  double dfa_max_frac = 0.25;
  std::size_t dfa_points = 16;
  std::uint64_t seed = 1;
  double p_threshold = kDefaultSignificance;
  std::size_t min_sentences = 200;
  std::size_t jobs = 1;
  std::size_t histogram_bin_width = 1000;
};

struct ComparisonResult {
  MeasureKind first = MeasureKind::Words;
  MeasureKind second = MeasureKind::Chars;
  PearsonResult pearson;
  RankTestResult spearman;
  RankTestResult kendall;
  RankTestResult gamma;
  KsResult ks_plain;   // mean-normalized
  KsResult ks_mapped;  // least-squares map of first onto second
  LinearMap linear_map;
};

struct BookReport {
  std::string book_id;
  std::size_t sentence_count = 0;
  std::vector<ComparisonResult> comparisons;
  std::array<HurstEstimate, kMeasureCount> hurst{};
  std::array<FluctuationCurve, kMeasureCount> curves{};
  std::array<LengthSeries, kMeasureCount> series{};
  std::optional<StretchedExpFit> words_ccdf_fit;
  std::vector<std::size_t> window_sizes;
  std::uint64_t shuffle_seed = 0;
  double max_abs_delta_h = 0.0;
};

struct SkippedBook {
  std::string book_id;
  std::string path;
  std::string reason;
};

using BookOutcome = std::variant<BookReport, SkippedBook>;

// Upper-triangular 6x6 table; cells with first >= second stay empty.
using PairTable = std::array<std::array<std::optional<double>, kMeasureCount>, kMeasureCount>;

struct CorpusSummary {
  std::size_t book_count = 0;
  std::size_t comparison_count = 0;
  std::vector<SkippedBook> skipped;
  std::size_t histogram_bin_width = 1000;
  std::vector<std::size_t> sentence_count_histogram;  // bin i covers [i*w, (i+1)*w)
  std::vector<std::pair<double, double>> r_cdf;
  std::vector<std::pair<double, double>> kappa_plain_cdf;
  std::vector<std::pair<double, double>> kappa_mapped_cdf;
  std::vector<std::pair<double, double>> delta_h_cdf;
  PairTable ks_acceptance_plain{};   // percent accepted
  PairTable ks_acceptance_mapped{};  // percent accepted
  PairTable mean_pearson{};
  double mean_r = 0.0;
  double min_r = 0.0;
  double ks_plain_rate = 0.0;   // percent over all comparisons
  double ks_mapped_rate = 0.0;  // percent over all comparisons
  double rank_rejection_rate = 0.0;
  double mean_h = 0.0;
  double mean_h_shuffled = 0.0;
  std::optional<double> h_vs_length_r;
};

struct CorpusResult {
  CorpusSummary summary;
  std::vector<BookReport> reports;
};

// The 15 pairs in canonical order: (N_w,N_c), (N_w,N_l), ..., (N_Sc,N_Sl).
inline std::array<std::pair<MeasureKind, MeasureKind>, kPairCount> canonical_pairs() {
  std::array<std::pair<MeasureKind, MeasureKind>, kPairCount> out{};
  std::size_t k = 0;
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    for (std::size_t j = i + 1; j < kMeasureCount; ++j) out[k++] = {kAllMeasures[i], kAllMeasures[j]};
  }
  return out;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::vector<std::pair<double, double>> cdf_points(std::vector<double> values) {
  if (values.empty()) return {};
  return Ecdf(values).steps();
}

}  // namespace detail

// Shuffle seed for one series, independent of scheduling order.
inline std::uint64_t series_seed(std::uint64_t base, std::string_view book_id, MeasureKind kind) {
  return detail::splitmix(detail::splitmix(base ^ detail::fnv1a(book_id)) + index_of(kind));
}

inline ComparisonResult compare_series(const LengthSeries& a, const LengthSeries& b, double threshold) {
  const auto x = a.as_reals();
  const auto y = b.as_reals();
  ComparisonResult c;
  c.first = a.kind;
  c.second = b.kind;
  c.pearson = pearson(x, y);
  c.spearman = spearman(x, y, threshold);
  c.kendall = kendall_tau(x, y, threshold);
  c.gamma = goodman_kruskal_gamma(x, y, threshold);
  c.ks_plain = ks_mean_normalized(x, y, threshold);
  c.linear_map = fit_linear_map(x, y);
  c.ks_mapped = ks_two_sample(c.linear_map.apply(x), y, threshold);
  return c;
}

inline BookOutcome analyze_document(const Document& doc, const AnalysisConfig& config,
                                    const std::string& path = {}) {
  if (doc.sentence_count() < config.min_sentences) {
    return SkippedBook{doc.id, path,
                       "too short: " + std::to_string(doc.sentence_count()) + " sentences (minimum " +
                           std::to_string(config.min_sentences) + ")"};
  }
  BookReport r;
  r.book_id = doc.id;
  r.sentence_count = doc.sentence_count();
  r.series = extract_all(doc);
  try {
    for (const auto& [a, b] : canonical_pairs()) {
      r.comparisons.push_back(compare_series(r.series[index_of(a)], r.series[index_of(b)], config.p_threshold));
    }
    auto dfa = DfaConfig::log_spaced(doc.sentence_count(), config.dfa_degree, config.dfa_min_window,
                                     config.dfa_max_frac, config.dfa_points, config.seed);
    r.window_sizes = dfa.window_sizes;
    r.shuffle_seed = config.seed;
    for (auto k : kAllMeasures) {
      dfa.shuffle_seed = series_seed(config.seed, doc.id, k);
      const auto x = r.series[index_of(k)].as_reals();
      r.hurst[index_of(k)] = hurst_with_control(x, dfa, &r.curves[index_of(k)]);
    }
  } catch (const DegenerateInput& e) {
    return SkippedBook{doc.id, path, std::string("degenerate series: ") + e.what()};
  } catch (const InvalidArgument& e) {
    return SkippedBook{doc.id, path, std::string("invalid input: ") + e.what()};
  }
  try {
    r.words_ccdf_fit = fit_ccdf_stretched_exp(r.series[index_of(MeasureKind::Words)].as_reals());
  } catch (const Error&) {
    r.words_ccdf_fit.reset();
  }
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    for (std::size_t j = i + 1; j < kMeasureCount; ++j) {
      r.max_abs_delta_h = std::max(r.max_abs_delta_h, std::fabs(r.hurst[i].h - r.hurst[j].h));
    }
  }
  return r;
}

// Ingestion errors propagate; short or degenerate books come back skipped.
inline BookOutcome analyze_book(const std::filesystem::path& path, const AnalysisConfig& config) {
  const auto doc = load_document(path, config.stopwords, config.lexicon);
  return analyze_document(doc, config, path.string());
}

// Pearson r between sentence count and the N_w scale exponent across books.
inline double hurst_length_correlation(const std::vector<BookReport>& reports) {
  if (reports.size() < 3) throw InvalidArgument("hurst_length_correlation: need at least 3 books");
  std::vector<double> n, h;
  for (const auto& r : reports) {
    n.push_back(static_cast<double>(r.sentence_count));
    h.push_back(r.hurst[index_of(MeasureKind::Words)].h);
  }
  return pearson(n, h).r;
}

inline CorpusSummary summarize(const std::vector<BookReport>& reports, std::vector<SkippedBook> skipped,
                               std::size_t bin_width = 1000) {
  if (bin_width == 0) throw InvalidArgument("histogram bin width must be positive");
  CorpusSummary s;
  s.book_count = reports.size();
  s.skipped = std::move(skipped);
  s.histogram_bin_width = bin_width;

  std::vector<double> rs, kp, km, dh;
  std::array<std::array<std::size_t, kMeasureCount>, kMeasureCount> acc_plain{}, acc_mapped{};
  std::array<std::array<double, kMeasureCount>, kMeasureCount> r_sum{};
  std::size_t plain_ok = 0, mapped_ok = 0, rank_rejections = 0;
  double h_sum = 0, hs_sum = 0;

  for (const auto& book : reports) {
    const auto bin = book.sentence_count / bin_width;
    if (s.sentence_count_histogram.size() <= bin) s.sentence_count_histogram.resize(bin + 1, 0);
    ++s.sentence_count_histogram[bin];
    for (const auto& c : book.comparisons) {
      const auto i = index_of(c.first), j = index_of(c.second);
      rs.push_back(c.pearson.r);
      kp.push_back(c.ks_plain.kappa);
      km.push_back(c.ks_mapped.kappa);
      dh.push_back(std::fabs(book.hurst[i].h - book.hurst[j].h));
      acc_plain[i][j] += c.ks_plain.accepted;
      acc_mapped[i][j] += c.ks_mapped.accepted;
      plain_ok += c.ks_plain.accepted;
      mapped_ok += c.ks_mapped.accepted;
      rank_rejections += c.spearman.rejected() + c.kendall.rejected() + c.gamma.rejected();
      r_sum[i][j] += c.pearson.r;
    }
    for (const auto& h : book.hurst) {
      h_sum += h.h;
      hs_sum += h.h_shuffled;
    }
  }
  s.comparison_count = rs.size();
  if (!rs.empty()) {
    const double nb = static_cast<double>(reports.size());
    for (const auto& [a, b] : canonical_pairs()) {
      const auto i = index_of(a), j = index_of(b);
      s.ks_acceptance_plain[i][j] = 100.0 * static_cast<double>(acc_plain[i][j]) / nb;
      s.ks_acceptance_mapped[i][j] = 100.0 * static_cast<double>(acc_mapped[i][j]) / nb;
      s.mean_pearson[i][j] = r_sum[i][j] / nb;
    }
    const double nc = static_cast<double>(rs.size());
    s.mean_r = detail::mean(rs);
    s.min_r = *std::min_element(rs.begin(), rs.end());
    s.ks_plain_rate = 100.0 * static_cast<double>(plain_ok) / nc;
    s.ks_mapped_rate = 100.0 * static_cast<double>(mapped_ok) / nc;
    s.rank_rejection_rate = 100.0 * static_cast<double>(rank_rejections) / (3.0 * nc);
    s.mean_h = h_sum / (nb * kMeasureCount);
    s.mean_h_shuffled = hs_sum / (nb * kMeasureCount);
  }
  s.r_cdf = detail::cdf_points(std::move(rs));
  s.kappa_plain_cdf = detail::cdf_points(std::move(kp));
  s.kappa_mapped_cdf = detail::cdf_points(std::move(km));
  s.delta_h_cdf = detail::cdf_points(std::move(dh));
  try {
    s.h_vs_length_r = hurst_length_correlation(reports);
  } catch (const Error&) {
    s.h_vs_length_r.reset();
  }
  return s;
}

// Every regular `*.txt` file directly inside dir, sorted by name.
inline std::vector<std::filesystem::path> list_books(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw InvalidArgument("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt" && !e.path().filename().string().starts_with(".")) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw InvalidArgument("no .txt books in " + dir.string());
  return out;
}

// Books run in parallel on config.jobs threads; per-book failures are
// recorded as skips. Output order is by book id regardless of scheduling.
inline CorpusResult analyze_corpus(const std::filesystem::path& dir, const AnalysisConfig& config) {
  const auto books = list_books(dir);
  std::vector<std::optional<BookOutcome>> outcomes(books.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < books.size(); i = next++) {
      try {
        outcomes[i] = analyze_book(books[i], config);
      } catch (const std::exception& e) {
        outcomes[i] = SkippedBook{books[i].stem().string(), books[i].string(), e.what()};
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, books.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  CorpusResult result;
  std::vector<SkippedBook> skipped;
  for (auto& o : outcomes) {
    if (auto* r = std::get_if<BookReport>(&*o)) {
      result.reports.push_back(std::move(*r));
    } else {
      skipped.push_back(std::get<SkippedBook>(std::move(*o)));
    }
  }
  auto by_id = [](const auto& a, const auto& b) { return a.book_id < b.book_id; };
  std::sort(result.reports.begin(), result.reports.end(), by_id);
  std::sort(skipped.begin(), skipped.end(), by_id);
  result.summary = summarize(result.reports, std::move(skipped), config.histogram_bin_width);
  return result;
}

}  // namespace sentlen
