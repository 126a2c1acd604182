#pragma once

// Report files for a corpus run. Every number is written with six
// significant digits; file contents depend only on the reports passed in.
//
// Layout under out_dir:
//   books/<id>.{csv,json}          one structured record per book
//   summary.{csv,json}             corpus aggregates
//   comparisons.csv                every comparison record, all books
//   skipped.csv                    skip manifest
//   ks_acceptance_plain.csv        6x6 KS acceptance percentages, mean-normalized
//   ks_acceptance_mapped.csv       6x6 KS acceptance percentages, linear map
//   sentence_count_histogram.csv
//   pearson_r_cdf.csv
//   ks_kappa_plain_cdf.csv, ks_kappa_mapped_cdf.csv
//   hurst_delta_cdf.csv
//   plots/<id>/                    per-book plot inputs

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentlen/distribution.hpp"
#include "sentlen/error.hpp"
#include "sentlen/harness.hpp"

namespace sentlen {

enum class ReportFormat { Csv, Json };

inline std::optional<ReportFormat> parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  return std::nullopt;
}

inline std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson num6(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(fmt6(v).c_str(), nullptr);
}

inline ojson opt6(const std::optional<double>& v) { return v ? num6(*v) : ojson(nullptr); }

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class FileWriter {
 public:
  explicit FileWriter(std::filesystem::path path) : path_(std::move(path)) {}

  std::ostringstream& stream() { return buf_; }

  void commit() {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + path_.string());
    const auto s = buf_.str();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw OutputError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ostringstream buf_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  FileWriter w(path);
  w.stream() << text;
  w.commit();
}

inline void write_points_csv(const std::filesystem::path& path, std::string_view header,
                             const std::vector<std::pair<double, double>>& pts) {
  FileWriter w(path);
  w.stream() << header << '\n';
  for (const auto& [x, c] : pts) w.stream() << fmt6(x) << ',' << fmt6(c) << '\n';
  w.commit();
}

inline void write_table_csv(const std::filesystem::path& path, const PairTable& t) {
  FileWriter w(path);
  auto& os = w.stream();
  for (std::size_t j = 1; j < kMeasureCount; ++j) os << ',' << name_of(kAllMeasures[j]);
  os << '\n';
  for (std::size_t i = 0; i + 1 < kMeasureCount; ++i) {
    os << name_of(kAllMeasures[i]);
    for (std::size_t j = 1; j < kMeasureCount; ++j) {
      os << ',';
      if (t[i][j]) os << fmt6(*t[i][j]);
    }
    os << '\n';
  }
  w.commit();
}

inline ojson table_json(const PairTable& t) {
  ojson out = ojson::object();
  for (const auto& [a, b] : canonical_pairs()) {
    out[std::string(name_of(a)) + "/" + std::string(name_of(b))] = opt6(t[index_of(a)][index_of(b)]);
  }
  return out;
}

inline ojson cdf_json(const std::vector<std::pair<double, double>>& pts) {
  ojson arr = ojson::array();
  for (const auto& [x, c] : pts) arr.push_back({num6(x), num6(c)});
  return arr;
}

inline constexpr std::string_view kComparisonHeader =
    "book_id,first,second,pearson_r,spearman_rho,spearman_p,kendall_tau,kendall_p,gamma,gamma_p,"
    "ks_plain_kappa,ks_plain_p,ks_plain_accepted,ks_mapped_kappa,ks_mapped_p,ks_mapped_accepted,"
    "map_alpha,map_beta,sentence_count,h_first,h_second,h_shuffled_first,h_shuffled_second,abs_delta_h";

inline void comparison_row(std::ostream& os, const BookReport& b, const ComparisonResult& c) {
  const auto& hf = b.hurst[index_of(c.first)];
  const auto& hs = b.hurst[index_of(c.second)];
  os << csv_field(b.book_id) << ',' << name_of(c.first) << ',' << name_of(c.second) << ','
     << fmt6(c.pearson.r) << ',' << fmt6(c.spearman.statistic) << ',' << fmt6(c.spearman.p_value) << ','
     << fmt6(c.kendall.statistic) << ',' << fmt6(c.kendall.p_value) << ',' << fmt6(c.gamma.statistic) << ','
     << fmt6(c.gamma.p_value) << ',' << fmt6(c.ks_plain.kappa) << ',' << fmt6(c.ks_plain.p_value) << ','
     << (c.ks_plain.accepted ? 1 : 0) << ',' << fmt6(c.ks_mapped.kappa) << ',' << fmt6(c.ks_mapped.p_value) << ','
     << (c.ks_mapped.accepted ? 1 : 0) << ',' << fmt6(c.linear_map.alpha) << ',' << fmt6(c.linear_map.beta) << ','
     << b.sentence_count << ',' << fmt6(hf.h) << ',' << fmt6(hs.h) << ',' << fmt6(hf.h_shuffled) << ','
     << fmt6(hs.h_shuffled) << ',' << fmt6(std::fabs(hf.h - hs.h)) << '\n';
}

inline ojson rank_json(const RankTestResult& r) {
  return {{"statistic", num6(r.statistic)}, {"p_value", num6(r.p_value)}, {"rejected", r.rejected()}};
}

inline ojson ks_json(const KsResult& k) {
  return {{"kappa", num6(k.kappa)}, {"p_value", num6(k.p_value)}, {"accepted", k.accepted}};
}

inline ojson book_json(const BookReport& b) {
  ojson j;
  j["book_id"] = b.book_id;
  j["sentence_count"] = b.sentence_count;
  j["max_abs_delta_h"] = num6(b.max_abs_delta_h);
  j["shuffle_seed"] = b.shuffle_seed;
  j["dfa_window_sizes"] = b.window_sizes;
  ojson hurst = ojson::object();
  for (auto k : kAllMeasures) {
    const auto& h = b.hurst[index_of(k)];
    hurst[std::string(name_of(k))] = {{"h", num6(h.h)},
                                      {"intercept", num6(h.intercept)},
                                      {"fit_r2", num6(h.fit_r2)},
                                      {"fit_points", h.fit_points},
                                      {"h_shuffled", num6(h.h_shuffled)}};
  }
  j["hurst"] = std::move(hurst);
  ojson comps = ojson::array();
  for (const auto& c : b.comparisons) {
    comps.push_back({{"first", name_of(c.first)},
                     {"second", name_of(c.second)},
                     {"pearson_r", num6(c.pearson.r)},
                     {"spearman", rank_json(c.spearman)},
                     {"kendall", rank_json(c.kendall)},
                     {"gamma", rank_json(c.gamma)},
                     {"ks_plain", ks_json(c.ks_plain)},
                     {"ks_mapped", ks_json(c.ks_mapped)},
                     {"linear_map", {{"alpha", num6(c.linear_map.alpha)}, {"beta", num6(c.linear_map.beta)}}}});
  }
  j["comparisons"] = std::move(comps);
  if (b.words_ccdf_fit) {
    j["words_ccdf_fit"] = {{"mu", num6(b.words_ccdf_fit->mu)},
                           {"b", num6(b.words_ccdf_fit->b)},
                           {"fit_rmse", num6(b.words_ccdf_fit->fit_rmse)},
                           {"points", b.words_ccdf_fit->points}};
  } else {
    j["words_ccdf_fit"] = nullptr;
  }
  return j;
}

inline std::vector<std::pair<std::string, std::string>> summary_rows(const CorpusSummary& s) {
  std::vector<std::pair<std::string, std::string>> rows{
      {"book_count", std::to_string(s.book_count)},
      {"skipped_count", std::to_string(s.skipped.size())},
      {"comparison_count", std::to_string(s.comparison_count)},
      {"mean_pearson_r", fmt6(s.mean_r)},
      {"min_pearson_r", fmt6(s.min_r)},
      {"ks_plain_acceptance_pct", fmt6(s.ks_plain_rate)},
      {"ks_mapped_acceptance_pct", fmt6(s.ks_mapped_rate)},
      {"rank_test_rejection_pct", fmt6(s.rank_rejection_rate)},
      {"mean_h", fmt6(s.mean_h)},
      {"mean_h_shuffled", fmt6(s.mean_h_shuffled)},
      {"h_vs_length_r", s.h_vs_length_r ? fmt6(*s.h_vs_length_r) : std::string()},
      {"histogram_bin_width", std::to_string(s.histogram_bin_width)},
      {"ks_mapped_variant", "linear map only"},
  };
  return rows;
}

inline ojson summary_json(const CorpusSummary& s) {
  ojson j;
  j["book_count"] = s.book_count;
  j["skipped_count"] = s.skipped.size();
  j["comparison_count"] = s.comparison_count;
  j["mean_pearson_r"] = num6(s.mean_r);
  j["min_pearson_r"] = num6(s.min_r);
  j["ks_plain_acceptance_pct"] = num6(s.ks_plain_rate);
  j["ks_mapped_acceptance_pct"] = num6(s.ks_mapped_rate);
  j["ks_mapped_variant"] = "linear map only";
  j["rank_test_rejection_pct"] = num6(s.rank_rejection_rate);
  j["mean_h"] = num6(s.mean_h);
  j["mean_h_shuffled"] = num6(s.mean_h_shuffled);
  j["h_vs_length_r"] = opt6(s.h_vs_length_r);
  j["histogram_bin_width"] = s.histogram_bin_width;
  j["sentence_count_histogram"] = s.sentence_count_histogram;
  j["mean_pearson_table"] = table_json(s.mean_pearson);
  j["ks_acceptance_plain"] = table_json(s.ks_acceptance_plain);
  j["ks_acceptance_mapped"] = table_json(s.ks_acceptance_mapped);
  j["r_cdf"] = cdf_json(s.r_cdf);
  j["kappa_plain_cdf"] = cdf_json(s.kappa_plain_cdf);
  j["kappa_mapped_cdf"] = cdf_json(s.kappa_mapped_cdf);
  j["delta_h_cdf"] = cdf_json(s.delta_h_cdf);
  ojson skipped = ojson::array();
  for (const auto& k : s.skipped) skipped.push_back({{"book_id", k.book_id}, {"reason", k.reason}});
  j["skipped"] = std::move(skipped);
  return j;
}

inline void write_book_plots(const BookReport& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (auto k : kAllMeasures) {
    const auto name = std::string(name_of(k));
    const auto& series = b.series[index_of(k)];
    if (!series.values.empty()) {
      write_series_csv(series, dir / ("series_" + name + ".csv"));
      const auto x = series.as_reals();
      try {
        write_ecdf_csv(Ecdf(mean_normalize(x)), dir / ("ecdf_normalized_" + name + ".csv"));
      } catch (const DegenerateInput&) {
      }
    }
    if (!b.curves[index_of(k)].points.empty()) write_curve_csv(b.curves[index_of(k)], dir / ("dfa_" + name + ".csv"));
  }
  const auto& words = b.series[index_of(MeasureKind::Words)];
  if (!words.values.empty()) {
    const auto x = words.as_reals();
    write_ecdf_csv(Ecdf(x), dir / "ccdf_N_w.csv", true);
  }
}

}  // namespace detail

struct EmitOptions {
  ReportFormat format = ReportFormat::Csv;
  bool per_book_plots = true;
};

// Returns the paths written, in write order.
inline std::vector<std::filesystem::path> emit_reports(const CorpusSummary& summary,
                                                       const std::vector<BookReport>& reports,
                                                       const std::filesystem::path& out_dir,
                                                       const EmitOptions& options = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "books", ec);
  if (ec) throw OutputError("cannot create " + (out_dir / "books").string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto track = [&](fs::path p) {
    written.push_back(p);
    return p;
  };
  const bool json = options.format == ReportFormat::Json;

  for (const auto& b : reports) {
    if (json) {
      detail::write_text(track(out_dir / "books" / (b.book_id + ".json")), detail::book_json(b).dump(2) + "\n");
    } else {
      detail::FileWriter w(track(out_dir / "books" / (b.book_id + ".csv")));
      w.stream() << detail::kComparisonHeader << '\n';
      for (const auto& c : b.comparisons) detail::comparison_row(w.stream(), b, c);
      w.commit();
    }
  }

  if (json) {
    detail::write_text(track(out_dir / "summary.json"), detail::summary_json(summary).dump(2) + "\n");
  } else {
    detail::FileWriter w(track(out_dir / "summary.csv"));
    w.stream() << "metric,value\n";
    for (const auto& [k, v] : detail::summary_rows(summary)) w.stream() << k << ',' << detail::csv_field(v) << '\n';
    w.commit();
  }

  {
    detail::FileWriter w(track(out_dir / "comparisons.csv"));
    w.stream() << detail::kComparisonHeader << '\n';
    for (const auto& b : reports) {
      for (const auto& c : b.comparisons) detail::comparison_row(w.stream(), b, c);
    }
    w.commit();
  }
  {
    detail::FileWriter w(track(out_dir / "skipped.csv"));
    w.stream() << "book_id,path,reason\n";
    for (const auto& s : summary.skipped) {
      w.stream() << detail::csv_field(s.book_id) << ',' << detail::csv_field(s.path) << ','
                 << detail::csv_field(s.reason) << '\n';
    }
    w.commit();
  }

  detail::write_table_csv(track(out_dir / "ks_acceptance_plain.csv"), summary.ks_acceptance_plain);
  detail::write_table_csv(track(out_dir / "ks_acceptance_mapped.csv"), summary.ks_acceptance_mapped);
  {
    detail::FileWriter w(track(out_dir / "sentence_count_histogram.csv"));
    w.stream() << "bin_start,bin_end,books\n";
    const auto width = summary.histogram_bin_width;
    for (std::size_t i = 0; i < summary.sentence_count_histogram.size(); ++i) {
      w.stream() << i * width << ',' << (i + 1) * width << ',' << summary.sentence_count_histogram[i] << '\n';
    }
    w.commit();
  }
  detail::write_points_csv(track(out_dir / "pearson_r_cdf.csv"), "r,cumulative", summary.r_cdf);
  detail::write_points_csv(track(out_dir / "ks_kappa_plain_cdf.csv"), "kappa,cumulative", summary.kappa_plain_cdf);
  detail::write_points_csv(track(out_dir / "ks_kappa_mapped_cdf.csv"), "kappa,cumulative",
                           summary.kappa_mapped_cdf);
  detail::write_points_csv(track(out_dir / "hurst_delta_cdf.csv"), "abs_delta_h,cumulative", summary.delta_h_cdf);

  if (options.per_book_plots) {
    for (const auto& b : reports) detail::write_book_plots(b, out_dir / "plots" / b.book_id);
  }
  return written;
}

}  // namespace sentlen
