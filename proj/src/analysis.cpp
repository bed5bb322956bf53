#include "papolab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace papolab {

namespace {

double median_of_sorted(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return median_of_sorted(values);
}

}  // namespace

std::vector<CapturedToken> read_records_csv(const std::string& path,
                                            std::uint64_t* seed) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(
        "analysis: no polarity records at " + path +
        "; run training with run.record_every > 0 to capture them");
  }
  std::vector<CapturedToken> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (seed && line.rfind("# seed=", 0) == 0) {
      *seed = std::stoull(line.substr(7));
    }
    if (line.empty() || line[0] == '#' || line.rfind("step,", 0) == 0) {
      continue;
    }
    std::istringstream ss(line);
    CapturedToken row;
    char comma = ',';
    ss >> row.step >> comma >> row.group >> comma >> row.traj >> comma >>
        row.pos >> comma >> row.traj_len >> comma >> row.token >> comma >>
        row.sampled_prob >> comma >> row.state_entropy >> comma >> row.t1 >>
        comma >> row.t2 >> comma >> row.tendency >> comma >> row.advantage >>
        comma >> row.polarity >> comma >> row.delta_h_exact >> comma >>
        row.eta;
    if (!ss) {
      throw std::runtime_error("analysis: malformed record line: " + line);
    }
    rows.push_back(row);
  }
  return rows;
}

AnalysisResult run_analysis(const std::string& records_csv,
                            const std::string& out_dir,
                            const AnalysisOptions& options) {
  std::uint64_t seed = 0;
  const std::vector<CapturedToken> rows = read_records_csv(records_csv, &seed);
  if (rows.empty()) {
    throw std::runtime_error("analysis: records file " + records_csv +
                             " contains no token rows");
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  AnalysisResult result;
  result.rows = rows.size();
  result.seed = seed;
  const auto open_table = [&](const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("analysis: cannot write " + path);
    std::fprintf(f, "# seed=%llu\n", static_cast<unsigned long long>(seed));
    return f;
  };
  result.components_path = (fs::path(out_dir) / "hist_components.csv").string();
  result.percentiles_path =
      (fs::path(out_dir) / "polarity_percentiles.csv").string();
  result.positions_path = (fs::path(out_dir) / "position_polarity.csv").string();
  result.scatter_path = (fs::path(out_dir) / "delta_scatter.csv").string();
  result.summary_path = (fs::path(out_dir) / "analysis_summary.txt").string();

  // (a) histograms of the realized components A*t1 and A*t2
  {
    std::vector<double> a_t1(rows.size()), a_t2(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a_t1[i] = rows[i].advantage * rows[i].t1;
      a_t2[i] = rows[i].advantage * rows[i].t2;
    }
    double lo = a_t1[0], hi = a_t1[0];
    for (double v : a_t1) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : a_t2) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;  // degenerate spread
    const std::size_t bins = options.histogram_bins;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> count1(bins, 0), count2(bins, 0);
    auto bin_of = [&](double v) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      return std::min(b, bins - 1);
    };
    for (double v : a_t1) ++count1[bin_of(v)];
    for (double v : a_t2) ++count2[bin_of(v)];

    std::FILE* f = open_table(result.components_path);
    std::fprintf(f, "bin_lo,bin_hi,count_a_t1,count_a_t2\n");
    for (std::size_t b = 0; b < bins; ++b) {
      std::fprintf(f, "%.17g,%.17g,%zu,%zu\n", lo + width * b,
                   lo + width * (b + 1), count1[b], count2[b]);
    }
    std::fclose(f);
  }

  // (b) percentile curve of |P|
  std::vector<double> abs_polarity(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    abs_polarity[i] = std::fabs(rows[i].polarity);
  }
  {
    std::vector<double> sorted = abs_polarity;
    std::sort(sorted.begin(), sorted.end());
    std::FILE* f = open_table(result.percentiles_path);
    std::fprintf(f, "percentile,abs_polarity\n");
    for (int q = 0; q <= 100; ++q) {
      const auto idx = static_cast<std::size_t>(std::llround(
          (q / 100.0) * static_cast<double>(sorted.size() - 1)));
      std::fprintf(f, "%d,%.17g\n", q, sorted[idx]);
    }
    std::fclose(f);
    result.mean_abs_polarity = 0.0;
    for (double v : sorted) result.mean_abs_polarity += v;
    result.mean_abs_polarity /= static_cast<double>(sorted.size());
    result.median_abs_polarity = median_of_sorted(sorted);
    result.degenerate = sorted.back() == 0.0;
  }

  // (c) per relative-position statistics
  {
    const std::size_t bins = options.position_bins;
    std::vector<std::vector<double>> abs_by_bin(bins), signed_by_bin(bins);
    for (const CapturedToken& row : rows) {
      const double rel = static_cast<double>(row.pos) /
                         static_cast<double>(std::max<std::size_t>(row.traj_len, 1));
      auto b = static_cast<std::size_t>(rel * static_cast<double>(bins));
      b = std::min(b, bins - 1);
      abs_by_bin[b].push_back(std::fabs(row.polarity));
      signed_by_bin[b].push_back(row.polarity);
    }
    std::FILE* f = open_table(result.positions_path);
    std::fprintf(f,
                 "bin,rel_lo,rel_hi,n,mean_abs,median_abs,mean_signed,"
                 "median_signed\n");
    for (std::size_t b = 0; b < bins; ++b) {
      const auto& abs_v = abs_by_bin[b];
      const auto& sgn_v = signed_by_bin[b];
      double mean_abs = 0.0, mean_sgn = 0.0;
      for (double v : abs_v) mean_abs += v;
      for (double v : sgn_v) mean_sgn += v;
      const double n = std::max<double>(1.0, static_cast<double>(abs_v.size()));
      std::fprintf(f, "%zu,%.6g,%.6g,%zu,%.17g,%.17g,%.17g,%.17g\n", b,
                   static_cast<double>(b) / static_cast<double>(bins),
                   static_cast<double>(b + 1) / static_cast<double>(bins),
                   abs_v.size(), mean_abs / n, median_of(abs_v), mean_sgn / n,
                   median_of(sgn_v));
    }
    std::fclose(f);
  }

  // (d) scatter of first-order prediction vs measured entropy change
  {
    std::FILE* f = open_table(result.scatter_path);
    std::fprintf(f, "eta_polarity,delta_h_exact\n");
    const std::size_t stride =
        std::max<std::size_t>(1, rows.size() / options.scatter_max_rows);
    for (std::size_t i = 0; i < rows.size(); i += stride) {
      std::fprintf(f, "%.17g,%.17g\n", rows[i].eta * rows[i].polarity,
                   rows[i].delta_h_exact);
    }
    std::fclose(f);
  }

  {
    std::ofstream summary(result.summary_path);
    summary << "papolab analysis summary\n";
    summary << "seed: " << seed << "\n";
    summary << "records: " << records_csv << "\n";
    summary << "token rows: " << result.rows << "\n";
    summary << "mean |P|: " << result.mean_abs_polarity << "\n";
    summary << "median |P|: " << result.median_abs_polarity << "\n";
    if (result.degenerate) {
      summary << "NOTE: every recorded polarity is zero; histograms are "
                 "degenerate\n";
    }
  }
  return result;
}

}  // namespace papolab
