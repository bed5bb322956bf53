#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace papolab {

// One captured token row from records.csv.
struct CapturedToken {
  std::size_t step = 0;
  std::size_t group = 0;
  std::size_t traj = 0;
  std::size_t pos = 0;
  std::size_t traj_len = 1;
  std::size_t token = 0;
  double sampled_prob = 0.0;
  double state_entropy = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double tendency = 0.0;
  double advantage = 0.0;
  double polarity = 0.0;
  double delta_h_exact = 0.0;
  double eta = 0.0;
};

struct AnalysisOptions {
  std::size_t histogram_bins = 40;
  std::size_t position_bins = 20;
  std::size_t scatter_max_rows = 20000;
};

struct AnalysisResult {
  std::string components_path;   // histograms of A*t1 and A*t2
  std::string percentiles_path;  // percentile curve of |P|
  std::string positions_path;    // per relative-position-bin statistics
  std::string scatter_path;      // (eta*P, exact dH) pairs
  std::string summary_path;
  std::size_t rows = 0;
  std::uint64_t seed = 0;   // propagated from the records header
  bool degenerate = false;  // every recorded polarity is zero
  double mean_abs_polarity = 0.0;
  double median_abs_polarity = 0.0;
};

std::vector<CapturedToken> read_records_csv(const std::string& path,
                                            std::uint64_t* seed = nullptr);

// Report tables from a recorded run. Throws with an explicit diagnostic when
// the records file is missing or empty.
AnalysisResult run_analysis(const std::string& records_csv,
                            const std::string& out_dir,
                            const AnalysisOptions& options = {});

}  // namespace papolab
