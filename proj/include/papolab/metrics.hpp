#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace papolab {

// One training step's logged statistics. Serialized as one JSON object per
// line; parse(emit(frame)) reproduces the frame exactly.
struct MetricFrame {
  std::size_t step = 0;
  std::uint64_t seed = 0;
  double mean_reward = 0.0;
  double mean_entropy = 0.0;         // over sampled token positions, rollout-time
  double mean_entropy_states = 0.0;  // over unique visited states, rollout-time
  double mean_entropy_post = 0.0;    // over unique visited states, post-update
  double ema_slope = 0.0;
  double p_k = 0.0;
  double omega_pos = 1.0;
  double omega_neg = 1.0;
  bool active = true;
  double gate_ema = 0.0;
  std::optional<double> ref_slope;
  std::optional<double> ref_entropy;
  double frac_positive_polarity = 0.0;
  double mean_abs_polarity = 0.0;
  std::size_t skipped_groups = 0;
  std::size_t tokens_total = 0;

  bool operator==(const MetricFrame&) const = default;
};

std::string to_json_line(const MetricFrame& frame);
MetricFrame frame_from_json_line(const std::string& line);

std::vector<MetricFrame> read_metrics_file(const std::string& path);

}  // namespace papolab
