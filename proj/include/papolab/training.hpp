#pragma once

#include <string>
#include <vector>

#include "papolab/metrics.hpp"
#include "papolab/policy.hpp"
#include "papolab/run_config.hpp"

namespace papolab {

struct TrainResult {
  std::vector<MetricFrame> frames;
  std::string metrics_path;
  std::string policy_path;
  std::string controller_path;
  std::string summary_path;
  std::string records_path;  // empty when capture is disabled
  double final_mean_reward = 0.0;
  double final_mean_entropy = 0.0;
};

// Full training run: rollouts, polarity, controller observation, advantage
// transformation, gradient step, one MetricFrame per step. Deterministic
// given the seed. Writes metrics.jsonl, policy.txt, controller.txt,
// summary.txt and (when record_every > 0) records.csv under out_dir.
TrainResult run_training(const RunConfig& config);

}  // namespace papolab
