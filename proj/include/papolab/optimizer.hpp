#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "papolab/polarity.hpp"
#include "papolab/tasks.hpp"

namespace papolab {

// Token-advantage transformation applied before the gradient step.
enum class Mode {
  kNeutral,       // plain group-normalized advantages
  kPapo,          // polarity-branch reweighting
  kPositiveOnly,  // keep only entropy-expanding updates (P > 0)
  kNegativeOnly,  // keep only entropy-contracting updates (P < 0)
  kEntropyBonus,  // neutral advantages plus an analytic entropy bonus
  kEntropyTopk,   // keep only the top fraction of tokens by state entropy
};

Mode mode_from_string(const std::string& name);
std::string to_string(Mode mode);

struct StepConfig {
  double step_size = 0.05;
  double clip_low = 0.2;
  double clip_high = 0.28;
  std::size_t inner_epochs = 1;
  Mode mode = Mode::kNeutral;
  double entropy_alpha = 0.01;  // entropy_bonus coefficient
  double top_fraction = 0.2;    // entropy_topk kept fraction

  void validate() const;
};

struct BranchWeights {
  double positive = 1.0;  // applied where P > 0
  double negative = 1.0;  // applied where P < 0
};

// Gradient multiplier of the clipped surrogate min(rho*A, clip(rho)*A) with
// respect to the sampled token's logit: rho*A when the unclipped branch is
// the minimum (or the ratio is inside the clip range), zero when the update
// is clipped away.
double token_gradient(double p_old, double p_new, double advantage,
                      double clip_low, double clip_high);

// Reweighted or masked advantages per mode. Records must cover the whole
// step's token batch in order; entropy_topk ranks within that batch.
std::vector<double> transform_advantages(
    const std::vector<PolarityRecord>& records, BranchWeights weights,
    const StepConfig& config);

struct StepReport {
  double mean_reward = 0.0;        // over every sampled response
  double mean_entropy_post = 0.0;  // post-update policy, unique visited states
  std::size_t tokens_positive = 0;
  std::size_t tokens_negative = 0;
  std::size_t tokens_zero = 0;
  std::size_t tokens_total = 0;
  std::size_t skipped_groups = 0;
  bool step_skipped = false;  // no group survived skip filtering
};

// One training step over a batch of rollout groups. Deltas are accumulated
// against the rollout-time distributions for every token of the effective
// (non-skipped) batch, then applied once per inner epoch. The transformed
// advantages must be index-aligned with the flat (group, trajectory, step)
// token order that `records` uses.
StepReport apply_step(TabularPolicy& policy,
                      const std::vector<RolloutGroup>& groups,
                      const std::vector<PolarityRecord>& records,
                      const std::vector<double>& transformed_advantages,
                      const StepConfig& config, double temperature = 1.0);

}  // namespace papolab
