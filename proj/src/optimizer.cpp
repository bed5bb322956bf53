#include "papolab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace papolab {

Mode mode_from_string(const std::string& name) {
  if (name == "neutral") return Mode::kNeutral;
  if (name == "papo") return Mode::kPapo;
  if (name == "positive_only") return Mode::kPositiveOnly;
  if (name == "negative_only") return Mode::kNegativeOnly;
  if (name == "entropy_bonus") return Mode::kEntropyBonus;
  if (name == "entropy_topk") return Mode::kEntropyTopk;
  throw std::invalid_argument("unknown mode: " + name);
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kNeutral: return "neutral";
    case Mode::kPapo: return "papo";
    case Mode::kPositiveOnly: return "positive_only";
    case Mode::kNegativeOnly: return "negative_only";
    case Mode::kEntropyBonus: return "entropy_bonus";
    case Mode::kEntropyTopk: return "entropy_topk";
  }
  return "?";
}

void StepConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("StepConfig: step_size must be positive");
  }
  if (clip_low < 0.0 || clip_high < clip_low) {
    throw std::invalid_argument("StepConfig: need clip_high >= clip_low >= 0");
  }
  if (inner_epochs < 1) {
    throw std::invalid_argument("StepConfig: inner_epochs must be >= 1");
  }
  if (entropy_alpha < 0.0) {
    throw std::invalid_argument("StepConfig: entropy_alpha must be >= 0");
  }
  if (!(top_fraction > 0.0) || top_fraction > 1.0) {
    throw std::invalid_argument("StepConfig: top_fraction must be in (0, 1]");
  }
}

double token_gradient(double p_old, double p_new, double advantage,
                      double clip_low, double clip_high) {
  if (!(p_old > 0.0 && p_old <= 1.0 && p_new > 0.0 && p_new <= 1.0)) {
    throw std::invalid_argument("token_gradient: probabilities must be in (0,1]");
  }
  const double ratio = p_new / p_old;
  const double unclipped = ratio * advantage;
  const double clipped =
      std::clamp(ratio, 1.0 - clip_low, 1.0 + clip_high) * advantage;
  return unclipped <= clipped ? unclipped : 0.0;
}

std::vector<double> transform_advantages(
    const std::vector<PolarityRecord>& records, BranchWeights weights,
    const StepConfig& config) {
  if (!(weights.positive > 0.0) || !(weights.negative > 0.0)) {
    throw std::invalid_argument("transform_advantages: weights must be positive");
  }
  std::vector<double> out(records.size());

  switch (config.mode) {
    case Mode::kNeutral:
    case Mode::kEntropyBonus:
      for (std::size_t i = 0; i < records.size(); ++i) {
        out[i] = records[i].advantage;
      }
      break;
    case Mode::kPapo:
      for (std::size_t i = 0; i < records.size(); ++i) {
        const PolarityRecord& r = records[i];
        if (r.polarity > 0.0) {
          out[i] = r.advantage * weights.positive;
        } else if (r.polarity < 0.0) {
          out[i] = r.advantage * weights.negative;
        } else {
          out[i] = r.advantage;
        }
      }
      break;
    case Mode::kPositiveOnly:
      for (std::size_t i = 0; i < records.size(); ++i) {
        out[i] = records[i].polarity > 0.0 ? records[i].advantage : 0.0;
      }
      break;
    case Mode::kNegativeOnly:
      for (std::size_t i = 0; i < records.size(); ++i) {
        out[i] = records[i].polarity < 0.0 ? records[i].advantage : 0.0;
      }
      break;
    case Mode::kEntropyTopk: {
      const std::size_t n = records.size();
      if (n == 0) break;
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].state_entropy != records[b].state_entropy) {
          return records[a].state_entropy > records[b].state_entropy;
        }
        return a < b;
      });
      const auto keep = static_cast<std::size_t>(
          std::ceil(config.top_fraction * static_cast<double>(n)));
      for (std::size_t r = 0; r < std::min(keep, n); ++r) {
        out[order[r]] = records[order[r]].advantage;
      }
      break;
    }
  }
  return out;
}

StepReport apply_step(TabularPolicy& policy,
                      const std::vector<RolloutGroup>& groups,
                      const std::vector<PolarityRecord>& records,
                      const std::vector<double>& transformed_advantages,
                      const StepConfig& config, double temperature) {
  config.validate();
  if (transformed_advantages.size() != records.size()) {
    throw std::invalid_argument("apply_step: advantage/record size mismatch");
  }

  StepReport report;
  std::size_t total_trajectories = 0;
  for (const RolloutGroup& group : groups) {
    if (group.skipped) ++report.skipped_groups;
    for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
      report.mean_reward += group.rewards[i];
      report.tokens_total += group.trajectories[i].tokens.size();
      ++total_trajectories;
    }
  }
  if (total_trajectories > 0) {
    report.mean_reward /= static_cast<double>(total_trajectories);
  }
  if (records.size() != report.tokens_total) {
    throw std::invalid_argument("apply_step: records do not cover the batch");
  }
  for (const PolarityRecord& r : records) {
    if (r.polarity > 0.0) {
      ++report.tokens_positive;
    } else if (r.polarity < 0.0) {
      ++report.tokens_negative;
    } else {
      ++report.tokens_zero;
    }
  }

  const bool any_effective = report.skipped_groups < groups.size();
  if (!any_effective || groups.empty()) {
    report.step_skipped = true;
  } else {
    const bool with_bonus =
        config.mode == Mode::kEntropyBonus && config.entropy_alpha != 0.0;
    for (std::size_t epoch = 0; epoch < config.inner_epochs; ++epoch) {
      std::map<ContextKey, std::vector<double>> delta_acc;
      std::size_t idx = 0;
      for (const RolloutGroup& group : groups) {
        for (const Trajectory& traj : group.trajectories) {
          const double inv_len =
              1.0 / static_cast<double>(traj.per_step.size());
          for (const TrajectoryStep& step : traj.per_step) {
            const std::size_t token_idx = idx++;
            if (group.skipped) continue;

            const double a_tilde = transformed_advantages[token_idx];
            const TokenDistribution current =
                policy.distribution_at(step.context, temperature);
            const double mult =
                token_gradient(step.sampled_prob, current.probs[step.token],
                               a_tilde, config.clip_low, config.clip_high);
            if (mult == 0.0 && !with_bonus) continue;

            auto [it, fresh] = delta_acc.try_emplace(
                step.context, std::vector<double>(policy.vocab_size(), 0.0));
            std::vector<double>& acc = it->second;
            const std::vector<double>& p_roll = step.snapshot.probs;
            const double scale = config.step_size * mult * inv_len;
            if (mult != 0.0) {
              for (std::size_t v = 0; v < acc.size(); ++v) {
                const double ind = (static_cast<std::int32_t>(v) == step.token)
                                       ? 1.0
                                       : 0.0;
                acc[v] += scale * (ind - p_roll[v]);
              }
            }
            if (with_bonus) {
              const std::vector<double> h_grad = entropy_gradient(step.snapshot);
              const double bscale =
                  config.step_size * config.entropy_alpha * inv_len;
              for (std::size_t v = 0; v < acc.size(); ++v) {
                acc[v] += bscale * h_grad[v];
              }
            }
          }
        }
      }
      for (const auto& [key, deltas] : delta_acc) {
        policy.apply_logit_deltas(key, deltas);
      }
    }
  }

  // Post-update entropy over the unique states the batch visited.
  std::set<ContextKey> visited;
  for (const RolloutGroup& group : groups) {
    for (const Trajectory& traj : group.trajectories) {
      for (const TrajectoryStep& step : traj.per_step) {
        visited.insert(step.context);
      }
    }
  }
  if (!visited.empty()) {
    double h = 0.0;
    for (const ContextKey& key : visited) {
      h += policy.distribution_at(key, temperature).entropy;
    }
    report.mean_entropy_post = h / static_cast<double>(visited.size());
  }
  return report;
}

}  // namespace papolab
