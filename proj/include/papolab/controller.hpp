#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>

#include "papolab/optimizer.hpp"

namespace papolab {

struct ControllerConfig {
  double omega_min = 0.98;
  double omega_max = 1.02;
  double beta_warm = 0.95;  // slope EMA during warmup
  double beta_run = 0.9;    // slope and gate EMA after warmup
  std::size_t warmup_steps = 20;
  double gate_ratio = 0.3;
  double epsilon = 1e-8;  // denominator guard in the recovery metric

  void validate() const;
};

// Adaptive entropy modulation. Tracks the smoothed entropy slope, locks the
// warmup references, maps the recovery metric p_k to branch weights via
// omega_neg = omega_min + (omega_max - omega_min) * p_k^2 with
// omega_pos = 1 / omega_neg, and permanently deactivates once smoothed
// entropy drops below gate_ratio * h_ref.
class Controller {
 public:
  explicit Controller(ControllerConfig config);

  // Feed one step's mean entropy (nats). Returns the weights to use for the
  // step that is about to be applied.
  BranchWeights observe(double mean_entropy);

  // Weights from the latest observe; throws if never observed.
  BranchWeights weights_for_step() const;

  const ControllerConfig& config() const { return config_; }
  std::size_t step_index() const { return step_; }
  double ema_slope() const { return ema_slope_; }
  double gate_ema() const { return gate_ema_; }
  double recovery() const { return recovery_; }  // p_k, 0 while neutral
  bool active() const { return active_; }
  std::optional<double> ref_slope() const { return ref_slope_; }
  std::optional<double> ref_entropy() const { return ref_entropy_; }

  // Plain-text checkpoint blocks for resume (round-trips exactly).
  void save(std::ostream& out) const;
  static Controller load(std::istream& in, const ControllerConfig& config);

 private:
  ControllerConfig config_;
  std::size_t step_ = 0;  // observations so far
  double prev_entropy_ = 0.0;
  double ema_slope_ = 0.0;
  double gate_ema_ = 0.0;
  std::optional<double> ref_slope_;
  std::optional<double> ref_entropy_;
  bool active_ = true;
  double recovery_ = 0.0;
  BranchWeights weights_;
};

}  // namespace papolab
