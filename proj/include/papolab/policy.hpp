#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "papolab/distribution.hpp"

namespace papolab {

// A decoding state: the last context_order tokens of (prompt + emitted),
// right-padded with the begin marker when the history is shorter. The
// marker is vocab_size, one past the last real token id.
using ContextKey = std::vector<std::int32_t>;

// Tabular contextual softmax policy: every distinct context owns its own
// logit array, so one state's update never touches another state.
class TabularPolicy {
 public:
  TabularPolicy(std::size_t vocab_size, std::size_t context_order);
  TabularPolicy(std::size_t vocab_size, std::size_t context_order,
                std::vector<double> default_logits);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t context_order() const { return context_order_; }
  std::size_t num_contexts() const { return table_.size(); }
  const std::vector<double>& default_logits() const { return default_logits_; }

  std::int32_t begin_marker() const {
    return static_cast<std::int32_t>(vocab_size_);
  }

  // Context key for a history (prompt followed by emitted tokens).
  ContextKey context_key(const std::vector<std::int32_t>& history) const;

  // Logits for a context; falls back to default_logits without inserting.
  const std::vector<double>& logits_at(const ContextKey& key) const;

  // Softmax over logits/temperature at a context. Read-only.
  TokenDistribution distribution_at(const ContextKey& key,
                                    double temperature = 1.0) const;

  // Elementwise logit increment; lazily initializes unseen contexts from
  // default_logits. Rejects non-finite or wrong-length deltas, leaving the
  // table unchanged.
  void apply_logit_deltas(const ContextKey& key,
                          const std::vector<double>& deltas);

  // Overwrite a context's logits verbatim (snapshot restore).
  void set_logits(const ContextKey& key, std::vector<double> logits);

  const std::map<ContextKey, std::vector<double>>& table() const {
    return table_;
  }

 private:
  std::size_t vocab_size_;
  std::size_t context_order_;
  std::vector<double> default_logits_;
  std::map<ContextKey, std::vector<double>> table_;
};

struct TrajectoryStep {
  ContextKey context;
  std::int32_t token = 0;
  double sampled_prob = 0.0;        // rollout-time p_t
  TokenDistribution snapshot;       // rollout-time distribution at the state
};

struct Trajectory {
  std::vector<std::int32_t> prompt;
  std::vector<std::int32_t> tokens;  // ends at stop token or length cap
  std::vector<TrajectoryStep> per_step;
};

// Autoregressive rollout. Sampling stops after emitting stop_token (pass a
// negative value for no stop token) or after max_len tokens. Deterministic
// given the seed; the policy table is never modified.
Trajectory sample_trajectory(const TabularPolicy& policy,
                             const std::vector<std::int32_t>& prompt,
                             std::uint64_t seed, std::size_t max_len,
                             double temperature, std::int32_t stop_token);

// Text snapshot: header, default logits, then one line per context with the
// key tokens and V logits at 17 significant digits. Round-trips exactly.
void save_policy(const TabularPolicy& policy, const std::string& path,
                 std::uint64_t seed);
TabularPolicy load_policy(const std::string& path);

}  // namespace papolab
