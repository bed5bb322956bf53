#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "papolab/policy.hpp"

namespace papolab {

// Synthetic verifiable-reward environments. Tokens 0..V-2 are digits
// (value == token id); the last token id V-1 is the reserved terminator.
enum class TaskKind { kParitySum, kSortedRun, kTargetMatch };

TaskKind task_kind_from_string(const std::string& name);
std::string to_string(TaskKind kind);

struct TaskSpec {
  TaskKind kind = TaskKind::kSortedRun;
  std::size_t vocab_size = 10;
  std::size_t max_len = 16;
  // parity_sum
  std::int32_t modulus = 4;
  std::int32_t target = 0;
  // target_match
  std::size_t pattern_length = 3;

  std::int32_t terminator() const {
    return static_cast<std::int32_t>(vocab_size) - 1;
  }
  void validate() const;
};

// Rule-based binary reward. A response scores 1 only if it ends with the
// terminator (and contains no earlier terminator) and the emitted digits
// satisfy the task rule. Out-of-vocab tokens are rejected.
int verify(const TaskSpec& task, const std::vector<std::int32_t>& prompt,
           const std::vector<std::int32_t>& tokens);

// Prompt for one task instance. parity_sum and sorted_run use an empty
// prompt; target_match draws a random digit pattern the policy must copy.
std::vector<std::int32_t> sample_prompt(const TaskSpec& task,
                                        std::uint64_t seed);

struct RolloutGroup {
  std::vector<std::int32_t> prompt;
  std::vector<Trajectory> trajectories;
  std::vector<double> rewards;
  std::vector<double> advantages;
  bool skipped = false;  // zero reward variance
};

// Samples G responses, rewards them, and z-scores rewards within the group
// using the population standard deviation. Groups with zero reward variance
// are flagged skipped and carry all-zero advantages.
RolloutGroup make_group(const TaskSpec& task,
                        const std::vector<std::int32_t>& prompt,
                        const TabularPolicy& policy, std::size_t group_size,
                        std::uint64_t seed, double temperature = 1.0);

}  // namespace papolab
