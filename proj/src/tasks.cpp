#include "papolab/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "papolab/rng.hpp"

namespace papolab {

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "parity_sum") return TaskKind::kParitySum;
  if (name == "sorted_run") return TaskKind::kSortedRun;
  if (name == "target_match") return TaskKind::kTargetMatch;
  throw std::invalid_argument("unknown task: " + name);
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kParitySum: return "parity_sum";
    case TaskKind::kSortedRun: return "sorted_run";
    case TaskKind::kTargetMatch: return "target_match";
  }
  return "?";
}

void TaskSpec::validate() const {
  if (vocab_size < 2) {
    throw std::invalid_argument("TaskSpec: vocab_size must be >= 2");
  }
  if (max_len < 1) {
    throw std::invalid_argument("TaskSpec: max_len must be >= 1");
  }
  if (kind == TaskKind::kParitySum) {
    if (modulus < 2) throw std::invalid_argument("TaskSpec: modulus must be >= 2");
    if (target < 0 || target >= modulus) {
      throw std::invalid_argument("TaskSpec: target residue out of range");
    }
  }
  if (kind == TaskKind::kTargetMatch) {
    if (pattern_length < 1) {
      throw std::invalid_argument("TaskSpec: pattern_length must be >= 1");
    }
    // the response must fit pattern + terminator
    if (max_len < pattern_length + 1) {
      throw std::invalid_argument("TaskSpec: max_len too short for pattern");
    }
  }
}

int verify(const TaskSpec& task, const std::vector<std::int32_t>& prompt,
           const std::vector<std::int32_t>& tokens) {
  const std::int32_t vocab = static_cast<std::int32_t>(task.vocab_size);
  for (std::int32_t tok : prompt) {
    if (tok < 0 || tok >= vocab) {
      throw std::invalid_argument("verify: prompt token out of vocab");
    }
  }
  for (std::int32_t tok : tokens) {
    if (tok < 0 || tok >= vocab) {
      throw std::invalid_argument("verify: emitted token out of vocab");
    }
  }

  const std::int32_t term = task.terminator();
  if (tokens.empty() || tokens.back() != term) return 0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] == term) return 0;
  }
  // digits = tokens without the trailing terminator
  const std::size_t n = tokens.size() - 1;

  switch (task.kind) {
    case TaskKind::kParitySum: {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += tokens[i];
      return (sum % task.modulus) == task.target ? 1 : 0;
    }
    case TaskKind::kSortedRun: {
      for (std::size_t i = 1; i < n; ++i) {
        if (tokens[i] < tokens[i - 1]) return 0;
      }
      return 1;
    }
    case TaskKind::kTargetMatch: {
      if (prompt.size() < task.pattern_length) return 0;
      if (n != task.pattern_length) return 0;
      const std::size_t off = prompt.size() - task.pattern_length;
      for (std::size_t i = 0; i < n; ++i) {
        if (tokens[i] != prompt[off + i]) return 0;
      }
      return 1;
    }
  }
  return 0;
}

std::vector<std::int32_t> sample_prompt(const TaskSpec& task,
                                        std::uint64_t seed) {
  if (task.kind != TaskKind::kTargetMatch) return {};
  Rng rng(seed);
  const std::size_t digits = task.vocab_size - 1;
  std::vector<std::int32_t> prompt(task.pattern_length);
  for (auto& tok : prompt) {
    tok = static_cast<std::int32_t>(rng.uniform_index(digits));
  }
  return prompt;
}

RolloutGroup make_group(const TaskSpec& task,
                        const std::vector<std::int32_t>& prompt,
                        const TabularPolicy& policy, std::size_t group_size,
                        std::uint64_t seed, double temperature) {
  if (group_size < 2) {
    throw std::invalid_argument("make_group: group size must be >= 2");
  }
  task.validate();

  RolloutGroup group;
  group.prompt = prompt;
  group.trajectories.reserve(group_size);
  group.rewards.reserve(group_size);

  double mean = 0.0;
  for (std::size_t i = 0; i < group_size; ++i) {
    const std::uint64_t traj_seed = derive_seed(seed, {0x7261u, i});
    Trajectory traj = sample_trajectory(policy, prompt, traj_seed,
                                        task.max_len, temperature,
                                        task.terminator());
    const double r = verify(task, prompt, traj.tokens);
    group.trajectories.push_back(std::move(traj));
    group.rewards.push_back(r);
    mean += r;
  }
  mean /= static_cast<double>(group_size);

  double var = 0.0;
  for (double r : group.rewards) {
    var += (r - mean) * (r - mean);
  }
  var /= static_cast<double>(group_size);  // population variance

  group.advantages.assign(group_size, 0.0);
  if (var > 0.0) {
    const double std_dev = std::sqrt(var);
    for (std::size_t i = 0; i < group_size; ++i) {
      group.advantages[i] = (group.rewards[i] - mean) / std_dev;
    }
  } else {
    group.skipped = true;
  }
  return group;
}

}  // namespace papolab
