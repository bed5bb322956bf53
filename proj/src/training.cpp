#include "papolab/training.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "papolab/polarity.hpp"
#include "papolab/rng.hpp"

namespace papolab {

namespace {

constexpr std::uint64_t kPromptStream = 1;
constexpr std::uint64_t kGroupStream = 2;

void write_records_header(std::FILE* f, std::uint64_t seed) {
  std::fprintf(f, "# seed=%llu\n", static_cast<unsigned long long>(seed));
  std::fprintf(f,
               "step,group,traj,pos,traj_len,token,sampled_prob,state_entropy,"
               "t1,t2,tendency,advantage,polarity,delta_h_exact,eta\n");
}

}  // namespace

TrainResult run_training(const RunConfig& config) {
  config.validate();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);

  TrainResult result;
  result.metrics_path = (fs::path(config.out_dir) / "metrics.jsonl").string();
  result.policy_path = (fs::path(config.out_dir) / "policy.txt").string();
  result.controller_path =
      (fs::path(config.out_dir) / "controller.txt").string();
  result.summary_path = (fs::path(config.out_dir) / "summary.txt").string();

  std::ofstream metrics_out(result.metrics_path);
  if (!metrics_out) {
    throw std::runtime_error("run_training: output directory not writable: " +
                             config.out_dir);
  }

  TabularPolicy policy(config.task.vocab_size, config.context_order);
  Controller controller(config.controller);
  std::size_t start_step = 0;
  if (!config.resume_dir.empty()) {
    policy = load_policy(
        (fs::path(config.resume_dir) / "policy.txt").string());
    std::ifstream cin_state(
        (fs::path(config.resume_dir) / "controller.txt").string());
    if (!cin_state) {
      throw std::runtime_error("run_training: missing controller state in " +
                               config.resume_dir);
    }
    controller = Controller::load(cin_state, config.controller);
    start_step = controller.step_index();
  }

  std::FILE* records_out = nullptr;
  if (config.record_every > 0) {
    result.records_path =
        (fs::path(config.out_dir) / "records.csv").string();
    records_out = std::fopen(result.records_path.c_str(), "w");
    if (!records_out) {
      throw std::runtime_error("run_training: cannot write " +
                               result.records_path);
    }
    write_records_header(records_out, config.seed);
  }

  for (std::size_t k = start_step + 1; k <= config.total_steps; ++k) {
    // Rollout phase: read-only on the policy table.
    std::vector<RolloutGroup> groups;
    groups.reserve(config.groups_per_step);
    for (std::size_t g = 0; g < config.groups_per_step; ++g) {
      const auto prompt_seed = derive_seed(config.seed, {kPromptStream, k, g});
      const auto group_seed = derive_seed(config.seed, {kGroupStream, k, g});
      const auto prompt = sample_prompt(config.task, prompt_seed);
      groups.push_back(make_group(config.task, prompt, policy,
                                  config.group_size, group_seed,
                                  config.temperature));
    }

    // Polarity of every sampled token, from rollout-time distributions.
    std::vector<PolarityRecord> records;
    std::set<ContextKey> unique_states;
    double state_entropy_sum = 0.0;
    double token_entropy_sum = 0.0;
    for (const RolloutGroup& group : groups) {
      for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
        for (const TrajectoryStep& step : group.trajectories[i].per_step) {
          records.push_back(polarity(step.snapshot,
                                     static_cast<std::size_t>(step.token),
                                     group.advantages[i]));
          token_entropy_sum += step.snapshot.entropy;
          if (unique_states.insert(step.context).second) {
            state_entropy_sum += step.snapshot.entropy;
          }
        }
      }
    }
    const double h_tokens =
        records.empty() ? 0.0
                        : token_entropy_sum / static_cast<double>(records.size());
    const double h_states =
        unique_states.empty()
            ? 0.0
            : state_entropy_sum / static_cast<double>(unique_states.size());

    // The controller observes in every mode (its trace is a diagnostic);
    // its weights are applied only when the mode is papo.
    const BranchWeights controller_weights = controller.observe(h_tokens);
    const BranchWeights weights = config.step.mode == Mode::kPapo
                                      ? controller_weights
                                      : BranchWeights{1.0, 1.0};
    const std::vector<double> transformed =
        transform_advantages(records, weights, config.step);
    const StepReport report = apply_step(policy, groups, records, transformed,
                                         config.step, config.temperature);

    MetricFrame frame;
    frame.step = k;
    frame.seed = config.seed;
    frame.mean_reward = report.mean_reward;
    frame.mean_entropy = h_tokens;
    frame.mean_entropy_states = h_states;
    frame.mean_entropy_post = report.mean_entropy_post;
    frame.ema_slope = controller.ema_slope();
    frame.p_k = controller.recovery();
    frame.omega_pos = weights.positive;
    frame.omega_neg = weights.negative;
    frame.active = controller.active();
    frame.gate_ema = controller.gate_ema();
    frame.ref_slope = controller.ref_slope();
    frame.ref_entropy = controller.ref_entropy();
    if (!records.empty()) {
      frame.frac_positive_polarity =
          static_cast<double>(report.tokens_positive) /
          static_cast<double>(records.size());
      double abs_sum = 0.0;
      for (const PolarityRecord& r : records) abs_sum += std::fabs(r.polarity);
      frame.mean_abs_polarity = abs_sum / static_cast<double>(records.size());
    }
    frame.skipped_groups = report.skipped_groups;
    frame.tokens_total = report.tokens_total;

    metrics_out << to_json_line(frame) << "\n";
    result.frames.push_back(frame);

    if (records_out && (k - 1) % config.record_every == 0) {
      std::size_t idx = 0;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const RolloutGroup& group = groups[g];
        for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
          const Trajectory& traj = group.trajectories[i];
          for (std::size_t t = 0; t < traj.per_step.size(); ++t) {
            const PolarityRecord& r = records[idx++];
            const double dh = exact_entropy_delta(
                traj.per_step[t].snapshot,
                static_cast<std::size_t>(traj.per_step[t].token), r.advantage,
                config.step.step_size);
            std::fprintf(records_out,
                         "%zu,%zu,%zu,%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g,"
                         "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                         k, g, i, t, traj.per_step.size(), r.token_index,
                         r.sampled_prob, r.state_entropy, r.t1, r.t2,
                         r.tendency, r.advantage, r.polarity, dh,
                         config.step.step_size);
          }
        }
      }
    }
  }

  metrics_out.close();
  if (records_out) std::fclose(records_out);

  save_policy(policy, result.policy_path, config.seed);
  {
    std::ofstream cout_state(result.controller_path);
    cout_state << "# seed " << config.seed << "\n";
    controller.save(cout_state);
  }

  if (!result.frames.empty()) {
    result.final_mean_reward = result.frames.back().mean_reward;
    result.final_mean_entropy = result.frames.back().mean_entropy;
  }

  std::ofstream summary(result.summary_path);
  summary << "papolab run summary\n";
  summary << "task: " << to_string(config.task.kind)
          << "  V=" << config.task.vocab_size
          << "  max_len=" << config.task.max_len << "\n";
  summary << "mode: " << to_string(config.step.mode)
          << "  step_size=" << config.step.step_size
          << "  weight bounds=[" << config.controller.omega_min << ", "
          << config.controller.omega_max << "]\n";
  summary << "group_size=" << config.group_size
          << "  groups_per_step=" << config.groups_per_step
          << "  steps=" << config.total_steps << "  seed=" << config.seed
          << "\n";
  if (!result.frames.empty()) {
    const MetricFrame& first = result.frames.front();
    const MetricFrame& last = result.frames.back();
    summary << "initial: reward=" << first.mean_reward
            << "  entropy=" << first.mean_entropy << "\n";
    summary << "final:   reward=" << last.mean_reward
            << "  entropy=" << last.mean_entropy
            << "  active=" << (last.active ? "yes" : "no") << "\n";
  } else {
    summary << "no steps executed\n";
  }
  summary << "metrics: " << result.metrics_path << "\n";
  summary << "policy snapshot: " << result.policy_path << "\n";

  return result;
}

}  // namespace papolab
