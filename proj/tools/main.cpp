// papolab command line: verify / train / ablate / sweep / analyze.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "papolab/analysis.hpp"
#include "papolab/run_config.hpp"
#include "papolab/training.hpp"
#include "papolab/verification.hpp"

namespace {

using papolab::RunConfig;

void print_report(const papolab::VerificationReport& report) {
  for (const auto& check : report.checks) {
    std::printf("[%s] %-34s stat=%.8g  %s\n", check.passed ? "PASS" : "FAIL",
                check.name.c_str(), check.statistic, check.detail.c_str());
  }
}

RunConfig load_base_config(const std::string& config_path,
                           const std::string& preset) {
  RunConfig base;
  if (!preset.empty()) base = papolab::preset_config(preset);
  if (!config_path.empty()) {
    base = papolab::run_config_from_map(
        papolab::parse_key_value_file(config_path), base);
  }
  return base;
}

void apply_overrides(RunConfig& config, bool has_seed, std::uint64_t seed,
                     const std::string& out_dir) {
  if (has_seed) config.seed = seed;
  if (!out_dir.empty()) config.out_dir = out_dir;
}

int run_one(const RunConfig& config, const char* label) {
  const papolab::TrainResult result = papolab::run_training(config);
  std::printf("%-14s seed=%llu steps=%zu  reward %.4f  entropy %.4f  -> %s\n",
              label, static_cast<unsigned long long>(config.seed),
              config.total_steps, result.final_mean_reward,
              result.final_mean_entropy, config.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for token-level entropy mechanics of "
               "policy-gradient training"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* copt = cmd->add_option("--config", config_path,
                                 "run configuration file (key = value with "
                                 "[section] headers)");
    if (need_config && preset.empty()) copt->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "override the run seed")
        ->each([&](const std::string&) { has_seed = true; });
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--preset", preset,
                    "named preset: defaults | explore | moderate | exploit");
  };

  auto* verify_cmd =
      app.add_subcommand("verify", "run the entropy-mechanics property suite");
  std::size_t verify_cases = 10000;
  std::size_t verify_identity_cases = 100000;
  verify_cmd->add_option("--seed", seed, "fuzz seed")
      ->each([&](const std::string&) { has_seed = true; });
  verify_cmd->add_option("--cases", verify_cases,
                         "fuzz cases for the first-order checks");
  verify_cmd->add_option("--identity-cases", verify_identity_cases,
                         "fuzz cases for the analytic identities");

  auto* train_cmd = app.add_subcommand("train", "run one training config");
  add_common(train_cmd, true);

  auto* ablate_cmd = app.add_subcommand(
      "ablate", "run neutral, positive_only and negative_only arms");
  add_common(ablate_cmd, true);

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "run the explore / moderate / exploit weight-bound presets");
  add_common(sweep_cmd, true);

  auto* analyze_cmd =
      app.add_subcommand("analyze", "report tables from a recorded run");
  std::string run_dir;
  analyze_cmd->add_option("--run", run_dir, "training output directory")
      ->required();
  analyze_cmd->add_option("--out", out_dir, "where to write the CSV tables");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify_cmd->parsed()) {
      papolab::VerificationOptions opts;
      if (has_seed) opts.seed = seed;
      opts.correlation_cases = verify_cases;
      opts.identity_cases = verify_identity_cases;
      const papolab::VerificationReport report = papolab::run_verification(opts);
      print_report(report);
      std::printf("%s\n", report.all_passed() ? "all checks passed"
                                              : "SOME CHECKS FAILED");
      return report.all_passed() ? 0 : 1;
    }

    if (train_cmd->parsed()) {
      RunConfig config = load_base_config(config_path, preset);
      apply_overrides(config, has_seed, seed, out_dir);
      return run_one(config, papolab::to_string(config.step.mode).c_str());
    }

    if (ablate_cmd->parsed()) {
      const RunConfig base = load_base_config(config_path, preset);
      namespace fs = std::filesystem;
      const fs::path root =
          out_dir.empty() ? fs::path(base.out_dir) : fs::path(out_dir);
      for (const auto mode : {papolab::Mode::kNeutral,
                              papolab::Mode::kPositiveOnly,
                              papolab::Mode::kNegativeOnly}) {
        RunConfig config = base;
        apply_overrides(config, has_seed, seed, "");
        config.step.mode = mode;
        config.out_dir = (root / papolab::to_string(mode)).string();
        run_one(config, papolab::to_string(mode).c_str());
      }
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const RunConfig base = load_base_config(config_path, preset);
      namespace fs = std::filesystem;
      const fs::path root =
          out_dir.empty() ? fs::path(base.out_dir) : fs::path(out_dir);
      for (const std::string arm : {"explore", "moderate", "exploit"}) {
        RunConfig config = base;
        apply_overrides(config, has_seed, seed, "");
        const RunConfig bounds = papolab::preset_config(arm);
        config.step.mode = papolab::Mode::kPapo;
        config.controller.omega_min = bounds.controller.omega_min;
        config.controller.omega_max = bounds.controller.omega_max;
        config.out_dir = (root / arm).string();
        run_one(config, arm.c_str());
      }
      return 0;
    }

    if (analyze_cmd->parsed()) {
      namespace fs = std::filesystem;
      const std::string records =
          (fs::path(run_dir) / "records.csv").string();
      const std::string dest =
          out_dir.empty() ? (fs::path(run_dir) / "analysis").string() : out_dir;
      const papolab::AnalysisResult result = papolab::run_analysis(records, dest);
      std::printf("analyzed %zu token rows -> %s\n", result.rows, dest.c_str());
      std::printf("mean |P| %.6g  median |P| %.6g%s\n", result.mean_abs_polarity,
                  result.median_abs_polarity,
                  result.degenerate ? "  (degenerate: all polarities zero)" : "");
      return 0;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
