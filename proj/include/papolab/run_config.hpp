#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "papolab/controller.hpp"
#include "papolab/optimizer.hpp"
#include "papolab/tasks.hpp"

namespace papolab {

// Everything one training run needs. Defaults follow the standard recipe:
// group size 8, clip range [0.2, 0.28], weight bounds [0.98, 1.02], slope
// EMAs 0.95/0.9, 20 warmup steps, gate ratio 0.3.
struct RunConfig {
  TaskSpec task;
  std::size_t context_order = 3;
  std::size_t group_size = 8;
  std::size_t groups_per_step = 4;
  double temperature = 1.0;
  StepConfig step;
  ControllerConfig controller;
  std::size_t total_steps = 200;
  std::uint64_t seed = 1;
  std::string out_dir = "out/run";
  std::size_t record_every = 10;  // polarity capture period; 0 disables
  std::string resume_dir;         // optional snapshot directory to resume from

  void validate() const;
};

// Named presets. "defaults" is the standard recipe above with papo mode;
// "explore" / "moderate" / "exploit" differ only in the weight bounds:
// (0.99, 1.06), (0.98, 1.03), (0.96, 1.00).
RunConfig preset_config(const std::string& name);

// Sections of [section] / key = value lines with # comments. Unknown keys
// are rejected. Values in `overlay` win over the file's.
RunConfig parse_run_config(const std::string& path);
RunConfig run_config_from_map(
    const std::map<std::string, std::string>& entries, RunConfig base = {});

// Raw parse of the key-value file into "section.key" -> value.
std::map<std::string, std::string> parse_key_value_file(
    const std::string& path);

}  // namespace papolab
