#include "papolab/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace papolab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  }
  if (used != value.size()) {
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
  if (used != value.size()) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
  return out;
}

std::int32_t to_i32(const std::string& key, const std::string& value) {
  return static_cast<std::int32_t>(to_u64(key, value));
}

}  // namespace

void RunConfig::validate() const {
  task.validate();
  step.validate();
  controller.validate();
  if (group_size < 2) {
    throw std::invalid_argument("RunConfig: group_size must be >= 2");
  }
  if (groups_per_step < 1) {
    throw std::invalid_argument("RunConfig: groups_per_step must be >= 1");
  }
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("RunConfig: temperature must be positive");
  }
  if (out_dir.empty()) {
    throw std::invalid_argument("RunConfig: out_dir must be set");
  }
}

RunConfig preset_config(const std::string& name) {
  RunConfig config;
  if (name == "defaults") {
    config.step.mode = Mode::kPapo;
    config.controller.omega_min = 0.98;
    config.controller.omega_max = 1.02;
    return config;
  }
  if (name == "explore") {
    config.step.mode = Mode::kPapo;
    config.controller.omega_min = 0.99;
    config.controller.omega_max = 1.06;
    return config;
  }
  if (name == "moderate") {
    config.step.mode = Mode::kPapo;
    config.controller.omega_min = 0.98;
    config.controller.omega_max = 1.03;
    return config;
  }
  if (name == "exploit") {
    config.step.mode = Mode::kPapo;
    config.controller.omega_min = 0.96;
    config.controller.omega_max = 1.00;
    return config;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::map<std::string, std::string> parse_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path);
  }
  std::map<std::string, std::string> entries;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config: bad section at line " +
                                    std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config: empty key at line " +
                                  std::to_string(lineno));
    }
    entries[section.empty() ? key : section + "." + key] = value;
  }
  return entries;
}

RunConfig run_config_from_map(
    const std::map<std::string, std::string>& entries, RunConfig base) {
  RunConfig& c = base;
  for (const auto& [key, value] : entries) {
    if (key == "task.name") {
      c.task.kind = task_kind_from_string(value);
    } else if (key == "task.vocab_size") {
      c.task.vocab_size = to_u64(key, value);
    } else if (key == "task.max_len") {
      c.task.max_len = to_u64(key, value);
    } else if (key == "task.modulus") {
      c.task.modulus = to_i32(key, value);
    } else if (key == "task.target") {
      c.task.target = to_i32(key, value);
    } else if (key == "task.pattern_length") {
      c.task.pattern_length = to_u64(key, value);
    } else if (key == "policy.context_order") {
      c.context_order = to_u64(key, value);
    } else if (key == "rollout.group_size") {
      c.group_size = to_u64(key, value);
    } else if (key == "rollout.groups_per_step") {
      c.groups_per_step = to_u64(key, value);
    } else if (key == "rollout.temperature") {
      c.temperature = to_double(key, value);
    } else if (key == "optimizer.mode") {
      c.step.mode = mode_from_string(value);
    } else if (key == "optimizer.step_size") {
      c.step.step_size = to_double(key, value);
    } else if (key == "optimizer.clip_low") {
      c.step.clip_low = to_double(key, value);
    } else if (key == "optimizer.clip_high") {
      c.step.clip_high = to_double(key, value);
    } else if (key == "optimizer.inner_epochs") {
      c.step.inner_epochs = to_u64(key, value);
    } else if (key == "optimizer.entropy_alpha") {
      c.step.entropy_alpha = to_double(key, value);
    } else if (key == "optimizer.top_fraction") {
      c.step.top_fraction = to_double(key, value);
    } else if (key == "controller.omega_min") {
      c.controller.omega_min = to_double(key, value);
    } else if (key == "controller.omega_max") {
      c.controller.omega_max = to_double(key, value);
    } else if (key == "controller.beta_warm") {
      c.controller.beta_warm = to_double(key, value);
    } else if (key == "controller.beta_run") {
      c.controller.beta_run = to_double(key, value);
    } else if (key == "controller.warmup_steps") {
      c.controller.warmup_steps = to_u64(key, value);
    } else if (key == "controller.gate_ratio") {
      c.controller.gate_ratio = to_double(key, value);
    } else if (key == "controller.epsilon") {
      c.controller.epsilon = to_double(key, value);
    } else if (key == "run.steps") {
      c.total_steps = to_u64(key, value);
    } else if (key == "run.seed") {
      c.seed = to_u64(key, value);
    } else if (key == "run.out_dir") {
      c.out_dir = value;
    } else if (key == "run.record_every") {
      c.record_every = to_u64(key, value);
    } else if (key == "run.resume_dir") {
      c.resume_dir = value;
    } else {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }
  return base;
}

RunConfig parse_run_config(const std::string& path) {
  return run_config_from_map(parse_key_value_file(path));
}

}  // namespace papolab
