#include "papolab/metrics.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace papolab {

std::string to_json_line(const MetricFrame& f) {
  nlohmann::ordered_json j;
  j["step"] = f.step;
  j["seed"] = f.seed;
  j["mean_reward"] = f.mean_reward;
  j["mean_entropy"] = f.mean_entropy;
  j["mean_entropy_states"] = f.mean_entropy_states;
  j["mean_entropy_post"] = f.mean_entropy_post;
  j["ema_slope"] = f.ema_slope;
  j["p_k"] = f.p_k;
  j["omega_pos"] = f.omega_pos;
  j["omega_neg"] = f.omega_neg;
  j["active"] = f.active;
  j["gate_ema"] = f.gate_ema;
  if (f.ref_slope) {
    j["ref_slope"] = *f.ref_slope;
  } else {
    j["ref_slope"] = nullptr;
  }
  if (f.ref_entropy) {
    j["ref_entropy"] = *f.ref_entropy;
  } else {
    j["ref_entropy"] = nullptr;
  }
  j["frac_positive_polarity"] = f.frac_positive_polarity;
  j["mean_abs_polarity"] = f.mean_abs_polarity;
  j["skipped_groups"] = f.skipped_groups;
  j["tokens_total"] = f.tokens_total;
  return j.dump();
}

MetricFrame frame_from_json_line(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  MetricFrame f;
  f.step = j.at("step").get<std::size_t>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.mean_reward = j.at("mean_reward").get<double>();
  f.mean_entropy = j.at("mean_entropy").get<double>();
  f.mean_entropy_states = j.at("mean_entropy_states").get<double>();
  f.mean_entropy_post = j.at("mean_entropy_post").get<double>();
  f.ema_slope = j.at("ema_slope").get<double>();
  f.p_k = j.at("p_k").get<double>();
  f.omega_pos = j.at("omega_pos").get<double>();
  f.omega_neg = j.at("omega_neg").get<double>();
  f.active = j.at("active").get<bool>();
  f.gate_ema = j.at("gate_ema").get<double>();
  if (!j.at("ref_slope").is_null()) {
    f.ref_slope = j.at("ref_slope").get<double>();
  }
  if (!j.at("ref_entropy").is_null()) {
    f.ref_entropy = j.at("ref_entropy").get<double>();
  }
  f.frac_positive_polarity = j.at("frac_positive_polarity").get<double>();
  f.mean_abs_polarity = j.at("mean_abs_polarity").get<double>();
  f.skipped_groups = j.at("skipped_groups").get<std::size_t>();
  f.tokens_total = j.at("tokens_total").get<std::size_t>();
  return f;
}

std::vector<MetricFrame> read_metrics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_metrics_file: cannot open " + path);
  }
  std::vector<MetricFrame> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    frames.push_back(frame_from_json_line(line));
  }
  return frames;
}

}  // namespace papolab
