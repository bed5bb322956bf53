#include "papolab/policy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "papolab/rng.hpp"

namespace papolab {

TabularPolicy::TabularPolicy(std::size_t vocab_size, std::size_t context_order)
    : TabularPolicy(vocab_size, context_order,
                    std::vector<double>(vocab_size, 0.0)) {}

TabularPolicy::TabularPolicy(std::size_t vocab_size, std::size_t context_order,
                             std::vector<double> default_logits)
    : vocab_size_(vocab_size),
      context_order_(context_order),
      default_logits_(std::move(default_logits)) {
  if (vocab_size_ < 2) {
    throw std::invalid_argument("TabularPolicy: vocab_size must be >= 2");
  }
  if (default_logits_.size() != vocab_size_) {
    throw std::invalid_argument("TabularPolicy: default_logits length mismatch");
  }
  for (double z : default_logits_) {
    if (!std::isfinite(z)) {
      throw std::invalid_argument("TabularPolicy: non-finite default logit");
    }
  }
}

ContextKey TabularPolicy::context_key(
    const std::vector<std::int32_t>& history) const {
  ContextKey key(context_order_, begin_marker());
  const std::size_t take = std::min(context_order_, history.size());
  for (std::size_t j = 0; j < take; ++j) {
    key[j] = history[history.size() - take + j];
  }
  return key;
}

const std::vector<double>& TabularPolicy::logits_at(
    const ContextKey& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? default_logits_ : it->second;
}

TokenDistribution TabularPolicy::distribution_at(const ContextKey& key,
                                                 double temperature) const {
  if (temperature <= 0.0) {
    throw std::invalid_argument("distribution_at: temperature must be positive");
  }
  const std::vector<double>& logits = logits_at(key);
  if (temperature == 1.0) {
    return softmax_from_logits(logits);
  }
  std::vector<double> scaled(logits.size());
  for (std::size_t v = 0; v < logits.size(); ++v) {
    scaled[v] = logits[v] / temperature;
  }
  return softmax_from_logits(scaled);
}

void TabularPolicy::apply_logit_deltas(const ContextKey& key,
                                       const std::vector<double>& deltas) {
  if (deltas.size() != vocab_size_) {
    throw std::invalid_argument("apply_logit_deltas: deltas length mismatch");
  }
  for (double d : deltas) {
    if (!std::isfinite(d)) {
      throw std::invalid_argument("apply_logit_deltas: non-finite delta");
    }
  }
  auto [it, inserted] = table_.try_emplace(key, default_logits_);
  std::vector<double>& logits = it->second;
  for (std::size_t v = 0; v < vocab_size_; ++v) {
    logits[v] += deltas[v];
  }
}

void TabularPolicy::set_logits(const ContextKey& key,
                               std::vector<double> logits) {
  if (logits.size() != vocab_size_) {
    throw std::invalid_argument("set_logits: logits length mismatch");
  }
  for (double z : logits) {
    if (!std::isfinite(z)) {
      throw std::invalid_argument("set_logits: non-finite logit");
    }
  }
  table_[key] = std::move(logits);
}

Trajectory sample_trajectory(const TabularPolicy& policy,
                             const std::vector<std::int32_t>& prompt,
                             std::uint64_t seed, std::size_t max_len,
                             double temperature, std::int32_t stop_token) {
  if (max_len < 1) {
    throw std::invalid_argument("sample_trajectory: max_len must be >= 1");
  }
  Trajectory traj;
  traj.prompt = prompt;
  Rng rng(seed);

  std::vector<std::int32_t> history = prompt;
  for (std::size_t t = 0; t < max_len; ++t) {
    TrajectoryStep step;
    step.context = policy.context_key(history);
    step.snapshot = policy.distribution_at(step.context, temperature);
    const std::size_t tok = rng.sample_discrete(step.snapshot.probs);
    step.token = static_cast<std::int32_t>(tok);
    step.sampled_prob = step.snapshot.probs[tok];

    traj.tokens.push_back(step.token);
    history.push_back(step.token);
    traj.per_step.push_back(std::move(step));
    if (stop_token >= 0 && traj.tokens.back() == stop_token) break;
  }
  return traj;
}

namespace {

void write_doubles(std::FILE* f, const std::vector<double>& xs) {
  for (double x : xs) {
    std::fprintf(f, " %.17g", x);
  }
}

}  // namespace

void save_policy(const TabularPolicy& policy, const std::string& path,
                 std::uint64_t seed) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) {
    throw std::runtime_error("save_policy: cannot open " + path);
  }
  std::fprintf(f, "papolab-policy v1\n");
  std::fprintf(f, "seed %llu\n", static_cast<unsigned long long>(seed));
  std::fprintf(f, "vocab_size %zu\n", policy.vocab_size());
  std::fprintf(f, "context_order %zu\n", policy.context_order());
  std::fprintf(f, "contexts %zu\n", policy.num_contexts());
  std::fprintf(f, "default");
  write_doubles(f, policy.default_logits());
  std::fprintf(f, "\n");
  for (const auto& [key, logits] : policy.table()) {
    std::fprintf(f, "ctx");
    for (std::int32_t k : key) {
      std::fprintf(f, " %d", k);
    }
    write_doubles(f, logits);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

TabularPolicy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_policy: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != "papolab-policy v1") {
    throw std::runtime_error("load_policy: bad header in " + path);
  }
  std::uint64_t seed = 0;
  std::size_t vocab = 0, order = 0, contexts = 0;
  std::string tag;
  in >> tag >> seed;
  if (tag != "seed") throw std::runtime_error("load_policy: expected seed");
  in >> tag >> vocab;
  if (tag != "vocab_size") throw std::runtime_error("load_policy: expected vocab_size");
  in >> tag >> order;
  if (tag != "context_order") throw std::runtime_error("load_policy: expected context_order");
  in >> tag >> contexts;
  if (tag != "contexts") throw std::runtime_error("load_policy: expected contexts");

  in >> tag;
  if (tag != "default") throw std::runtime_error("load_policy: expected default");
  std::vector<double> defaults(vocab);
  for (double& d : defaults) in >> d;

  TabularPolicy policy(vocab, order, defaults);
  for (std::size_t i = 0; i < contexts; ++i) {
    in >> tag;
    if (tag != "ctx") throw std::runtime_error("load_policy: expected ctx line");
    ContextKey key(order);
    for (std::int32_t& k : key) in >> k;
    std::vector<double> logits(vocab);
    for (double& z : logits) in >> z;
    policy.set_logits(key, std::move(logits));
  }
  if (!in) {
    throw std::runtime_error("load_policy: truncated file " + path);
  }
  return policy;
}

}  // namespace papolab
