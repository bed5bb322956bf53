#include "papolab/polarity.hpp"

#include <cmath>
#include <stdexcept>

namespace papolab {

std::vector<double> logit_update(const TokenDistribution& dist,
                                 std::size_t sampled, double advantage,
                                 double step) {
  if (step <= 0.0 || !std::isfinite(step)) {
    throw std::invalid_argument("logit_update: step size must be positive");
  }
  if (sampled >= dist.size()) {
    throw std::invalid_argument("logit_update: sampled token out of range");
  }
  std::vector<double> deltas(dist.size());
  for (std::size_t v = 0; v < dist.size(); ++v) {
    const double indicator = (v == sampled) ? 1.0 : 0.0;
    deltas[v] = step * advantage * (indicator - dist.probs[v]);
  }
  return deltas;
}

std::vector<double> entropy_gradient(const TokenDistribution& dist) {
  std::vector<double> grad(dist.size());
  for (std::size_t v = 0; v < dist.size(); ++v) {
    grad[v] = -dist.probs[v] * (dist.entropy + dist.log_probs[v]);
  }
  return grad;
}

TendencyComponents tendency_components(const TokenDistribution& dist,
                                       std::size_t sampled) {
  if (sampled >= dist.size()) {
    throw std::invalid_argument("tendency_components: sampled token out of range");
  }
  TendencyComponents out;
  const double h = dist.entropy;
  out.t1 = dist.probs[sampled] * (h + dist.log_probs[sampled]);
  double t2 = 0.0;
  for (std::size_t v = 0; v < dist.size(); ++v) {
    const double p = dist.probs[v];
    t2 += p * p * (h + dist.log_probs[v]);
  }
  out.t2 = t2;
  out.tendency = -out.t1 + out.t2;
  return out;
}

PolarityRecord polarity(const TokenDistribution& dist, std::size_t sampled,
                        double advantage) {
  const TendencyComponents tc = tendency_components(dist, sampled);
  PolarityRecord rec;
  rec.token_index = sampled;
  rec.t1 = tc.t1;
  rec.t2 = tc.t2;
  rec.tendency = tc.tendency;
  rec.advantage = advantage;
  rec.polarity = advantage * tc.tendency;
  rec.sampled_prob = dist.probs[sampled];
  rec.state_entropy = dist.entropy;
  return rec;
}

double exact_entropy_delta(const TokenDistribution& dist, std::size_t sampled,
                           double advantage, double step) {
  const std::vector<double> deltas = logit_update(dist, sampled, advantage, step);
  std::vector<double> shifted(dist.size());
  for (std::size_t v = 0; v < dist.size(); ++v) {
    shifted[v] = dist.logits[v] + deltas[v];
  }
  const TokenDistribution after = softmax_from_logits(shifted);
  return after.entropy - dist.entropy;
}

}  // namespace papolab
