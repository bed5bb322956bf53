#include "papolab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace papolab {

double entropy_from(const std::vector<double>& probs,
                    const std::vector<double>& log_probs) {
  double h = 0.0;
  for (std::size_t v = 0; v < probs.size(); ++v) {
    h -= probs[v] * log_probs[v];
  }
  return h;
}

TokenDistribution softmax_from_logits(const std::vector<double>& logits) {
  if (logits.size() < 2) {
    throw std::invalid_argument("softmax_from_logits: vocabulary must have V >= 2");
  }
  for (double z : logits) {
    if (!std::isfinite(z)) {
      throw std::invalid_argument("softmax_from_logits: non-finite logit");
    }
  }

  TokenDistribution dist;
  dist.logits = logits;
  const double z_max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) {
    sum += std::exp(z - z_max);
  }
  const double log_sum = std::log(sum);

  dist.log_probs.resize(logits.size());
  dist.probs.resize(logits.size());
  for (std::size_t v = 0; v < logits.size(); ++v) {
    dist.log_probs[v] = (logits[v] - z_max) - log_sum;
    dist.probs[v] = std::exp(dist.log_probs[v]);
  }
  dist.entropy = entropy_from(dist.probs, dist.log_probs);
  return dist;
}

}  // namespace papolab
