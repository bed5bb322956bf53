#pragma once

#include <cstddef>
#include <vector>

namespace papolab {

// Next-token softmax distribution at one decoding state. Immutable after
// construction; log-probabilities are the primary representation and
// probabilities are exponentiated from them.
struct TokenDistribution {
  std::vector<double> logits;
  std::vector<double> probs;
  std::vector<double> log_probs;
  double entropy = 0.0;  // nats

  std::size_t size() const { return logits.size(); }
};

// Shift-stable softmax (max-logit subtraction). Requires V >= 2 and finite
// logits; throws std::invalid_argument otherwise.
TokenDistribution softmax_from_logits(const std::vector<double>& logits);

// Entropy of a probability/log-probability pairing, -sum p*log p.
double entropy_from(const std::vector<double>& probs,
                    const std::vector<double>& log_probs);

}  // namespace papolab
