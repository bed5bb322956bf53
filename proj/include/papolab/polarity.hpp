#pragma once

#include <cstddef>
#include <vector>

#include "papolab/distribution.hpp"

namespace papolab {

// First-order entropy effect of reinforcing one sampled token, split into
// the sampled-token term t1 = p_t(H + ln p_t) and the distributional
// correction t2 = sum_v p_v^2 (H + ln p_v). The intrinsic tendency is
// T = -t1 + t2: positive means the update expands local entropy.
struct TendencyComponents {
  double t1 = 0.0;
  double t2 = 0.0;
  double tendency = 0.0;
};

// Everything recorded about one sampled-token update.
struct PolarityRecord {
  std::size_t token_index = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  double tendency = 0.0;   // T = -t1 + t2
  double advantage = 0.0;  // A
  double polarity = 0.0;   // P = A * T
  double sampled_prob = 0.0;
  double state_entropy = 0.0;  // nats
};

// Logit deltas of one policy-gradient step on A*log pi(sampled | s):
// dz[v] = eta * A * (1[v == sampled] - p_v). The deltas sum to zero.
// Throws on eta <= 0 or sampled out of range.
std::vector<double> logit_update(const TokenDistribution& dist,
                                 std::size_t sampled, double advantage,
                                 double step);

// Analytic entropy gradient dH/dz_v = -p_v (H + ln p_v).
std::vector<double> entropy_gradient(const TokenDistribution& dist);

TendencyComponents tendency_components(const TokenDistribution& dist,
                                       std::size_t sampled);

PolarityRecord polarity(const TokenDistribution& dist, std::size_t sampled,
                        double advantage);

// Exact entropy change of the sampled update: H(softmax(z + dz)) - H(softmax(z))
// by full re-normalization. This is the brute-force oracle for the
// first-order prediction eta * P.
double exact_entropy_delta(const TokenDistribution& dist, std::size_t sampled,
                           double advantage, double step);

}  // namespace papolab
