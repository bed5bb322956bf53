#include <stdexcept>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "papolab/polarity.hpp"
#include "papolab/rng.hpp"
#include "papolab/verification.hpp"

using papolab::entropy_gradient;
using papolab::exact_entropy_delta;
using papolab::logit_update;
using papolab::polarity;
using papolab::PolarityRecord;
using papolab::random_distribution;
using papolab::Rng;
using papolab::softmax_from_logits;
using papolab::tendency_components;
using papolab::TendencyComponents;
using papolab::TokenDistribution;

namespace {

TokenDistribution dist_701() {
  return softmax_from_logits({std::log(0.7), std::log(0.2), std::log(0.1)});
}

// brute-force route used as the oracle for the library's t1/t2: plain
// summation straight from the definitions
TendencyComponents tendency_oracle(const TokenDistribution& d,
                                   std::size_t sampled) {
  double h = 0.0;
  for (std::size_t v = 0; v < d.size(); ++v) h -= d.probs[v] * std::log(d.probs[v]);
  TendencyComponents tc;
  tc.t1 = d.probs[sampled] * (h + std::log(d.probs[sampled]));
  for (std::size_t v = 0; v < d.size(); ++v) {
    tc.t2 += d.probs[v] * d.probs[v] * (h + std::log(d.probs[v]));
  }
  tc.tendency = -tc.t1 + tc.t2;
  return tc;
}

}  // namespace

TEST_CASE("logit update matches the gradient-ascent form") {
  const TokenDistribution uniform = softmax_from_logits({0.0, 0.0, 0.0});
  const std::vector<double> d1 = logit_update(uniform, 0, 1.0, 0.3);
  CHECK(std::fabs(d1[0] - 0.2) <= 1e-12);
  CHECK(std::fabs(d1[1] + 0.1) <= 1e-12);
  CHECK(std::fabs(d1[2] + 0.1) <= 1e-12);

  const std::vector<double> d2 = logit_update(dist_701(), 2, -1.0, 0.1);
  CHECK(std::fabs(d2[0] - 0.07) <= 1e-12);
  CHECK(std::fabs(d2[1] - 0.02) <= 1e-12);
  CHECK(std::fabs(d2[2] + 0.09) <= 1e-12);

  const std::vector<double> d3 = logit_update(dist_701(), 1, 0.0, 0.5);
  for (double d : d3) CHECK(d == 0.0);

  CHECK_THROWS_AS(logit_update(dist_701(), 0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(logit_update(dist_701(), 0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(logit_update(dist_701(), 3, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("logit updates sum to zero") {
  Rng rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t vocab = 2 + rng.uniform_index(100);
    const TokenDistribution d =
        random_distribution(rng.next_u64(), vocab, 0.7);
    const std::vector<double> deltas =
        logit_update(d, rng.uniform_index(vocab), rng.uniform(-2.0, 2.0),
                     rng.uniform(1e-4, 1.0));
    double sum = 0.0;
    for (double x : deltas) sum += x;
    CHECK(std::fabs(sum) <= 1e-12);
  }
}

TEST_CASE("tendency components at the uniform state vanish") {
  const TokenDistribution uniform = softmax_from_logits({0.0, 0.0, 0.0});
  for (std::size_t t = 0; t < 3; ++t) {
    const TendencyComponents tc = tendency_components(uniform, t);
    CHECK(std::fabs(tc.t1) <= 1e-12);
    CHECK(std::fabs(tc.t2) <= 1e-12);
    CHECK(std::fabs(tc.tendency) <= 1e-12);
  }
}

TEST_CASE("tendency components match the independent summation oracle") {
  const TokenDistribution d = dist_701();

  const TendencyComponents high = tendency_components(d, 0);
  CHECK(std::fabs(high.t1 - 0.3116005260232233) <= 1e-12);
  CHECK(std::fabs(high.t2 - 0.17080792841611867) <= 1e-12);
  CHECK(std::fabs(high.tendency + 0.14079259760710464) <= 1e-12);

  // low-probability token is expansion-aligned
  const TendencyComponents low = tendency_components(d, 2);
  CHECK(std::fabs(low.t1 + 0.15007665404507084) <= 1e-12);
  CHECK(std::fabs(low.tendency - 0.3208845824611895) <= 1e-12);
  CHECK(low.tendency > 0.0);

  Rng rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t vocab = 2 + rng.uniform_index(60);
    const TokenDistribution r =
        random_distribution(rng.next_u64(), vocab, 0.5);
    const std::size_t token = rng.uniform_index(vocab);
    const TendencyComponents got = tendency_components(r, token);
    const TendencyComponents want = tendency_oracle(r, token);
    CHECK(std::fabs(got.t1 - want.t1) <= 1e-12);
    CHECK(std::fabs(got.t2 - want.t2) <= 1e-12);
    CHECK(std::fabs(got.tendency - want.tendency) <= 1e-12);
    CHECK(got.t2 >= -1e-12);
  }
}

TEST_CASE("record fields and sign structure") {
  const TokenDistribution d = dist_701();
  const PolarityRecord contracting = polarity(d, 0, 1.0);
  CHECK(std::fabs(contracting.polarity + 0.14079259760710464) <= 1e-12);
  CHECK(contracting.polarity < 0.0);
  CHECK(std::fabs(contracting.tendency - (-contracting.t1 + contracting.t2)) <=
        1e-12);
  CHECK(std::fabs(contracting.sampled_prob - 0.7) <= 1e-12);
  CHECK(std::fabs(contracting.state_entropy - 0.8018185525433372) <= 1e-12);

  const PolarityRecord flipped = polarity(d, 0, -1.0);
  CHECK(std::fabs(flipped.polarity - 0.14079259760710464) <= 1e-12);
  CHECK(std::fabs(flipped.polarity + contracting.polarity) <= 1e-15);

  const TokenDistribution uniform = softmax_from_logits({0.0, 0.0, 0.0, 0.0});
  for (double adv : {2.0, -0.5, 0.0}) {
    CHECK(std::fabs(polarity(uniform, 1, adv).polarity) <= 1e-12);
  }
}

TEST_CASE("t1 sign follows the exp(-H) probability threshold") {
  Rng rng(23);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t vocab = 2 + rng.uniform_index(100);
    const TokenDistribution d =
        random_distribution(rng.next_u64(), vocab, 0.3);
    const std::size_t token = rng.uniform_index(vocab);
    const double margin = d.entropy + d.log_probs[token];
    if (std::fabs(margin) <= 1e-12) continue;
    const TendencyComponents tc = tendency_components(d, token);
    CHECK((tc.t1 > 0.0) == (d.probs[token] > std::exp(-d.entropy)));
  }
}

TEST_CASE("expectation of t1 under the policy equals t2") {
  Rng rng(29);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t vocab = 2 + rng.uniform_index(128);
    const TokenDistribution d =
        random_distribution(rng.next_u64(), vocab, 1.0);
    double expect = 0.0;
    for (std::size_t v = 0; v < vocab; ++v) {
      expect += d.probs[v] * tendency_components(d, v).t1;
    }
    CHECK(std::fabs(expect - tendency_components(d, 0).t2) <= 1e-10);
  }
}

TEST_CASE("exact entropy delta: zero advantage and symmetric two-token case") {
  const TokenDistribution d = dist_701();
  CHECK(exact_entropy_delta(d, 1, 0.0, 0.1) == 0.0);

  const TokenDistribution half = softmax_from_logits({0.0, 0.0});
  for (std::size_t token = 0; token < 2; ++token) {
    for (double adv : {1.0, -1.0, 0.3}) {
      for (double eta : {1e-3, 1e-2}) {
        CHECK(exact_entropy_delta(half, token, adv, eta) < 0.0);
      }
    }
  }
}

TEST_CASE("first-order prediction with bounded quadratic remainder") {
  const TokenDistribution d = dist_701();
  const double eta = 1e-3;
  const double dh = exact_entropy_delta(d, 0, 1.0, eta);
  const double predicted = eta * polarity(d, 0, 1.0).polarity;
  CHECK(std::fabs(dh - predicted) <= 10.0 * eta * eta);
  CHECK(dh < 0.0);
}

TEST_CASE("Richardson ratio of the remainder sits near 4") {
  Rng rng(31);
  int in_range = 0;
  const int cases = 400;
  for (int rep = 0; rep < cases; ++rep) {
    const std::size_t vocab = 4 + rng.uniform_index(253);
    const TokenDistribution d =
        random_distribution(rng.next_u64(), vocab, 1.0);
    const std::size_t token = rng.uniform_index(vocab);
    const double adv = rng.uniform(-2.0, 2.0);
    const double p = polarity(d, token, adv).polarity;
    const double eta = 1e-2;
    const double r1 = std::fabs(exact_entropy_delta(d, token, adv, eta) - eta * p);
    const double r2 =
        std::fabs(exact_entropy_delta(d, token, adv, eta / 2) - eta / 2 * p);
    const double ratio = r1 / r2;
    if (ratio >= 3.0 && ratio <= 5.0) ++in_range;
  }
  CHECK(in_range >= static_cast<int>(0.95 * cases));
}

TEST_CASE("analytic entropy gradient matches central differences") {
  Rng rng(37);
  const double fd_step = 1e-6;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t vocab = 2 + rng.uniform_index(40);
    const TokenDistribution d =
        random_distribution(rng.next_u64(), vocab, 0.8);
    const std::vector<double> grad = entropy_gradient(d);
    for (std::size_t v = 0; v < vocab; ++v) {
      std::vector<double> up = d.logits;
      std::vector<double> down = d.logits;
      up[v] += fd_step;
      down[v] -= fd_step;
      const double fd = (softmax_from_logits(up).entropy -
                         softmax_from_logits(down).entropy) /
                        (2.0 * fd_step);
      CHECK(std::fabs(fd - grad[v]) <= 1e-6);
    }
  }
}
