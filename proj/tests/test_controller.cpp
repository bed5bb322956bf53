#include <stdexcept>
#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "papolab/controller.hpp"
#include "papolab/rng.hpp"

using papolab::BranchWeights;
using papolab::Controller;
using papolab::ControllerConfig;
using papolab::Rng;

namespace {

ControllerConfig short_warmup_config() {
  ControllerConfig config;
  config.warmup_steps = 3;
  return config;
}

struct OracleRow {
  double h;
  double s_k;
  double p_k;
  double w_pos;
  double w_neg;
  bool active;
};

// Hand-computed table for the scripted entropy sequence (N_w = 3, betas
// 0.95/0.9, bounds [0.98, 1.02], gate 0.3, eps 1e-8). Covers the reference
// lock, an interior recovery value, clip saturation at both ends, and the
// permanent gate deactivation once smoothed entropy crosses 0.3 * h_ref.
const std::vector<OracleRow> kScriptedOracle = {
    {2, 0, 0, 1, 1, true},
    {1.8999999999999999, -0.0050000000000000088, 0, 1, 1, true},
    {1.8, -0.0097500000000000052, 0, 1, 1, true},
    {1.7989999999999999, -0.0088750000000000166, 0.089743497698975508,
     1.0200728342903436, 0.98032215581516979, true},
    {1.8999999999999999, 0.0021124999999999807, 1, 0.98039215686274506, 1.02,
     true},
    {2, 0.01190124999999999, 1, 0.98039215686274506, 1.02, true},
    {1, -0.08928887499999999, 0, 1.0204081632653061, 0.97999999999999998,
     true},
    {0.10000000000000001, -0.17035998749999998, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.15332398874999997, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.13799158987499999, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.1241924308875, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.11177318779874999, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.10059586901887499, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.090536282116987499, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.081482653905288749, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.073334388514759874, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.066000949663283889, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.059400854696955503, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.053460769227259952, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.048114692304533961, 0, 1.0204081632653061,
     0.97999999999999998, true},
    {0.10000000000000001, -0.043303223074080563, 0, 1, 1, false},
    {2.5, 0.20102709923332743, 0, 1, 1, false},
    {2.5, 0.18092438930999469, 0, 1, 1, false},
};

}  // namespace

TEST_CASE("scripted entropy sequence reproduces the hand-computed table") {
  Controller controller(short_warmup_config());
  for (std::size_t k = 0; k < kScriptedOracle.size(); ++k) {
    const OracleRow& row = kScriptedOracle[k];
    const BranchWeights w = controller.observe(row.h);
    CAPTURE(k);
    CHECK(std::fabs(controller.ema_slope() - row.s_k) <= 1e-9);
    CHECK(std::fabs(controller.recovery() - row.p_k) <= 1e-9);
    CHECK(std::fabs(w.positive - row.w_pos) <= 1e-9);
    CHECK(std::fabs(w.negative - row.w_neg) <= 1e-9);
    CHECK(controller.active() == row.active);
  }
  // reference lock happened at N_w = 3
  REQUIRE(controller.ref_slope().has_value());
  CHECK(std::fabs(*controller.ref_slope() + 0.00975) <= 1e-12);
  CHECK(std::fabs(*controller.ref_entropy() - 1.8) <= 1e-12);
}

TEST_CASE("controller matches an independent recurrence on random traces") {
  ControllerConfig config;
  config.warmup_steps = 5;
  config.omega_min = 0.97;
  config.omega_max = 1.04;
  Controller controller(config);

  // test-local reimplementation of the update rules
  double s = 0.0, gate = 0.0, prev = 0.0;
  bool have_refs = false, active = true;
  double s_ref = 0.0, h_ref = 0.0;

  Rng rng(404);
  double h = 2.0;
  for (std::size_t k = 1; k <= 400; ++k) {
    h = std::max(0.0, h + rng.uniform(-0.08, 0.05));
    const BranchWeights w = controller.observe(h);

    if (k == 1) {
      s = 0.0;
      gate = h;
    } else {
      const double beta =
          k <= config.warmup_steps ? config.beta_warm : config.beta_run;
      s = beta * s + (1 - beta) * (h - prev);
      gate = config.beta_run * gate + (1 - config.beta_run) * h;
    }
    prev = h;
    if (k == config.warmup_steps) {
      s_ref = s;
      h_ref = h;
      have_refs = true;
    } else if (k > config.warmup_steps && have_refs && s_ref >= 0.0 && s < 0.0) {
      s_ref = s;
    }
    if (active && have_refs && gate < config.gate_ratio * h_ref) active = false;

    double expect_neg = 1.0, expect_pos = 1.0, expect_p = 0.0;
    if (k > config.warmup_steps && active && have_refs && s_ref < 0.0) {
      expect_p = std::min(
          1.0, std::max(0.0, (s - s_ref) / (-s_ref + config.epsilon)));
      expect_neg = config.omega_min +
                   (config.omega_max - config.omega_min) * expect_p * expect_p;
      expect_pos = 1.0 / expect_neg;
    }

    CAPTURE(k);
    CHECK(std::fabs(controller.ema_slope() - s) <= 1e-15);
    CHECK(std::fabs(controller.gate_ema() - gate) <= 1e-15);
    CHECK(std::fabs(controller.recovery() - expect_p) <= 1e-15);
    CHECK(std::fabs(w.negative - expect_neg) <= 1e-15);
    CHECK(std::fabs(w.positive - expect_pos) <= 1e-15);
    CHECK(controller.active() == active);
    CHECK(controller.recovery() >= 0.0);
    CHECK(controller.recovery() <= 1.0);
    if (k > config.warmup_steps && controller.active()) {
      CHECK(std::fabs(w.positive * w.negative - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("single-step recovery example") {
  // s_ref = -0.02, s_k = -0.01 with bounds (0.98, 1.02): p = 0.5,
  // w_neg = 0.99, w_pos = 1/0.99
  ControllerConfig config;
  config.warmup_steps = 2;
  Controller controller(config);
  controller.observe(2.0);   // k=1: s=0
  controller.observe(1.6);   // k=2: s = 0.05*(-0.4) = -0.02, lock refs
  REQUIRE(controller.ref_slope().has_value());
  CHECK(std::fabs(*controller.ref_slope() + 0.02) <= 1e-12);

  // engineer h so the slope EMA lands exactly at -0.01:
  // s_3 = 0.9*(-0.02) + 0.1*dh = -0.01  =>  dh = 0.08
  const BranchWeights w = controller.observe(1.68);
  CHECK(std::fabs(controller.ema_slope() + 0.01) <= 1e-12);
  CHECK(std::fabs(controller.recovery() - 0.5) <= 1e-6);
  CHECK(std::fabs(w.negative - 0.99) <= 1e-6);
  CHECK(std::fabs(w.positive - 1.0101010101010102) <= 1e-6);
}

TEST_CASE("clip saturation at both ends") {
  ControllerConfig config;
  config.warmup_steps = 2;
  Controller controller(config);
  controller.observe(2.0);
  controller.observe(1.6);  // s_ref = -0.02 < 0

  // slope equal to the reference: p = 0, w_neg = omega_min
  Controller at_ref(config);
  at_ref.observe(2.0);
  at_ref.observe(1.6);
  const BranchWeights w0 = at_ref.observe(1.58);  // dh = -0.02 -> s stays -0.02
  CHECK(std::fabs(at_ref.recovery()) <= 1e-6);
  CHECK(std::fabs(w0.negative - config.omega_min) <= 1e-6);

  // non-negative slope with negative reference: p = 1, w_neg = omega_max
  const BranchWeights w1 = controller.observe(2.4);  // large rise
  CHECK(controller.ema_slope() >= 0.0);
  CHECK(controller.recovery() == 1.0);
  CHECK(w1.negative == config.omega_max);
}

TEST_CASE("exploit-biased bounds collapse to neutral at full recovery") {
  ControllerConfig config;
  config.warmup_steps = 2;
  config.omega_min = 0.96;
  config.omega_max = 1.00;
  Controller controller(config);
  controller.observe(2.0);
  controller.observe(1.9);
  const BranchWeights w = controller.observe(2.5);  // p saturates at 1
  CHECK(controller.recovery() == 1.0);
  CHECK(std::fabs(w.negative - 1.0) <= 1e-12);
  CHECK(std::fabs(w.positive - 1.0) <= 1e-12);
}

TEST_CASE("warmup holds neutral weights") {
  ControllerConfig config;
  config.warmup_steps = 10;
  Controller controller(config);
  for (int k = 1; k <= 10; ++k) {
    const BranchWeights w = controller.observe(2.0 - 0.05 * k);
    CHECK(w.positive == 1.0);
    CHECK(w.negative == 1.0);
    CHECK(controller.recovery() == 0.0);
  }
}

TEST_CASE("gate deactivation is permanent even if entropy recovers") {
  ControllerConfig config;
  config.warmup_steps = 2;
  Controller controller(config);
  controller.observe(2.0);
  controller.observe(1.9);  // h_ref = 1.9, gate threshold 0.57
  for (int i = 0; i < 60 && controller.active(); ++i) {
    controller.observe(0.01);
  }
  CHECK_FALSE(controller.active());
  for (int i = 0; i < 30; ++i) {
    const BranchWeights w = controller.observe(2.5);
    CHECK(w.positive == 1.0);
    CHECK(w.negative == 1.0);
  }
  CHECK_FALSE(controller.active());
}

TEST_CASE("weight rule is exactly quadratic in the recovery metric") {
  // three-point fit through p in {0, 1/2, 1} recovers the coefficients
  const double wmin = 0.955, wmax = 1.035;
  auto omega_neg = [&](double p) { return wmin + (wmax - wmin) * p * p; };
  const double y0 = omega_neg(0.0);
  const double y_half = omega_neg(0.5);
  const double y1 = omega_neg(1.0);
  // quadratic through (0,y0), (0.5,y_half), (1,y1): a p^2 + b p + c
  const double c = y0;
  const double a = 2.0 * y1 + 2.0 * y0 - 4.0 * y_half;
  const double b = y1 - y0 - a;
  CHECK(std::fabs(c - wmin) <= 1e-12);
  CHECK(std::fabs(a - (wmax - wmin)) <= 1e-12);
  CHECK(std::fabs(b) <= 1e-12);
}

TEST_CASE("non-negative warmup reference re-locks at the first negative slope") {
  ControllerConfig config;
  config.warmup_steps = 3;
  Controller controller(config);
  controller.observe(1.0);
  controller.observe(1.2);
  controller.observe(1.4);  // locks s_ref > 0 (ill-posed for the recovery metric)
  REQUIRE(controller.ref_slope().has_value());
  CHECK(*controller.ref_slope() > 0.0);

  // while the reference is non-negative the weights stay neutral
  BranchWeights w = controller.observe(1.5);
  CHECK(w.negative == 1.0);

  // drive the slope negative; the reference re-locks and engages
  for (int i = 0; i < 40; ++i) {
    w = controller.observe(std::max(0.5, 1.5 - 0.05 * (i + 1)));
    if (controller.ref_slope() && *controller.ref_slope() < 0.0) break;
  }
  REQUIRE(controller.ref_slope().has_value());
  CHECK(*controller.ref_slope() < 0.0);
}

TEST_CASE("observe validates input and weights_for_step requires history") {
  Controller controller(short_warmup_config());
  CHECK_THROWS_AS(controller.weights_for_step(), std::logic_error);
  CHECK_THROWS_AS(controller.observe(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(controller.observe(std::nan("")), std::invalid_argument);
  controller.observe(1.0);
  const BranchWeights w = controller.weights_for_step();
  CHECK(w.positive == 1.0);
}

TEST_CASE("controller state round-trips through save/load") {
  ControllerConfig config;
  config.warmup_steps = 3;
  Controller controller(config);
  const std::vector<double> trace = {2.0, 1.9, 1.8, 1.7, 1.75, 1.6, 1.55};
  for (double h : trace) controller.observe(h);

  std::stringstream buffer;
  controller.save(buffer);
  Controller restored = Controller::load(buffer, config);

  CHECK(restored.step_index() == controller.step_index());
  CHECK(restored.ema_slope() == controller.ema_slope());
  CHECK(restored.gate_ema() == controller.gate_ema());
  CHECK(restored.active() == controller.active());
  CHECK(restored.ref_slope() == controller.ref_slope());
  CHECK(restored.ref_entropy() == controller.ref_entropy());

  // continuing both from the same point yields identical behavior
  for (double h : {1.5, 1.45, 1.6}) {
    const BranchWeights a = controller.observe(h);
    const BranchWeights b = restored.observe(h);
    CHECK(a.positive == b.positive);
    CHECK(a.negative == b.negative);
  }
}

TEST_CASE("configs are validated") {
  ControllerConfig config;
  config.omega_min = -0.1;
  CHECK_THROWS_AS(Controller{config}, std::invalid_argument);
  config = ControllerConfig{};
  config.omega_max = 0.5;  // below omega_min
  CHECK_THROWS_AS(Controller{config}, std::invalid_argument);
  config = ControllerConfig{};
  config.warmup_steps = 1;
  CHECK_THROWS_AS(Controller{config}, std::invalid_argument);
  config = ControllerConfig{};
  config.gate_ratio = 1.5;
  CHECK_THROWS_AS(Controller{config}, std::invalid_argument);
}
