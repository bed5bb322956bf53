#include "papolab/controller.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace papolab {

void ControllerConfig::validate() const {
  if (!(omega_min > 0.0) || !(omega_max >= omega_min)) {
    throw std::invalid_argument("ControllerConfig: need 0 < omega_min <= omega_max");
  }
  if (!(beta_warm > 0.0 && beta_warm < 1.0) ||
      !(beta_run > 0.0 && beta_run < 1.0)) {
    throw std::invalid_argument("ControllerConfig: EMA coefficients must be in (0,1)");
  }
  if (warmup_steps < 2) {
    throw std::invalid_argument("ControllerConfig: warmup_steps must be >= 2");
  }
  if (!(gate_ratio > 0.0 && gate_ratio < 1.0)) {
    throw std::invalid_argument("ControllerConfig: gate_ratio must be in (0,1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("ControllerConfig: epsilon must be positive");
  }
}

Controller::Controller(ControllerConfig config) : config_(config) {
  config_.validate();
}

BranchWeights Controller::observe(double mean_entropy) {
  if (!std::isfinite(mean_entropy) || mean_entropy < 0.0) {
    throw std::invalid_argument("Controller::observe: entropy must be finite and >= 0");
  }
  ++step_;
  if (step_ == 1) {
    // s_1 = 0; there is no h_0 to difference against.
    ema_slope_ = 0.0;
    gate_ema_ = mean_entropy;
  } else {
    const double beta =
        step_ <= config_.warmup_steps ? config_.beta_warm : config_.beta_run;
    ema_slope_ =
        beta * ema_slope_ + (1.0 - beta) * (mean_entropy - prev_entropy_);
    gate_ema_ = config_.beta_run * gate_ema_ +
                (1.0 - config_.beta_run) * mean_entropy;
  }
  prev_entropy_ = mean_entropy;

  if (step_ == config_.warmup_steps) {
    ref_slope_ = ema_slope_;
    ref_entropy_ = mean_entropy;
  } else if (step_ > config_.warmup_steps && ref_slope_ && *ref_slope_ >= 0.0 &&
             ema_slope_ < 0.0) {
    // The warmup locked a non-negative reference rate, which leaves the
    // recovery metric ill-posed; re-lock at the first negative slope.
    ref_slope_ = ema_slope_;
  }

  if (active_ && ref_entropy_ &&
      gate_ema_ < config_.gate_ratio * *ref_entropy_) {
    active_ = false;  // permanent
  }

  if (step_ > config_.warmup_steps && active_ && ref_slope_ &&
      *ref_slope_ < 0.0) {
    const double raw =
        (ema_slope_ - *ref_slope_) / (-*ref_slope_ + config_.epsilon);
    recovery_ = std::clamp(raw, 0.0, 1.0);
    weights_.negative = config_.omega_min + (config_.omega_max - config_.omega_min) *
                                                recovery_ * recovery_;
    weights_.positive = 1.0 / weights_.negative;
  } else {
    recovery_ = 0.0;
    weights_ = BranchWeights{1.0, 1.0};
  }
  return weights_;
}

BranchWeights Controller::weights_for_step() const {
  if (step_ == 0) {
    throw std::logic_error("weights_for_step: observe has not been called");
  }
  return weights_;
}

void Controller::save(std::ostream& out) const {
  out.precision(17);
  out << "controller v1\n";
  out << "step " << step_ << "\n";
  out << "prev_entropy " << prev_entropy_ << "\n";
  out << "ema_slope " << ema_slope_ << "\n";
  out << "gate_ema " << gate_ema_ << "\n";
  out << "has_refs " << (ref_slope_ ? 1 : 0) << "\n";
  if (ref_slope_) {
    out << "ref_slope " << *ref_slope_ << "\n";
    out << "ref_entropy " << *ref_entropy_ << "\n";
  }
  out << "active " << (active_ ? 1 : 0) << "\n";
  out << "recovery " << recovery_ << "\n";
  out << "weights " << weights_.positive << " " << weights_.negative << "\n";
}

Controller Controller::load(std::istream& in, const ControllerConfig& config) {
  Controller c(config);
  std::string tag, version;
  in >> tag;
  while (in && tag == "#") {  // leading comment lines (e.g. the seed record)
    std::string rest;
    std::getline(in, rest);
    in >> tag;
  }
  in >> version;
  if (tag != "controller" || version != "v1") {
    throw std::runtime_error("Controller::load: bad header");
  }
  int has_refs = 0, active = 0;
  in >> tag >> c.step_;
  in >> tag >> c.prev_entropy_;
  in >> tag >> c.ema_slope_;
  in >> tag >> c.gate_ema_;
  in >> tag >> has_refs;
  if (has_refs) {
    double s = 0.0, h = 0.0;
    in >> tag >> s >> tag >> h;
    c.ref_slope_ = s;
    c.ref_entropy_ = h;
  }
  in >> tag >> active;
  in >> tag >> c.recovery_;
  in >> tag >> c.weights_.positive >> c.weights_.negative;
  if (!in) {
    throw std::runtime_error("Controller::load: truncated state");
  }
  c.active_ = active != 0;
  return c;
}

}  // namespace papolab
