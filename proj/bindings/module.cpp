#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "papolab/controller.hpp"
#include "papolab/optimizer.hpp"
#include "papolab/polarity.hpp"
#include "papolab/run_config.hpp"
#include "papolab/training.hpp"
#include "papolab/verification.hpp"

namespace py = pybind11;

using namespace papolab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "token-level entropy mechanics of softmax policy-gradient "
            "training: exact entropy deltas, the first-order polarity "
            "predictor, and the adaptive branch-reweighting controller";

  py::class_<TokenDistribution>(m, "TokenDistribution")
      .def_readonly("logits", &TokenDistribution::logits)
      .def_readonly("probs", &TokenDistribution::probs)
      .def_readonly("log_probs", &TokenDistribution::log_probs)
      .def_readonly("entropy", &TokenDistribution::entropy)
      .def("__len__", &TokenDistribution::size);

  m.def("softmax_from_logits", &softmax_from_logits, py::arg("logits"),
        "Shift-stable softmax over a logit vector (V >= 2, finite).");

  m.def("logit_update", &logit_update, py::arg("dist"), py::arg("sampled"),
        py::arg("advantage"), py::arg("step"),
        "Policy-gradient logit deltas eta*A*(indicator - probs).");

  m.def("entropy_gradient", &entropy_gradient, py::arg("dist"),
        "Analytic entropy gradient dH/dz_v = -p_v (H + ln p_v).");

  m.def(
      "tendency_components",
      [](const TokenDistribution& dist, std::size_t sampled) {
        const TendencyComponents tc = tendency_components(dist, sampled);
        return py::make_tuple(tc.t1, tc.t2, tc.tendency);
      },
      py::arg("dist"), py::arg("sampled"),
      "(t1, t2, tendency) of reinforcing the sampled token.");

  py::class_<PolarityRecord>(m, "PolarityRecord")
      .def_readonly("token_index", &PolarityRecord::token_index)
      .def_readonly("t1", &PolarityRecord::t1)
      .def_readonly("t2", &PolarityRecord::t2)
      .def_readonly("tendency", &PolarityRecord::tendency)
      .def_readonly("advantage", &PolarityRecord::advantage)
      .def_readonly("polarity", &PolarityRecord::polarity)
      .def_readonly("sampled_prob", &PolarityRecord::sampled_prob)
      .def_readonly("state_entropy", &PolarityRecord::state_entropy);

  m.def("polarity", &polarity, py::arg("dist"), py::arg("sampled"),
        py::arg("advantage"),
        "Signed first-order entropy effect P = A * T of a sampled update.");

  m.def("exact_entropy_delta", &exact_entropy_delta, py::arg("dist"),
        py::arg("sampled"), py::arg("advantage"), py::arg("step"),
        "Exact entropy change of one sampled update (full re-normalization).");

  m.def("token_gradient", &token_gradient, py::arg("p_old"), py::arg("p_new"),
        py::arg("advantage"), py::arg("clip_low"), py::arg("clip_high"),
        "Clipped-surrogate gradient multiplier for the sampled token.");

  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_readwrite("omega_min", &ControllerConfig::omega_min)
      .def_readwrite("omega_max", &ControllerConfig::omega_max)
      .def_readwrite("beta_warm", &ControllerConfig::beta_warm)
      .def_readwrite("beta_run", &ControllerConfig::beta_run)
      .def_readwrite("warmup_steps", &ControllerConfig::warmup_steps)
      .def_readwrite("gate_ratio", &ControllerConfig::gate_ratio)
      .def_readwrite("epsilon", &ControllerConfig::epsilon);

  py::class_<Controller>(m, "Controller")
      .def(py::init<ControllerConfig>(), py::arg("config"))
      .def(
          "observe",
          [](Controller& controller, double mean_entropy) {
            const BranchWeights w = controller.observe(mean_entropy);
            return py::make_tuple(w.positive, w.negative);
          },
          py::arg("mean_entropy"),
          "Feed one step's mean entropy; returns (omega_pos, omega_neg).")
      .def_property_readonly("step_index", &Controller::step_index)
      .def_property_readonly("ema_slope", &Controller::ema_slope)
      .def_property_readonly("gate_ema", &Controller::gate_ema)
      .def_property_readonly("recovery", &Controller::recovery)
      .def_property_readonly("active", &Controller::active)
      .def_property_readonly("ref_slope", &Controller::ref_slope)
      .def_property_readonly("ref_entropy", &Controller::ref_entropy);

  m.def(
      "run_verification",
      [](std::uint64_t seed, std::size_t correlation_cases,
         std::size_t identity_cases, std::size_t gradient_cases) {
        VerificationOptions opts;
        opts.seed = seed;
        opts.correlation_cases = correlation_cases;
        opts.identity_cases = identity_cases;
        opts.gradient_cases = gradient_cases;
        const VerificationReport report = run_verification(opts);
        py::list out;
        for (const CheckResult& check : report.checks) {
          py::dict entry;
          entry["name"] = check.name;
          entry["passed"] = check.passed;
          entry["statistic"] = check.statistic;
          entry["detail"] = check.detail;
          out.append(entry);
        }
        return out;
      },
      py::arg("seed") = 20260801, py::arg("correlation_cases") = 2000,
      py::arg("identity_cases") = 10000, py::arg("gradient_cases") = 100,
      "Run the property suite; returns a list of check dicts.");

  m.def(
      "train",
      [](const std::string& config_path, py::object seed,
         py::object out_dir) {
        RunConfig config = parse_run_config(config_path);
        if (!seed.is_none()) config.seed = seed.cast<std::uint64_t>();
        if (!out_dir.is_none()) config.out_dir = out_dir.cast<std::string>();
        const TrainResult result = run_training(config);
        py::dict out;
        out["metrics_path"] = result.metrics_path;
        out["policy_path"] = result.policy_path;
        out["steps"] = result.frames.size();
        out["final_mean_reward"] = result.final_mean_reward;
        out["final_mean_entropy"] = result.final_mean_entropy;
        return out;
      },
      py::arg("config_path"), py::arg("seed") = py::none(),
      py::arg("out_dir") = py::none(),
      "Run one training config file; returns summary paths and stats.");
}
