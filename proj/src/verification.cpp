#include "papolab/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "papolab/polarity.hpp"
#include "papolab/rng.hpp"

namespace papolab {

bool VerificationReport::all_passed() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

double pearson_correlation(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

bool check_all_non_negative(const std::vector<double>& values, double tol) {
  for (double v : values) {
    if (v < -tol) return false;
  }
  return true;
}

bool check_all_below(const std::vector<double>& abs_errors, double tol) {
  for (double e : abs_errors) {
    if (!(std::fabs(e) <= tol)) return false;
  }
  return true;
}

TokenDistribution random_distribution(std::uint64_t seed, std::size_t vocab,
                                      double alpha) {
  Rng rng(seed);
  const std::vector<double> probs = rng.dirichlet(vocab, alpha);
  std::vector<double> logits(vocab);
  for (std::size_t v = 0; v < vocab; ++v) {
    logits[v] = std::log(probs[v]);
  }
  return softmax_from_logits(logits);
}

namespace {

struct FuzzCase {
  TokenDistribution dist;
  std::size_t token = 0;
  double advantage = 0.0;
};

FuzzCase draw_case(Rng& rng, const VerificationOptions& opts) {
  FuzzCase c;
  const std::size_t vocab =
      opts.min_vocab + rng.uniform_index(opts.max_vocab - opts.min_vocab + 1);
  // log-uniform concentration in [0.3, 3]: flat to fairly peaked
  const double alpha = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
  c.dist = random_distribution(rng.next_u64(), vocab, alpha);
  c.token = rng.uniform_index(vocab);
  c.advantage = rng.uniform(-2.0, 2.0);
  return c;
}

// z in the covariance identity is computed by an independent route:
// Cov(p, ln p) = E_p[p ln p] - E_p[p] E_p[ln p].
double covariance_route(const TokenDistribution& dist) {
  double e_p_lnp = 0.0, e_p = 0.0, e_lnp = 0.0;
  for (std::size_t v = 0; v < dist.size(); ++v) {
    const double p = dist.probs[v];
    const double lp = dist.log_probs[v];
    e_p_lnp += p * p * lp;
    e_p += p * p;
    e_lnp += p * lp;
  }
  return e_p_lnp - e_p * e_lnp;
}

std::string format_stat(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

VerificationReport run_verification(const VerificationOptions& opts) {
  VerificationReport report;
  Rng rng(opts.seed);

  // --- first-order fidelity: correlation and Richardson remainder ---
  if (opts.correlation_cases > 0) {
    std::vector<double> predicted, measured;
    predicted.reserve(opts.correlation_cases);
    measured.reserve(opts.correlation_cases);
    std::size_t richardson_in_range = 0;
    std::vector<double> ratios;
    ratios.reserve(opts.correlation_cases);

    for (std::size_t i = 0; i < opts.correlation_cases; ++i) {
      const FuzzCase c = draw_case(rng, opts);
      const PolarityRecord rec = polarity(c.dist, c.token, c.advantage);

      const double dh = exact_entropy_delta(c.dist, c.token, c.advantage,
                                            opts.eta_correlation);
      predicted.push_back(opts.eta_correlation * rec.polarity);
      measured.push_back(dh);

      const double eta = opts.eta_richardson;
      const double r_full = std::fabs(
          exact_entropy_delta(c.dist, c.token, c.advantage, eta) -
          eta * rec.polarity);
      const double r_half = std::fabs(
          exact_entropy_delta(c.dist, c.token, c.advantage, eta / 2.0) -
          (eta / 2.0) * rec.polarity);
      const double ratio = r_full / r_half;
      ratios.push_back(ratio);
      if (ratio >= 3.0 && ratio <= 5.0) ++richardson_in_range;
    }

    const double corr_raw = pearson_correlation(predicted, measured);
    report.checks.push_back({"first_order_correlation_raw", corr_raw > 0.999,
                             corr_raw,
                             "Pearson(eta*P, exact dH) at eta=" +
                                 format_stat(opts.eta_correlation)});

    // z-scored variant (affine-invariant, reported alongside the raw value)
    auto zscore = [](std::vector<double> xs) {
      double m = 0.0;
      for (double x : xs) m += x;
      m /= static_cast<double>(xs.size());
      double s = 0.0;
      for (double x : xs) s += (x - m) * (x - m);
      s = std::sqrt(s / static_cast<double>(xs.size()));
      if (s > 0.0) {
        for (double& x : xs) x = (x - m) / s;
      }
      return xs;
    };
    const double corr_z =
        pearson_correlation(zscore(predicted), zscore(measured));
    report.checks.push_back({"first_order_correlation_zscored",
                             corr_z > 0.999, corr_z,
                             "Pearson on z-scored pairs"});

    const double frac = static_cast<double>(richardson_in_range) /
                        static_cast<double>(opts.correlation_cases);
    std::sort(ratios.begin(), ratios.end());
    const double med_ratio = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
    report.checks.push_back(
        {"richardson_ratio", frac >= 0.95, frac,
         "fraction of r(eta)/r(eta/2) in [3,5] at eta=" +
             format_stat(opts.eta_richardson) +
             ", median ratio " + format_stat(med_ratio)});
  }

  // --- analytic identities over fuzzed distributions ---
  if (opts.identity_cases > 0) {
    double min_t2 = 0.0;
    double max_cov_err = 0.0;
    double max_expect_err = 0.0;
    bool signs_ok = true;

    for (std::size_t i = 0; i < opts.identity_cases; ++i) {
      const std::size_t vocab =
          opts.min_vocab +
          rng.uniform_index(opts.max_vocab - opts.min_vocab + 1);
      const double alpha = std::exp(rng.uniform(std::log(0.05), std::log(3.0)));
      const TokenDistribution dist =
          random_distribution(rng.next_u64(), vocab, alpha);
      const std::size_t token = rng.uniform_index(vocab);
      const TendencyComponents tc = tendency_components(dist, token);

      min_t2 = std::min(min_t2, tc.t2);
      max_cov_err =
          std::max(max_cov_err, std::fabs(tc.t2 - covariance_route(dist)));

      // expectation identity: sum_v p_v t1(v) = t2
      double expect = 0.0;
      for (std::size_t v = 0; v < vocab; ++v) {
        const double t1_v =
            dist.probs[v] * (dist.entropy + dist.log_probs[v]);
        expect += dist.probs[v] * t1_v;
      }
      max_expect_err = std::max(max_expect_err, std::fabs(expect - tc.t2));

      // sign threshold with a 1e-12 dead band on H + ln p_t
      const double margin = dist.entropy + dist.log_probs[token];
      if (std::fabs(margin) > 1e-12) {
        if ((tc.t1 > 0.0) != (margin > 0.0)) signs_ok = false;
      }
    }

    report.checks.push_back({"t2_non_negative", min_t2 >= -1e-12, min_t2,
                             "min t2 over fuzzed distributions"});
    report.checks.push_back({"t2_equals_covariance", max_cov_err <= 1e-12,
                             max_cov_err, "max |t2 - Cov(p, ln p)|"});
    report.checks.push_back({"expectation_identity", max_expect_err <= 1e-10,
                             max_expect_err, "max |sum_v p_v t1(v) - t2|"});
    report.checks.push_back({"t1_sign_threshold", signs_ok, signs_ok ? 1.0 : 0.0,
                             "sign(t1) vs p_t > exp(-H), 1e-12 dead band"});
  }

  // --- analytic entropy gradient vs central finite differences ---
  if (opts.gradient_cases > 0) {
    const double fd_step = 1e-6;
    double max_err = 0.0;
    for (std::size_t i = 0; i < opts.gradient_cases; ++i) {
      const std::size_t vocab =
          opts.min_vocab +
          rng.uniform_index(opts.max_vocab - opts.min_vocab + 1);
      const double alpha = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
      const TokenDistribution dist =
          random_distribution(rng.next_u64(), vocab, alpha);
      const std::vector<double> grad = entropy_gradient(dist);
      for (std::size_t v = 0; v < vocab; ++v) {
        std::vector<double> up = dist.logits;
        std::vector<double> down = dist.logits;
        up[v] += fd_step;
        down[v] -= fd_step;
        const double fd = (softmax_from_logits(up).entropy -
                           softmax_from_logits(down).entropy) /
                          (2.0 * fd_step);
        max_err = std::max(max_err, std::fabs(fd - grad[v]));
      }
    }
    report.checks.push_back({"entropy_gradient_fd", max_err <= 1e-6, max_err,
                             "max per-coordinate |analytic - central FD|"});
  }

  // --- V = 2 edge distributions ---
  {
    bool ok = true;
    double worst_residual = 0.0;
    const std::vector<std::vector<double>> edges = {
        {0.999, 0.001}, {0.5, 0.5}, {0.9, 0.1}};
    for (const auto& probs : edges) {
      std::vector<double> logits(probs.size());
      for (std::size_t v = 0; v < probs.size(); ++v) {
        logits[v] = std::log(probs[v]);
      }
      const TokenDistribution dist = softmax_from_logits(logits);
      for (std::size_t token = 0; token < 2; ++token) {
        const TendencyComponents tc = tendency_components(dist, token);
        if (tc.t2 < -1e-12) ok = false;
        if (std::fabs(tc.t2 - covariance_route(dist)) > 1e-12) ok = false;
        for (double adv : {1.0, -1.0}) {
          const double eta = 1e-3;
          const PolarityRecord rec = polarity(dist, token, adv);
          const double dh = exact_entropy_delta(dist, token, adv, eta);
          const double residual = std::fabs(dh - eta * rec.polarity);
          worst_residual = std::max(worst_residual, residual);
          if (residual > 10.0 * eta * eta) ok = false;
        }
      }
    }
    report.checks.push_back({"edge_cases_v2", ok, worst_residual,
                             "V=2 edge distributions incl. (0.999, 0.001)"});
  }

  return report;
}

}  // namespace papolab
