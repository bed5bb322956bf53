#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "papolab/distribution.hpp"

namespace papolab {

struct VerificationOptions {
  std::uint64_t seed = 20260801;
  std::size_t correlation_cases = 10000;   // first-order + Richardson fuzz
  std::size_t identity_cases = 100000;     // analytic identity fuzz
  std::size_t gradient_cases = 1000;       // finite-difference gradient check
  double eta_correlation = 1e-3;
  double eta_richardson = 1e-2;
  std::size_t min_vocab = 4;
  std::size_t max_vocab = 256;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double statistic = 0.0;  // the quantity the threshold applies to
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Pearson correlation of two equally sized samples.
double pearson_correlation(const std::vector<double>& x,
                           const std::vector<double>& y);

// Predicates behind the fuzz checks; exposed so tests can feed fixtures.
bool check_all_non_negative(const std::vector<double>& values, double tol);
bool check_all_below(const std::vector<double>& abs_errors, double tol);

// Random Dirichlet distribution as a TokenDistribution (logits = ln p).
TokenDistribution random_distribution(std::uint64_t seed, std::size_t vocab,
                                      double alpha);

// Runs the full property suite of the entropy-mechanics module on fuzzed
// inputs: first-order fidelity (correlation and Richardson remainder), the
// analytic identities for t1/t2, the finite-difference entropy-gradient
// check, and fixed V=2 edge distributions.
VerificationReport run_verification(const VerificationOptions& options = {});

}  // namespace papolab
