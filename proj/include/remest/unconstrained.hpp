#pragma once

#include "remest/model.hpp"
#include "remest/policy.hpp"
#include "remest/policy_evaluation.hpp"

#include <string>
#include <vector>

namespace remest {

/// Q(s, 0) and Q(s, 1) for a value vector at multiplier lambda.
struct QFactors {
  std::vector<double> idle;
  std::vector<double> transmit;
};

QFactors q_factors(const SystemModel& model, const std::vector<double>& v, double lambda);

struct SpiOptions {
  int max_iterations = 500;
  /// Relative tolerance under which the incumbent action is kept.
  double tie_tolerance = 1e-9;
  /// Initial policy; never-transmit when empty.
  DeterministicPolicy warm_start;
};

struct SpiResult {
  DeterministicPolicy policy;
  GainBias value;
  ThresholdView thresholds;
  int iterations = 0;
};

/// Structured policy iteration. Only error states may transmit; along each
/// (x, z, theta) the improvement scans delta upwards and, once transmitting
/// is chosen, sets every larger delta to transmit. Throws NonConvergence
/// past the iteration cap.
SpiResult spi_solve(const SystemModel& model, double lambda, const SpiOptions& options = {});

enum class ActionScope {
  Admissible,  // transmit only in error states (same action set as SPI)
  All,         // every state-action pair
};

struct RviOptions {
  ActionScope scope = ActionScope::Admissible;
  double tolerance = 1e-10;
  long max_sweeps = 1'000'000;
  /// Aperiodicity transform weight: V <- tau V + (1 - tau) T V.
  double tau = 0.5;
};

struct RviResult {
  DeterministicPolicy policy;  // greedy; idles on ties
  GainBias value;              // gain and bias from the recursion, J and F from exact evaluation
  long sweeps = 0;
};

/// Relative value iteration normalized at the reference state. Throws
/// NonConvergence past the sweep cap.
RviResult rvi_solve(const SystemModel& model, double lambda, const RviOptions& options = {});

struct StructureViolation {
  int x = 0;
  int z = 0;
  int theta = 0;
  std::string reason;
};

/// Empty iff every (x, z, theta) has actions non-decreasing in delta and
/// synced triples never transmit.
std::vector<StructureViolation> check_switching_structure(const DeterministicPolicy& policy,
                                                          const SystemModel& model);

/// max over (x, z, theta) and d1 <= d2 of V(d1) - V(d2); 0 when V is
/// non-decreasing in delta.
double check_value_monotonicity(const GainBias& value, const SystemModel& model);
double check_value_monotonicity(const std::vector<double>& bias, const SystemModel& model);

/// max over (x, z, theta) and d1 <= d2 of
/// Q(d2, 1) + Q(d1, 0) - Q(d2, 0) - Q(d1, 1).
double check_submodularity(const SystemModel& model, const GainBias& value);

}  // namespace remest
