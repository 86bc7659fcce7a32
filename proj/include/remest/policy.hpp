#pragma once

#include "remest/model.hpp"

#include <cstdint>
#include <limits>
#include <set>
#include <vector>

namespace remest {

/// Action table over dense state indices (0 = idle, 1 = transmit).
struct DeterministicPolicy {
  std::vector<std::uint8_t> actions;

  int operator[](int s) const { return actions[s]; }
  std::size_t size() const { return actions.size(); }
  bool operator==(const DeterministicPolicy& o) const { return actions == o.actions; }
  bool operator!=(const DeterministicPolicy& o) const { return actions != o.actions; }

  static DeterministicPolicy never(const SystemModel& model);
  /// Transmit in every error state.
  static DeterministicPolicy reactive(const SystemModel& model);
  static DeterministicPolicy always(const SystemModel& model);
};

/// Per-(x, z, theta) switching thresholds. A triple transmits at state-delta
/// d iff d + 1 >= threshold, i.e. the threshold is stated on the AoCE the
/// slot would carry if the error persists. Reactive = 1 everywhere.
struct ThresholdView {
  static constexpr int kSynced = 0;
  static constexpr int kNever = std::numeric_limits<int>::max();

  int alphabet = 0;
  int theta_max = 0;
  /// Indexed by (x * alphabet + z) * (theta_max + 1) + theta.
  std::vector<int> thresholds;

  int at(int x, int z, int theta) const {
    return thresholds[(x * alphabet + z) * (theta_max + 1) + theta];
  }
  /// Distinct thresholds over error triples (kNever included when present).
  std::set<int> distinct() const;
  bool operator==(const ThresholdView& o) const { return thresholds == o.thresholds; }
};

/// Thresholds of a policy; requires the action to be monotone in delta on
/// each triple for the view to be exact (see check_switching_structure).
ThresholdView threshold_view(const SystemModel& model, const DeterministicPolicy& policy);

/// Error triples transmit according to their threshold; synced triples idle.
DeterministicPolicy policy_from_thresholds(const SystemModel& model, const ThresholdView& view);

/// Per-step randomization: policy_minus with probability p, policy_plus
/// otherwise.
struct MixturePolicy {
  double p = 0.0;
  double p_linear = 0.0;  // interpolation before recalibration
  DeterministicPolicy policy_minus;
  DeterministicPolicy policy_plus;
  std::vector<int> differing_states;
};

/// Probability of transmitting in each state.
std::vector<double> transmit_probabilities(const DeterministicPolicy& policy);
std::vector<double> transmit_probabilities(const MixturePolicy& policy);

/// Stable 64-bit digest of an action table (FNV-1a).
std::uint64_t policy_digest(const DeterministicPolicy& policy);

}  // namespace remest
