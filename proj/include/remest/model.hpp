#pragma once

#include "remest/age_function.hpp"
#include "remest/estimator.hpp"
#include "remest/markov_chain.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace remest {

struct Tolerances {
  double eval = 1e-10;
  double search = 1e-8;
  double mixture = 1e-6;
};

/// Decoded experiment configuration. An empty `distortion` means Hamming.
struct SystemConfig {
  int alphabet_size = 0;
  std::vector<std::vector<double>> transition_matrix;
  double p_s = 1.0;
  std::vector<std::vector<double>> distortion;
  AgeFunction age_function = AgeFunction::polynomial({1.0});
  int theta_max = 1;
  int delta_max = 1;
  double f_max = 1.0;
  double lambda_max = 1000.0;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  EstimatorMode estimator = EstimatorMode::Map;
};

/// (x, z, theta, delta): current source state, last received content, its
/// age, and the age of the current consecutive error.
struct MdpState {
  int x = 0;
  int z = 0;
  int theta = 0;
  int delta = 0;

  bool operator==(const MdpState& o) const {
    return x == o.x && z == o.z && theta == o.theta && delta == o.delta;
  }
};

struct TransitionFan {
  std::vector<std::pair<int, double>> targets;
  double stage_cost_error = 0.0;
  int stage_cost_tx = 0;
};

class SystemModel {
 public:
  explicit SystemModel(const SystemConfig& config);

  const SystemConfig& config() const { return config_; }
  const MarkovChain& chain() const { return chain_; }
  const EstimateTable& estimates() const { return g_; }
  const AgeFunction& rho() const { return config_.age_function; }
  const Matrix& distortion() const { return d_; }

  int alphabet() const { return n_; }
  int theta_max() const { return config_.theta_max; }
  int delta_max() const { return config_.delta_max; }
  double p_s() const { return config_.p_s; }
  double p_f() const { return 1.0 - config_.p_s; }
  int n_states() const { return size_; }

  int encode(const MdpState& s) const {
    return ((s.x * n_ + s.z) * (theta_max() + 1) + s.theta) * (delta_max() + 1) + s.delta;
  }
  MdpState decode(int index) const;

  /// Synced reference state (argmax nu, argmax nu, theta_max, 0).
  int s_ref() const { return s_ref_; }

  // Per-state quantities of the idle branch, precomputed at build.

  /// d(x, g(z, theta+)) * rho(delta'), paid whenever the idle branch is taken.
  double idle_cost(int s) const { return idle_cost_[s]; }
  /// True when idling leaves an estimation error; only such states may transmit.
  bool is_error(int s) const { return error_[s] != 0; }
  /// Index of (0, z, theta+, delta'); the target for x' is base + x' * x_stride().
  int idle_base(int s) const { return idle_base_[s]; }
  /// Index of (0, x, 0, 0); successful-transmission target base.
  int sync_base(int s) const { return sync_base_[s]; }
  int x_stride() const { return n_ * (theta_max() + 1) * (delta_max() + 1); }

  /// Index of (x, z, theta) with delta = 0; the delta slice is contiguous.
  int triple_base(int s) const { return s - s % (delta_max() + 1); }

 private:
  SystemConfig config_;
  MarkovChain chain_;
  Matrix d_;
  EstimateTable g_;
  int n_;
  int size_;
  int s_ref_;
  std::vector<double> idle_cost_;
  std::vector<char> error_;
  std::vector<int> idle_base_;
  std::vector<int> sync_base_;
};

SystemModel build_model(const SystemConfig& config);

struct Assumption1Report {
  bool holds = false;
  double limit_ratio = 0.0;
  std::vector<double> bound_per_state;  // 1 / (Q_ii p_f), +inf when Q_ii p_f = 0
  std::vector<bool> holds_per_state;
  double tightest_bound = 0.0;
};

Assumption1Report check_assumption1(const SystemModel& model);

/// (g(z, theta+), delta') after one slot, theta+ = min(theta+1, theta_max).
std::pair<int, int> next_error_age(const SystemModel& model, const MdpState& s);

TransitionFan transition(const SystemModel& model, const MdpState& s, int u);

/// Expected distortion cost of the slot plus lambda * u.
double stage_cost(const SystemModel& model, const MdpState& s, int u, double lambda);

}  // namespace remest
