#pragma once

#include "remest/constrained.hpp"
#include "remest/model.hpp"
#include "remest/policy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace remest {

struct StationaryMetrics {
  std::vector<double> mu;  // over all state indices; zero off the reachable set
  double F = 0.0;
  double J = 0.0;
  int reachable_states = 0;
  long iterations = 0;     // power-iteration steps; 0 when the linear solve was used

  double L_at(double lambda) const { return J + lambda * F; }
};

/// Long-run distribution started from the reference state, by lazy power
/// iteration on the states reachable from it (L1 tolerance 1e-14), falling
/// back to a sparse linear solve on its recurrent class.
StationaryMetrics stationary_metrics(const SystemModel& model, const std::vector<double>& transmit_prob);
StationaryMetrics stationary_metrics(const SystemModel& model, const DeterministicPolicy& policy);
StationaryMetrics stationary_metrics(const SystemModel& model, const MixturePolicy& policy);

struct SimReport {
  long horizon = 0;
  std::uint64_t seed = 0;
  int batches = 0;
  double empirical_F = 0.0;
  double empirical_J_model = 0.0;   // consecutive-error age driven by the estimate only
  double empirical_J_strict = 0.0;  // resets whenever (X, X_hat) changes
  double se_F = 0.0;
  double se_J_model = 0.0;
  double se_J_strict = 0.0;
  double channel_success_rate = 0.0;
  double se_channel = 0.0;

  double strict_gap() const { return empirical_J_strict - empirical_J_model; }
};

/// Monte Carlo run of the closed loop from the reference state. Source,
/// channel and mixture coin each draw from their own seeded stream, so two
/// policies simulated with one seed see the same source path and channel
/// realizations. Standard errors are batch means over 100 batches.
SimReport simulate(const SystemModel& model, const std::vector<double>& transmit_prob,
                   long horizon, std::uint64_t seed, int batches = 100);
SimReport simulate(const SystemModel& model, const DeterministicPolicy& policy, long horizon,
                   std::uint64_t seed, int batches = 100);
SimReport simulate(const SystemModel& model, const MixturePolicy& policy, long horizon,
                   std::uint64_t seed, int batches = 100);

struct SolveOutcome {
  double lambda = 0.0;
  double L = 0.0;
  double J = 0.0;
  double F = 0.0;
  DeterministicPolicy policy;
  ThresholdView thresholds;
  int iterations = 0;
  std::string error;  // non-empty when the solve at this point failed
};

/// One structured policy iteration per grid point, warm-started from the
/// previous point's policy. A failing point is recorded and the sweep
/// continues.
std::vector<SolveOutcome> sweep_lambda(const SystemModel& model, const std::vector<double>& lambda_grid);

struct KlResult {
  double kl = 0.0;
  int theta_small = 0;
  int delta_small = 0;
  int theta_ref = 0;
  int delta_ref = 0;
  ConstrainedSolution::Kind kind_small = ConstrainedSolution::Kind::Deterministic;
  ConstrainedSolution::Kind kind_ref = ConstrainedSolution::Kind::Deterministic;
};

/// Solves the constrained problem at both truncations and returns
/// D_KL(mu_small || project(mu_ref)), where the projection folds theta >=
/// theta_small onto theta_small and delta >= delta_small onto delta_small.
/// Throws SupportMismatch when mu_small charges a state the projection
/// leaves empty.
KlResult kl_truncation(const SystemConfig& config, int theta_ref, int delta_ref, int theta_small,
                       int delta_small);

struct KlPoint {
  int theta_max = 0;
  int delta_max = 0;
  double kl = 0.0;       // +inf when the supports are not nested
  std::string mismatch;  // SupportMismatch message, empty otherwise
};

/// Truncation study: one reference solve, then one solve per
/// (theta, delta) pair. A support mismatch is recorded as kl = +inf with
/// the offending state instead of aborting the study.
std::vector<KlPoint> kl_study(const SystemConfig& config, int theta_ref, int delta_ref,
                              const std::vector<std::pair<int, int>>& truncations);

/// Same divergence for precomputed distributions; `small` and `ref` must be
/// the models the distributions live on.
double kl_projected(const SystemModel& small, const std::vector<double>& mu_small,
                    const SystemModel& ref, const std::vector<double>& mu_ref);

/// Stationary distribution of a constrained solution (mixture kernel for mixtures).
StationaryMetrics solution_metrics(const SystemModel& model, const ConstrainedSolution& sol);

}  // namespace remest
