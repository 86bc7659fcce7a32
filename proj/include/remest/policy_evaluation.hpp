#pragma once

#include "remest/model.hpp"
#include "remest/policy.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace remest {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Average cost and relative values of a fixed policy.
///
/// The evaluator handles policies with several recurrent classes (the
/// never-transmit policy has one per received content): `gain_by_state`
/// is the per-state average cost, `gain` its value at the reference state,
/// and `bias` is pinned to 0 at one state of each recurrent class (the
/// reference state for its own class).
struct GainBias {
  double lambda = 0.0;
  double gain = 0.0;
  double j_component = 0.0;
  double f_component = 0.0;
  std::vector<double> bias;
  std::vector<double> gain_by_state;
  int n_recurrent_classes = 0;
};

/// Row-stochastic kernel of the chain induced by transmitting with
/// probability a[s] in state s.
SparseMatrix induced_kernel(const SystemModel& model, const std::vector<double>& a);

/// Expected error cost of each state, (1 - a p_s) * idle_cost.
std::vector<double> expected_error_cost(const SystemModel& model, const std::vector<double>& a);

/// Exact evaluation by sparse LU. Throws ConvergenceFailure if a system is
/// singular (cannot happen for a stochastic kernel unless round-off breaks it).
GainBias policy_evaluate(const SystemModel& model, const DeterministicPolicy& policy,
                         double lambda, int s_ref = -1);

/// Stationary distribution of the closed class `cls` (sorted state list),
/// aligned with `cls`.
std::vector<double> class_stationary(const SparseMatrix& p, const std::vector<int>& cls);

/// Closed communicating classes of a stochastic matrix, each sorted.
std::vector<std::vector<int>> recurrent_classes(const SparseMatrix& p);

}  // namespace remest
