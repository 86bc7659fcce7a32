#include "remest/estimator.hpp"

#include "remest/errors.hpp"

namespace remest {

namespace {

constexpr double kTieTolerance = 1e-12;

int argmax_with_rule(const Matrix& power, int z, int previous, TieRule rule) {
  const int n = static_cast<int>(power.cols());
  double best = power(z, 0);
  for (int x = 1; x < n; ++x) best = std::max(best, power(z, x));
  if (rule == TieRule::KeepPrevious && power(z, previous) >= best - kTieTolerance) {
    return previous;
  }
  for (int x = 0; x < n; ++x) {
    if (power(z, x) >= best - kTieTolerance) return x;
  }
  return 0;
}

// g(z, 0..theta_end) in one pass.
std::vector<int> estimate_path(const MarkovChain& chain, int z, int theta_end, TieRule rule) {
  std::vector<int> path(theta_end + 1);
  path[0] = z;
  for (int t = 1; t <= theta_end; ++t) {
    path[t] = argmax_with_rule(chain.power(t), z, path[t - 1], rule);
  }
  return path;
}

}  // namespace

EstimateTable::EstimateTable(const MarkovChain& chain, int theta_max, EstimatorMode mode,
                             TieRule rule)
    : n_(chain.n_states()), theta_max_(theta_max), mode_(mode), rule_(rule) {
  if (theta_max < 0) throw DomainError("theta_max must be nonnegative");
  table_.resize(static_cast<std::size_t>(n_) * (theta_max + 1));
  for (int z = 0; z < n_; ++z) {
    if (mode == EstimatorMode::Zoh) {
      for (int t = 0; t <= theta_max; ++t) table_[z * (theta_max + 1) + t] = z;
      continue;
    }
    auto path = estimate_path(chain, z, theta_max, rule);
    std::copy(path.begin(), path.end(), table_.begin() + z * (theta_max + 1));
  }
}

int EstimateTable::operator()(int z, int theta) const {
  if (theta > theta_max_) theta = theta_max_;
  return table_[z * (theta_max_ + 1) + theta];
}

int map_estimate(const MarkovChain& chain, int z, int theta, TieRule rule) {
  if (z < 0 || z >= chain.n_states()) throw DomainError("map_estimate: content outside the alphabet");
  if (theta < 0) throw DomainError("map_estimate: age must be nonnegative");
  return estimate_path(chain, z, theta, rule).back();
}

std::optional<int> steady_state_age(const MarkovChain& chain, int z, int theta_probe,
                                    TieRule rule) {
  if (theta_probe < 1) throw DomainError("steady_state_age: probe must be >= 1");
  const auto& nu = chain.stationary();
  double best = 0.0;
  for (double p : nu.probs) best = std::max(best, p);
  auto path = estimate_path(chain, z, theta_probe, rule);
  const int steady = path.back();
  if (nu[steady] < best - kTieTolerance) return std::nullopt;
  int t0 = theta_probe;
  while (t0 > 0 && path[t0 - 1] == steady) --t0;
  return t0;
}

}  // namespace remest
