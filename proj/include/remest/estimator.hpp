#pragma once

#include "remest/markov_chain.hpp"

#include <optional>
#include <vector>

namespace remest {

/// How an argmax over the belief is resolved when several states tie
/// (within 1e-12).
///  - LowestIndex: smallest tied state.
///  - KeepPrevious: keep the estimate of age theta-1 when it is among the
///    tied states, otherwise the smallest tied state. This is the default:
///    the receiver does not flip its estimate on an exact tie, and large-age
///    beliefs of symmetric chains (which tie in floating point once
///    (1-|X|sigma)^theta underflows) keep returning z.
enum class TieRule { LowestIndex, KeepPrevious };

enum class EstimatorMode { Map, Zoh };

/// g(z, theta) for theta in [0, theta_max]; lookups past theta_max saturate.
class EstimateTable {
 public:
  EstimateTable() = default;
  EstimateTable(const MarkovChain& chain, int theta_max,
                EstimatorMode mode = EstimatorMode::Map,
                TieRule rule = TieRule::KeepPrevious);

  int operator()(int z, int theta) const;
  int n_states() const { return n_; }
  int theta_max() const { return theta_max_; }
  EstimatorMode mode() const { return mode_; }
  TieRule tie_rule() const { return rule_; }

  bool operator==(const EstimateTable& o) const {
    return n_ == o.n_ && theta_max_ == o.theta_max_ && table_ == o.table_;
  }

 private:
  int n_ = 0;
  int theta_max_ = 0;
  EstimatorMode mode_ = EstimatorMode::Map;
  TieRule rule_ = TieRule::KeepPrevious;
  std::vector<int> table_;  // z * (theta_max + 1) + theta
};

/// Ties are resolved against the estimate of the previous age, so the
/// result depends on the whole age path 0..theta (see TieRule).
int map_estimate(const MarkovChain& chain, int z, int theta,
                 TieRule rule = TieRule::KeepPrevious);

inline int zoh_estimate(int z, int /*theta*/) { return z; }

/// Smallest theta0 <= theta_probe such that g(z, .) is constant on
/// [theta0, theta_probe] and that constant is a maximizer of nu.
std::optional<int> steady_state_age(const MarkovChain& chain, int z, int theta_probe,
                                    TieRule rule = TieRule::KeepPrevious);

}  // namespace remest
