#include "remest/policy.hpp"

namespace remest {

DeterministicPolicy DeterministicPolicy::never(const SystemModel& model) {
  return {std::vector<std::uint8_t>(model.n_states(), 0)};
}

DeterministicPolicy DeterministicPolicy::reactive(const SystemModel& model) {
  DeterministicPolicy p = never(model);
  for (int s = 0; s < model.n_states(); ++s) p.actions[s] = model.is_error(s) ? 1 : 0;
  return p;
}

DeterministicPolicy DeterministicPolicy::always(const SystemModel& model) {
  return {std::vector<std::uint8_t>(model.n_states(), 1)};
}

std::set<int> ThresholdView::distinct() const {
  std::set<int> out;
  for (int t : thresholds) {
    if (t != kSynced) out.insert(t);
  }
  return out;
}

ThresholdView threshold_view(const SystemModel& model, const DeterministicPolicy& policy) {
  ThresholdView v;
  v.alphabet = model.alphabet();
  v.theta_max = model.theta_max();
  const int D = model.delta_max() + 1;
  const int n_triples = model.n_states() / D;
  v.thresholds.assign(n_triples, ThresholdView::kSynced);
  for (int t = 0; t < n_triples; ++t) {
    const int base = t * D;
    if (!model.is_error(base)) continue;
    int thr = ThresholdView::kNever;
    for (int d = 0; d < D; ++d) {
      if (policy[base + d]) {
        thr = d + 1;
        break;
      }
    }
    v.thresholds[t] = thr;
  }
  return v;
}

DeterministicPolicy policy_from_thresholds(const SystemModel& model, const ThresholdView& view) {
  DeterministicPolicy p = DeterministicPolicy::never(model);
  const int D = model.delta_max() + 1;
  for (std::size_t t = 0; t < view.thresholds.size(); ++t) {
    const int thr = view.thresholds[t];
    if (thr == ThresholdView::kSynced || thr == ThresholdView::kNever) continue;
    for (int d = 0; d < D; ++d) {
      if (d + 1 >= thr) p.actions[t * D + d] = 1;
    }
  }
  return p;
}

std::vector<double> transmit_probabilities(const DeterministicPolicy& policy) {
  return std::vector<double>(policy.actions.begin(), policy.actions.end());
}

std::vector<double> transmit_probabilities(const MixturePolicy& policy) {
  std::vector<double> a(policy.policy_minus.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    a[s] = policy.p * policy.policy_minus[s] + (1.0 - policy.p) * policy.policy_plus[s];
  }
  return a;
}

std::uint64_t policy_digest(const DeterministicPolicy& policy) {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto a : policy.actions) {
    h ^= a;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace remest
