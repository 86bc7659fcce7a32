#include "remest/unconstrained.hpp"

#include "remest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace remest {

namespace {

// Expected next-state value over the idle and the successful branch.
struct Expectations {
  std::vector<double> idle;
  std::vector<double> sync;
};

Expectations expectations(const SystemModel& model, const std::vector<double>& v) {
  const int N = model.n_states();
  const int n = model.alphabet();
  const int stride = model.x_stride();
  const Matrix& q = model.chain().matrix();
  Expectations e{std::vector<double>(N), std::vector<double>(N)};
  for (int s = 0; s < N; ++s) {
    const int x = s / stride;
    double ei = 0.0;
    double es = 0.0;
    const int bi = model.idle_base(s);
    const int bs = model.sync_base(s);
    for (int xp = 0; xp < n; ++xp) {
      ei += q(x, xp) * v[bi + xp * stride];
      es += q(x, xp) * v[bs + xp * stride];
    }
    e.idle[s] = ei;
    e.sync[s] = es;
  }
  return e;
}

bool strictly_below(double a, double b, double rel) {
  return a < b - rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

QFactors q_factors(const SystemModel& model, const std::vector<double>& v, double lambda) {
  const auto e = expectations(model, v);
  const int N = model.n_states();
  QFactors q{std::vector<double>(N), std::vector<double>(N)};
  for (int s = 0; s < N; ++s) {
    const double c0 = model.idle_cost(s);
    q.idle[s] = c0 + e.idle[s];
    q.transmit[s] = lambda + model.p_f() * (c0 + e.idle[s]) + model.p_s() * e.sync[s];
  }
  return q;
}

SpiResult spi_solve(const SystemModel& model, double lambda, const SpiOptions& options) {
  const int N = model.n_states();
  const int D = model.delta_max() + 1;
  DeterministicPolicy policy = DeterministicPolicy::never(model);
  if (!options.warm_start.actions.empty()) {
    if (static_cast<int>(options.warm_start.size()) != N) {
      throw DomainError("warm-start policy size does not match the model");
    }
    policy = options.warm_start;
    for (int s = 0; s < N; ++s) {
      if (!model.is_error(s)) policy.actions[s] = 0;
    }
  }
  const double tol = options.tie_tolerance;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    GainBias value = policy_evaluate(model, policy, lambda);
    // Gain parts first (they only differ across recurrent classes), then
    // Q-factors on the bias.
    const auto eh = expectations(model, value.gain_by_state);
    const auto q = q_factors(model, value.bias, lambda);

    DeterministicPolicy next = policy;
    for (int base = 0; base < N; base += D) {
      if (!model.is_error(base)) continue;
      bool rest_transmit = false;
      for (int d = 0; d < D; ++d) {
        const int s = base + d;
        if (rest_transmit) {
          next.actions[s] = 1;
          continue;
        }
        const int inc = policy[s];
        const double g0 = eh.idle[s];
        const double g1 = model.p_f() * eh.idle[s] + model.p_s() * eh.sync[s];
        const double g_inc = inc ? g1 : g0;
        const double g_alt = inc ? g0 : g1;
        const double q_inc = inc ? q.transmit[s] : q.idle[s];
        const double q_alt = inc ? q.idle[s] : q.transmit[s];
        int chosen = inc;
        if (strictly_below(g_alt, g_inc, tol)) {
          chosen = 1 - inc;
        } else if (!strictly_below(g_inc, g_alt, tol) && strictly_below(q_alt, q_inc, tol)) {
          chosen = 1 - inc;
        }
        next.actions[s] = static_cast<std::uint8_t>(chosen);
        if (chosen == 1) rest_transmit = true;
      }
    }
    if (next == policy) {
      SpiResult r;
      r.thresholds = threshold_view(model, policy);
      r.policy = std::move(policy);
      r.value = std::move(value);
      r.iterations = iter;
      return r;
    }
    policy = std::move(next);
  }
  std::ostringstream os;
  os << "structured policy iteration did not converge in " << options.max_iterations
     << " iterations at lambda=" << lambda;
  throw NonConvergence(os.str());
}

RviResult rvi_solve(const SystemModel& model, double lambda, const RviOptions& options) {
  const int N = model.n_states();
  const int ref = model.s_ref();
  const double tau = options.tau;
  std::vector<double> v(N, 0.0), tv(N);
  std::vector<char> allowed(N);
  for (int s = 0; s < N; ++s) {
    allowed[s] = options.scope == ActionScope::All || model.is_error(s);
  }

  long sweep = 0;
  double gain = 0.0;
  bool converged = false;
  while (sweep < options.max_sweeps) {
    ++sweep;
    const auto q = q_factors(model, v, lambda);
    double lo = INFINITY, hi = -INFINITY;
    for (int s = 0; s < N; ++s) {
      double best = q.idle[s];
      if (allowed[s]) best = std::min(best, q.transmit[s]);
      tv[s] = tau * v[s] + (1.0 - tau) * best;
      const double diff = tv[s] - v[s];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    const double shift = tv[ref];
    for (int s = 0; s < N; ++s) v[s] = tv[s] - shift;
    if (hi - lo < options.tolerance) {
      gain = 0.5 * (hi + lo) / (1.0 - tau);
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "relative value iteration did not converge in " << options.max_sweeps
       << " sweeps at lambda=" << lambda;
    throw NonConvergence(os.str());
  }

  const auto q = q_factors(model, v, lambda);
  DeterministicPolicy policy = DeterministicPolicy::never(model);
  for (int s = 0; s < N; ++s) {
    const double scale = std::max({1.0, std::abs(q.idle[s]), std::abs(q.transmit[s])});
    if (allowed[s] && q.transmit[s] < q.idle[s] - 1e-12 * scale) policy.actions[s] = 1;
  }
  const GainBias exact = policy_evaluate(model, policy, lambda);

  RviResult r;
  r.value.lambda = lambda;
  r.value.gain = gain;
  r.value.j_component = exact.j_component;
  r.value.f_component = exact.f_component;
  r.value.bias = std::move(v);
  r.value.gain_by_state.assign(N, gain);
  r.value.n_recurrent_classes = exact.n_recurrent_classes;
  r.policy = std::move(policy);
  r.sweeps = sweep;
  return r;
}

std::vector<StructureViolation> check_switching_structure(const DeterministicPolicy& policy,
                                                          const SystemModel& model) {
  std::vector<StructureViolation> out;
  const int N = model.n_states();
  const int D = model.delta_max() + 1;
  if (static_cast<int>(policy.size()) != N) throw DomainError("policy size does not match the model");
  for (int base = 0; base < N; base += D) {
    const MdpState s = model.decode(base);
    if (!model.is_error(base)) {
      for (int d = 0; d < D; ++d) {
        if (policy[base + d]) {
          out.push_back({s.x, s.z, s.theta, "transmits in a synced state"});
          break;
        }
      }
      continue;
    }
    for (int d = 1; d < D; ++d) {
      if (policy[base + d] < policy[base + d - 1]) {
        std::ostringstream os;
        os << "action decreases between delta=" << d - 1 << " and " << d;
        out.push_back({s.x, s.z, s.theta, os.str()});
        break;
      }
    }
  }
  return out;
}

double check_value_monotonicity(const std::vector<double>& bias, const SystemModel& model) {
  const int N = model.n_states();
  const int D = model.delta_max() + 1;
  double worst = 0.0;
  for (int base = 0; base < N; base += D) {
    double running_max = bias[base];
    for (int d = 0; d < D; ++d) {
      running_max = std::max(running_max, bias[base + d]);
      worst = std::max(worst, running_max - bias[base + d]);
    }
  }
  return worst;
}

double check_value_monotonicity(const GainBias& value, const SystemModel& model) {
  return check_value_monotonicity(value.bias, model);
}

double check_submodularity(const SystemModel& model, const GainBias& value) {
  const auto q = q_factors(model, value.bias, value.lambda);
  const int N = model.n_states();
  const int D = model.delta_max() + 1;
  double worst = 0.0;
  for (int base = 0; base < N; base += D) {
    double running_min = q.transmit[base] - q.idle[base];
    for (int d = 0; d < D; ++d) {
      const double diff = q.transmit[base + d] - q.idle[base + d];
      running_min = std::min(running_min, diff);
      worst = std::max(worst, diff - running_min);
    }
  }
  return worst;
}

}  // namespace remest
