#include "remest/evaluation.hpp"

#include "remest/errors.hpp"
#include "remest/policy_evaluation.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace remest {

namespace {

constexpr double kPowerTolerance = 1e-14;
constexpr long kPowerCap = 1'000'000;

std::vector<char> reachable_from(const SparseMatrix& p, int root) {
  std::vector<char> seen(p.rows(), 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (SparseMatrix::InnerIterator it(p, s); it; ++it) {
      if (it.value() > 0.0 && !seen[it.col()]) {
        seen[it.col()] = 1;
        stack.push_back(static_cast<int>(it.col()));
      }
    }
  }
  return seen;
}

// Linear-solve fallback: the reachable set must drain into a single closed class.
std::vector<double> linear_stationary(const SparseMatrix& p, const std::vector<char>& reach) {
  std::vector<std::vector<int>> hit;
  for (auto& cls : recurrent_classes(p)) {
    if (reach[cls.front()]) hit.push_back(std::move(cls));
  }
  if (hit.size() != 1) {
    std::ostringstream os;
    os << "reference state reaches " << hit.size() << " recurrent classes; no unique stationary distribution";
    throw ConvergenceFailure(os.str());
  }
  std::vector<double> mu(p.rows(), 0.0);
  const auto local = class_stationary(p, hit[0]);
  for (std::size_t i = 0; i < local.size(); ++i) mu[hit[0][i]] = std::max(local[i], 0.0);
  return mu;
}

// Separate deterministic streams per concern.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    engine_.seed(seq);
  }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct BatchMeans {
  explicit BatchMeans(int batches) : sums(batches, 0.0) {}
  std::vector<double> sums;
  double mean = 0.0;
  double se = 0.0;

  void finish(long per_batch) {
    const int b = static_cast<int>(sums.size());
    double total = 0.0;
    for (double& s : sums) {
      s /= static_cast<double>(per_batch);
      total += s;
    }
    mean = total / b;
    double var = 0.0;
    for (double s : sums) var += (s - mean) * (s - mean);
    var /= (b - 1);
    se = std::sqrt(var / b);
  }
};

}  // namespace

StationaryMetrics stationary_metrics(const SystemModel& model, const std::vector<double>& a) {
  const int N = model.n_states();
  if (static_cast<int>(a.size()) != N) throw DomainError("policy size does not match the model");
  const SparseMatrix p = induced_kernel(model, a);
  const SparseMatrix pt = p.transpose();
  const auto reach = reachable_from(p, model.s_ref());

  StationaryMetrics m;
  for (char r : reach) m.reachable_states += r;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(N);
  mu(model.s_ref()) = 1.0;
  bool converged = false;
  for (long it = 1; it <= kPowerCap; ++it) {
    Eigen::VectorXd next = 0.5 * mu + 0.5 * (pt * mu);
    const double diff = (next - mu).lpNorm<1>();
    mu.swap(next);
    if (diff < kPowerTolerance) {
      m.iterations = it;
      converged = true;
      break;
    }
  }
  if (converged) {
    mu /= mu.sum();
    m.mu.assign(mu.data(), mu.data() + N);
  } else {
    m.mu = linear_stationary(p, reach);
    m.iterations = 0;
  }
  const auto cerr = expected_error_cost(model, a);
  for (int s = 0; s < N; ++s) {
    m.F += m.mu[s] * a[s];
    m.J += m.mu[s] * cerr[s];
  }
  return m;
}

StationaryMetrics stationary_metrics(const SystemModel& model, const DeterministicPolicy& policy) {
  return stationary_metrics(model, transmit_probabilities(policy));
}

StationaryMetrics stationary_metrics(const SystemModel& model, const MixturePolicy& policy) {
  return stationary_metrics(model, transmit_probabilities(policy));
}

StationaryMetrics solution_metrics(const SystemModel& model, const ConstrainedSolution& sol) {
  if (sol.kind == ConstrainedSolution::Kind::Mixture) return stationary_metrics(model, sol.mixture);
  return stationary_metrics(model, sol.policy);
}

SimReport simulate(const SystemModel& model, const std::vector<double>& a, long horizon,
                   std::uint64_t seed, int batches) {
  if (horizon < 10'000) throw DomainError("simulation horizon must be at least 1e4");
  if (batches < 30) throw DomainError("batch means need at least 30 batches");
  if (static_cast<int>(a.size()) != model.n_states()) throw DomainError("policy size does not match the model");

  Stream source(seed, 1), channel(seed, 2), coin(seed, 3);
  const int n = model.alphabet();
  const Matrix& q = model.chain().matrix();
  const auto& g = model.estimates();
  const AgeFunction& rho = model.rho();
  const int T = model.theta_max();
  const int D = model.delta_max();

  const MdpState start = model.decode(model.s_ref());
  int x = start.x, z = start.z, theta = start.theta;
  long delta_model = 0;
  long delta_strict = 0;
  int prev_x = x, prev_xhat = g(z, theta);

  const long per_batch = horizon / batches;
  const long steps = per_batch * batches;
  BatchMeans bf(batches), bjm(batches), bjs(batches), bch(batches);

  for (long t = 0; t < steps; ++t) {
    const int b = static_cast<int>(t / per_batch);
    const int s = model.encode({x, z, theta, static_cast<int>(std::min<long>(delta_model, D))});
    const double pa = a[s];
    int u = pa >= 1.0 ? 1 : 0;
    if (pa > 0.0 && pa < 1.0) u = coin.uniform() < pa ? 1 : 0;
    const bool success = channel.uniform() < model.p_s();
    bch.sums[b] += success ? 1.0 : 0.0;

    const int old_xhat = g(z, theta);
    int xhat;
    if (u == 1 && success) {
      z = x;
      theta = 0;
      xhat = x;
    } else {
      theta = std::min(theta + 1, T);
      xhat = g(z, theta);
    }

    if (xhat == x) {
      delta_model = 0;
    } else if (xhat == old_xhat && !(u == 1 && success)) {
      delta_model = delta_model + 1;
    } else {
      delta_model = 1;
    }
    if (xhat == x) {
      delta_strict = 0;
    } else if (x == prev_x && xhat == prev_xhat) {
      delta_strict = delta_strict + 1;
    } else {
      delta_strict = 1;
    }
    const double dist = model.distortion()(x, xhat);
    if (dist != 0.0) {
      bjm.sums[b] += dist * rho(static_cast<int>(std::min<long>(delta_model, D)));
      bjs.sums[b] += dist * rho(static_cast<int>(std::min<long>(delta_strict, D)));
    }
    bf.sums[b] += u;

    prev_x = x;
    prev_xhat = xhat;
    const double r = source.uniform();
    double acc = 0.0;
    int next = n - 1;
    for (int xp = 0; xp < n; ++xp) {
      acc += q(x, xp);
      if (r < acc) {
        next = xp;
        break;
      }
    }
    x = next;
  }

  for (auto* bm : {&bf, &bjm, &bjs, &bch}) bm->finish(per_batch);
  SimReport rep;
  rep.horizon = steps;
  rep.seed = seed;
  rep.batches = batches;
  rep.empirical_F = bf.mean;
  rep.se_F = bf.se;
  rep.empirical_J_model = bjm.mean;
  rep.se_J_model = bjm.se;
  rep.empirical_J_strict = bjs.mean;
  rep.se_J_strict = bjs.se;
  rep.channel_success_rate = bch.mean;
  rep.se_channel = bch.se;
  return rep;
}

SimReport simulate(const SystemModel& model, const DeterministicPolicy& policy, long horizon,
                   std::uint64_t seed, int batches) {
  return simulate(model, transmit_probabilities(policy), horizon, seed, batches);
}

SimReport simulate(const SystemModel& model, const MixturePolicy& policy, long horizon,
                   std::uint64_t seed, int batches) {
  return simulate(model, transmit_probabilities(policy), horizon, seed, batches);
}

std::vector<SolveOutcome> sweep_lambda(const SystemModel& model, const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] < grid[i - 1]) throw DomainError("lambda grid must be sorted ascending");
  }
  std::vector<SolveOutcome> out;
  SpiOptions opts;
  for (double lambda : grid) {
    SolveOutcome o;
    o.lambda = lambda;
    try {
      SpiResult r = spi_solve(model, lambda, opts);
      o.L = r.value.gain;
      o.J = r.value.j_component;
      o.F = r.value.f_component;
      o.iterations = r.iterations;
      o.thresholds = r.thresholds;
      o.policy = r.policy;
      opts.warm_start = r.policy;
    } catch (const Error& e) {
      o.error = e.name() + ": " + e.what();
      o.L = o.J = o.F = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(o));
  }
  return out;
}

double kl_projected(const SystemModel& small, const std::vector<double>& mu_small,
                    const SystemModel& ref, const std::vector<double>& mu_ref) {
  if (small.alphabet() != ref.alphabet()) throw DomainError("KL projection needs equal alphabets");
  const int ts = small.theta_max(), ds = small.delta_max();
  if (ts > ref.theta_max() || ds > ref.delta_max()) {
    throw DomainError("KL projection needs the small truncation inside the reference one");
  }
  std::vector<double> proj(small.n_states(), 0.0);
  for (int s = 0; s < ref.n_states(); ++s) {
    if (mu_ref[s] == 0.0) continue;
    MdpState st = ref.decode(s);
    st.theta = std::min(st.theta, ts);
    st.delta = std::min(st.delta, ds);
    proj[small.encode(st)] += mu_ref[s];
  }
  double kl = 0.0;
  for (int s = 0; s < small.n_states(); ++s) {
    const double p = mu_small[s];
    if (p <= 0.0) continue;
    if (proj[s] <= 0.0) {
      const MdpState st = small.decode(s);
      std::ostringstream os;
      os << "state (x=" << st.x << ", z=" << st.z << ", theta=" << st.theta << ", delta=" << st.delta
         << ") has mass " << p << " but no projected reference mass";
      throw SupportMismatch(os.str());
    }
    kl += p * std::log(p / proj[s]);
  }
  return kl;
}

KlResult kl_truncation(const SystemConfig& config, int theta_ref, int delta_ref, int theta_small,
                       int delta_small) {
  if (theta_small > theta_ref || delta_small > delta_ref) {
    throw DomainError("small truncation must not exceed the reference truncation");
  }
  CmdpOptions opts;
  opts.epsilon_mix = config.tolerances.mixture;
  opts.search_tolerance = config.tolerances.search;

  SystemConfig cr = config;
  cr.theta_max = theta_ref;
  cr.delta_max = delta_ref;
  SystemConfig cs = config;
  cs.theta_max = theta_small;
  cs.delta_max = delta_small;
  const SystemModel mr(cr);
  const SystemModel ms(cs);
  const auto sol_r = solve_cmdp(mr, config.f_max, config.lambda_max, opts);
  const auto sol_s = solve_cmdp(ms, config.f_max, config.lambda_max, opts);
  KlResult r;
  r.theta_ref = theta_ref;
  r.delta_ref = delta_ref;
  r.theta_small = theta_small;
  r.delta_small = delta_small;
  r.kind_ref = sol_r.kind;
  r.kind_small = sol_s.kind;
  r.kl = kl_projected(ms, solution_metrics(ms, sol_s).mu, mr, solution_metrics(mr, sol_r).mu);
  return r;
}

std::vector<KlPoint> kl_study(const SystemConfig& config, int theta_ref, int delta_ref,
                              const std::vector<std::pair<int, int>>& truncations) {
  CmdpOptions opts;
  opts.epsilon_mix = config.tolerances.mixture;
  opts.search_tolerance = config.tolerances.search;
  SystemConfig cr = config;
  cr.theta_max = theta_ref;
  cr.delta_max = delta_ref;
  const SystemModel mr(cr);
  const auto mu_ref = solution_metrics(mr, solve_cmdp(mr, config.f_max, config.lambda_max, opts)).mu;

  std::vector<KlPoint> out;
  for (const auto& [t, d] : truncations) {
    if (t > theta_ref || d > delta_ref) {
      throw DomainError("small truncation must not exceed the reference truncation");
    }
    SystemConfig cs = config;
    cs.theta_max = t;
    cs.delta_max = d;
    const SystemModel ms(cs);
    const auto mu = solution_metrics(ms, solve_cmdp(ms, config.f_max, config.lambda_max, opts)).mu;
    KlPoint p;
    p.theta_max = t;
    p.delta_max = d;
    try {
      p.kl = kl_projected(ms, mu, mr, mu_ref);
    } catch (const SupportMismatch& e) {
      p.kl = std::numeric_limits<double>::infinity();
      p.mismatch = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace remest
