#include "remest/model.hpp"

#include "remest/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace remest {

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows, int n, const char* what) {
  if (static_cast<int>(rows.size()) != n) {
    std::ostringstream os;
    os << what << " must have " << n << " rows";
    throw DomainError(os.str());
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      std::ostringstream os;
      os << what << " row " << i << " must have " << n << " entries";
      throw DomainError(os.str());
    }
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

int argmax(const Distribution& nu) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(nu.size()); ++i) {
    if (nu[i] > nu[best] + 1e-12) best = i;
  }
  return best;
}

}  // namespace

SystemModel::SystemModel(const SystemConfig& config)
    : config_(config),
      chain_(to_matrix(config.transition_matrix, config.alphabet_size, "transition_matrix"),
             config.theta_max + 1),
      n_(config.alphabet_size) {
  if (!(config.p_s > 0.0 && config.p_s <= 1.0)) throw DomainError("p_s must lie in (0, 1]");
  if (config.theta_max < 1) throw DomainError("theta_max must be >= 1");
  if (config.delta_max < 1) throw DomainError("delta_max must be >= 1");

  if (config.distortion.empty()) {
    d_ = Matrix::Ones(n_, n_) - Matrix::Identity(n_, n_);
  } else {
    d_ = to_matrix(config.distortion, n_, "distortion");
    for (int i = 0; i < n_; ++i) {
      if (d_(i, i) != 0.0) {
        std::ostringstream os;
        os << "distortion d(" << i << "," << i << ") = " << d_(i, i) << " must be 0";
        throw DistortionDiagonalError(os.str());
      }
      for (int j = 0; j < n_; ++j) {
        if (!std::isfinite(d_(i, j)) || d_(i, j) < 0.0) {
          throw DomainError("distortion entries must be finite and nonnegative");
        }
      }
    }
  }
  config_.age_function.validate(config.delta_max);
  g_ = EstimateTable(chain_, config.theta_max, config.estimator);

  const int T = theta_max();
  const int D = delta_max();
  size_ = n_ * n_ * (T + 1) * (D + 1);
  idle_cost_.resize(size_);
  error_.resize(size_);
  idle_base_.resize(size_);
  sync_base_.resize(size_);
  for (int s = 0; s < size_; ++s) {
    MdpState st = decode(s);
    auto [xhat, dn] = next_error_age(*this, st);
    const int tp = std::min(st.theta + 1, T);
    idle_cost_[s] = d_(st.x, xhat) * config_.age_function(dn);
    error_[s] = xhat != st.x;
    idle_base_[s] = encode({0, st.z, tp, dn});
    sync_base_[s] = encode({0, st.x, 0, 0});
  }
  const int a = argmax(chain_.stationary());
  s_ref_ = encode({a, a, T, 0});
}

MdpState SystemModel::decode(int index) const {
  if (index < 0 || index >= size_) throw DomainError("state index out of range");
  MdpState s;
  const int D = delta_max() + 1;
  const int T = theta_max() + 1;
  s.delta = index % D;
  index /= D;
  s.theta = index % T;
  index /= T;
  s.z = index % n_;
  s.x = index / n_;
  return s;
}

SystemModel build_model(const SystemConfig& config) { return SystemModel(config); }

Assumption1Report check_assumption1(const SystemModel& model) {
  Assumption1Report r;
  r.limit_ratio = model.rho().limit_ratio();
  r.holds = true;
  r.tightest_bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.alphabet(); ++i) {
    const double persist = model.chain()(i, i) * model.p_f();
    const double bound = persist > 0.0 ? 1.0 / persist : std::numeric_limits<double>::infinity();
    const bool ok = r.limit_ratio < bound;
    r.bound_per_state.push_back(bound);
    r.holds_per_state.push_back(ok);
    r.holds = r.holds && ok;
    r.tightest_bound = std::min(r.tightest_bound, bound);
  }
  return r;
}

std::pair<int, int> next_error_age(const SystemModel& model, const MdpState& s) {
  const auto& g = model.estimates();
  const int tp = std::min(s.theta + 1, model.theta_max());
  const int xhat = g(s.z, tp);
  if (xhat == s.x) return {xhat, 0};
  if (xhat == g(s.z, s.theta)) return {xhat, std::min(s.delta + 1, model.delta_max())};
  return {xhat, 1};
}

TransitionFan transition(const SystemModel& model, const MdpState& s, int u) {
  if (u != 0 && u != 1) throw DomainError("action must be 0 or 1");
  const int idx = model.encode(s);
  const int n = model.alphabet();
  const int stride = model.x_stride();
  TransitionFan fan;
  const double w_idle = u == 0 ? 1.0 : model.p_f();
  for (int xp = 0; xp < n; ++xp) {
    const double q = model.chain()(s.x, xp);
    if (q == 0.0) continue;
    if (w_idle > 0.0) fan.targets.emplace_back(model.idle_base(idx) + xp * stride, w_idle * q);
    if (u == 1) fan.targets.emplace_back(model.sync_base(idx) + xp * stride, model.p_s() * q);
  }
  fan.stage_cost_error = w_idle * model.idle_cost(idx);
  fan.stage_cost_tx = u;
  return fan;
}

double stage_cost(const SystemModel& model, const MdpState& s, int u, double lambda) {
  const double c0 = model.idle_cost(model.encode(s));
  return u == 0 ? c0 : lambda + model.p_f() * c0;
}

}  // namespace remest
