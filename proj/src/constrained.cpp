#include "remest/constrained.hpp"

#include "remest/errors.hpp"
#include "remest/evaluation.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace remest {

namespace {

struct Solved {
  CurvePoint point;
  SpiResult spi;
};

Solved solve_at(const SystemModel& model, double lambda) {
  Solved s;
  s.spi = spi_solve(model, lambda);
  s.point = {lambda, s.spi.value.j_component, s.spi.value.f_component, s.spi.value.gain};
  return s;
}

ConstrainedSolution deterministic(const SystemModel& model, double lambda, const SpiResult& spi,
                                  SearchTrace trace) {
  ConstrainedSolution sol;
  sol.kind = ConstrainedSolution::Kind::Deterministic;
  sol.lambda_star = lambda;
  sol.policy = spi.policy;
  const auto m = stationary_metrics(model, spi.policy);
  sol.achieved_F = m.F;
  sol.achieved_J = m.J;
  sol.thresholds_plus = spi.thresholds;
  sol.trace = std::move(trace);
  return sol;
}

}  // namespace

IntersectionResult intersection_step(const CurvePoint& minus, const CurvePoint& plus) {
  if (minus.F == plus.F) {
    throw DegenerateSlopes("both tangents have slope F = " + std::to_string(minus.F));
  }
  IntersectionResult r;
  r.lambda_next = (plus.J - minus.J) / (minus.F - plus.F);
  r.L_tilde = minus.F * (r.lambda_next - minus.lambda) + minus.L;
  return r;
}

BisectionResult bisection_solve(const SystemModel& model, double f_max, double lambda_max,
                                double epsilon_tol) {
  if (!(f_max > 0.0 && f_max <= 1.0)) throw DomainError("f_max must lie in (0, 1]");
  if (!(epsilon_tol > 0.0)) throw DomainError("bisection tolerance must be positive");
  BisectionResult r;
  r.trace.method = SearchTrace::Method::Bisection;
  const Solved zero = solve_at(model, 0.0);
  if (zero.point.F <= f_max) {
    r.lambda_star = 0.0;
    return r;
  }
  const Solved top = solve_at(model, lambda_max);
  if (top.point.F >= f_max) {
    std::ostringstream os;
    os << "F(lambda_max=" << lambda_max << ") = " << top.point.F << " is not below f_max = " << f_max;
    throw BadBracket(os.str());
  }
  double lo = 0.0, hi = lambda_max;
  while (hi - lo >= epsilon_tol) {
    const double mid = 0.5 * (lo + hi);
    const Solved s = solve_at(model, mid);
    if (s.point.F > f_max) {
      lo = mid;
    } else {
      hi = mid;
    }
    r.trace.entries.push_back({s.point, std::numeric_limits<double>::quiet_NaN(), lo, hi});
  }
  r.lambda_star = 0.5 * (lo + hi);
  return r;
}

MixturePolicy build_mixture(const SystemModel& model, const DeterministicPolicy& policy_minus,
                            const DeterministicPolicy& policy_plus, double f_max, double tolerance) {
  const double F_minus = stationary_metrics(model, policy_minus).F;
  const double F_plus = stationary_metrics(model, policy_plus).F;
  if (F_plus > f_max + tolerance || F_minus < f_max - tolerance) {
    std::ostringstream os;
    os << "pair does not bracket f_max = " << f_max << ": F(minus) = " << F_minus
       << ", F(plus) = " << F_plus;
    throw InfeasiblePair(os.str());
  }
  MixturePolicy mix;
  mix.policy_minus = policy_minus;
  mix.policy_plus = policy_plus;
  for (std::size_t s = 0; s < policy_minus.size(); ++s) {
    if (policy_minus[s] != policy_plus[s]) mix.differing_states.push_back(static_cast<int>(s));
  }
  const double span = F_minus - F_plus;
  double p = span > 0.0 ? (f_max - F_plus) / span : 0.0;
  p = std::clamp(p, 0.0, 1.0);
  mix.p_linear = p;
  mix.p = p;
  if (p <= 0.0 || p >= 1.0 || mix.differing_states.empty()) return mix;

  auto excess = [&](double q) {
    MixturePolicy trial = mix;
    trial.p = q;
    return stationary_metrics(model, trial).F - f_max;
  };
  const double at_linear = excess(p);
  if (std::abs(at_linear) <= 1e-12) return mix;
  // F(p) is continuous and non-decreasing in p; bracket the root on the
  // side the linear guess missed.
  double a = 0.0, b = 1.0, fa = F_plus - f_max, fb = F_minus - f_max;
  if (at_linear > 0.0) {
    b = p;
    fb = at_linear;
  } else {
    a = p;
    fa = at_linear;
  }
  if (fa >= 0.0) {
    mix.p = a;
    return mix;
  }
  if (fb <= 0.0) {
    mix.p = b;
    return mix;
  }
  std::uintmax_t max_iter = 60;
  auto root = boost::math::tools::toms748_solve(excess, a, b, fa, fb,
                                                boost::math::tools::eps_tolerance<double>(45), max_iter);
  mix.p = 0.5 * (root.first + root.second);
  return mix;
}

ConstrainedSolution solve_cmdp(const SystemModel& model, double f_max, double lambda_max,
                               const CmdpOptions& options) {
  if (!(f_max > 0.0 && f_max <= 1.0)) throw DomainError("f_max must lie in (0, 1]");
  SearchTrace trace;
  trace.method = SearchTrace::Method::Intersection;

  Solved lo = solve_at(model, 0.0);
  if (lo.point.F <= f_max) return deterministic(model, 0.0, lo.spi, std::move(trace));
  Solved hi = solve_at(model, lambda_max);
  if (hi.point.F >= f_max) {
    std::ostringstream os;
    os << "F(lambda_max=" << lambda_max << ") = " << hi.point.F << " is not below f_max = " << f_max;
    throw BadBracket(os.str());
  }

  double lambda_star = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < options.max_iterations; ++it) {
    IntersectionResult step;
    try {
      step = intersection_step(lo.point, hi.point);
    } catch (const DegenerateSlopes&) {
      lambda_star = lo.point.lambda;
      break;
    }
    Solved cur = solve_at(model, step.lambda_next);
    const double L = cur.point.L;
    const bool on_curve = std::abs(L - step.L_tilde) <= options.search_tolerance * std::max(1.0, std::abs(L));
    if (std::abs(cur.point.F - f_max) <= options.feasibility_tolerance) {
      trace.entries.push_back({cur.point, step.L_tilde, cur.point.lambda, cur.point.lambda});
      return deterministic(model, cur.point.lambda, cur.spi, std::move(trace));
    }
    if (on_curve) {
      trace.entries.push_back({cur.point, step.L_tilde, lo.point.lambda, hi.point.lambda});
      lambda_star = cur.point.lambda;
      break;
    }
    const CurvePoint visited = cur.point;
    if (visited.F <= f_max) {
      hi = std::move(cur);
    } else {
      lo = std::move(cur);
    }
    trace.entries.push_back({visited, step.L_tilde, lo.point.lambda, hi.point.lambda});
  }
  if (std::isnan(lambda_star)) {
    throw NoProgress("intersection search did not locate a corner within the iteration cap");
  }

  const double eps = std::max(options.epsilon_mix, options.epsilon_mix * lambda_star);
  auto minus_future = std::async(std::launch::async, [&] { return spi_solve(model, std::max(0.0, lambda_star - eps)); });
  SpiResult plus = spi_solve(model, lambda_star + eps);
  SpiResult minus = minus_future.get();
  const double F_minus = stationary_metrics(model, minus.policy).F;
  const double F_plus = stationary_metrics(model, plus.policy).F;
  if (std::abs(F_plus - f_max) <= options.feasibility_tolerance) {
    return deterministic(model, lambda_star + eps, plus, std::move(trace));
  }
  if (std::abs(F_minus - f_max) <= options.feasibility_tolerance) {
    return deterministic(model, std::max(0.0, lambda_star - eps), minus, std::move(trace));
  }
  if (!(F_plus < f_max && f_max < F_minus)) {
    std::ostringstream os;
    os << "policies at lambda* +/- eps do not bracket f_max = " << f_max << " (F- = " << F_minus
       << ", F+ = " << F_plus << ")";
    throw NoProgress(os.str());
  }

  ConstrainedSolution sol;
  sol.kind = ConstrainedSolution::Kind::Mixture;
  sol.lambda_star = lambda_star;
  sol.mixture = build_mixture(model, minus.policy, plus.policy, f_max, options.feasibility_tolerance);
  sol.policy = plus.policy;
  sol.thresholds_minus = minus.thresholds;
  sol.thresholds_plus = plus.thresholds;
  const auto m = stationary_metrics(model, sol.mixture);
  sol.achieved_F = m.F;
  sol.achieved_J = m.J;
  sol.trace = std::move(trace);
  return sol;
}

}  // namespace remest
