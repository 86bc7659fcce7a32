#pragma once

#include "remest/model.hpp"
#include "remest/policy.hpp"
#include "remest/unconstrained.hpp"

#include <vector>

namespace remest {

/// One point (lambda, J, F, L = J + lambda F) of the Lagrangian curve.
struct CurvePoint {
  double lambda = 0.0;
  double J = 0.0;
  double F = 0.0;
  double L = 0.0;
};

struct IntersectionResult {
  double lambda_next = 0.0;
  double L_tilde = 0.0;
};

/// Intersection of the tangents L = J- + lambda F- and L = J+ + lambda F+.
/// Throws DegenerateSlopes when F- == F+.
IntersectionResult intersection_step(const CurvePoint& minus, const CurvePoint& plus);

struct TraceEntry {
  CurvePoint point;
  double L_tilde = 0.0;  // intersection-search prediction; NaN for bisection
  double lo = 0.0;       // interval after the update
  double hi = 0.0;
};

struct SearchTrace {
  enum class Method { Bisection, Intersection };
  Method method = Method::Intersection;
  std::vector<TraceEntry> entries;

  int iterations() const { return static_cast<int>(entries.size()); }
};

struct BisectionResult {
  double lambda_star = 0.0;
  SearchTrace trace;
};

/// Halves [0, lambda_max] on the sign of F(lambda) - f_max until the
/// interval is shorter than epsilon_tol. Throws BadBracket when
/// F(lambda_max) >= f_max.
BisectionResult bisection_solve(const SystemModel& model, double f_max, double lambda_max,
                                double epsilon_tol);

/// Mixing probability that makes the per-step randomized policy hit f_max.
/// Starts from the linear interpolation and refines it by bracketed root
/// finding on the stationary frequency. Throws InfeasiblePair unless
/// F(plus) <= f_max <= F(minus) (within `tolerance`).
MixturePolicy build_mixture(const SystemModel& model, const DeterministicPolicy& policy_minus,
                            const DeterministicPolicy& policy_plus, double f_max,
                            double tolerance = 1e-6);

struct ConstrainedSolution {
  enum class Kind { Deterministic, Mixture };
  Kind kind = Kind::Deterministic;
  double lambda_star = 0.0;
  DeterministicPolicy policy;  // the deterministic solution, or policy_plus of the mixture
  MixturePolicy mixture;
  double achieved_F = 0.0;
  double achieved_J = 0.0;
  SearchTrace trace;
  ThresholdView thresholds_minus;  // mixture only
  ThresholdView thresholds_plus;
};

struct CmdpOptions {
  double epsilon_mix = 1e-6;
  double search_tolerance = 1e-8;   // |L(lambda_n) - L_tilde| <= tol * max(1, |L|)
  double feasibility_tolerance = 1e-6;
  int max_iterations = 100;
};

/// Intersection search over lambda with structured policy iteration at
/// every iterate. Throws BadBracket, NoProgress.
ConstrainedSolution solve_cmdp(const SystemModel& model, double f_max, double lambda_max,
                               const CmdpOptions& options = {});

}  // namespace remest
