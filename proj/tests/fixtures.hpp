#pragma once

#include "remest/model.hpp"

#include <vector>

namespace remest::fixtures {

inline const std::vector<std::vector<double>> kChainA{{0.8, 0.2}, {0.3, 0.7}};
inline const std::vector<std::vector<double>> kChainB{{0.2, 0.8}, {0.7, 0.3}};
inline const std::vector<std::vector<double>> kMainChain{{0.8, 0.1, 0.1}, {0.3, 0.6, 0.1}, {0.2, 0.1, 0.7}};

inline AgeFunction main_rho() { return AgeFunction::exponential_affine(1.2, 0.55, 0.3); }

inline std::vector<std::vector<double>> symmetric_rows(int n, double sigma) {
  std::vector<std::vector<double>> q(n, std::vector<double>(n, sigma));
  for (int i = 0; i < n; ++i) q[i][i] = 1.0 - (n - 1) * sigma;
  return q;
}

inline SystemConfig main_config(int theta_max = 20, int delta_max = 20) {
  SystemConfig c;
  c.alphabet_size = 3;
  c.transition_matrix = kMainChain;
  c.p_s = 0.7;
  c.age_function = main_rho();
  c.theta_max = theta_max;
  c.delta_max = delta_max;
  c.f_max = 0.1;
  c.lambda_max = 1000.0;
  c.seed = 20250101;
  return c;
}

inline SystemConfig symmetric_config(double sigma = 0.1, double p_s = 0.7, int theta_max = 20, int delta_max = 20) {
  SystemConfig c = main_config(theta_max, delta_max);
  c.transition_matrix = symmetric_rows(3, sigma);
  c.p_s = p_s;
  return c;
}

}  // namespace remest::fixtures
