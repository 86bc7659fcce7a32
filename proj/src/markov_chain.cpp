#include "remest/markov_chain.hpp"

#include "remest/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace remest {

namespace {

constexpr double kRowSumTolerance = 1e-9;

// Strong connectivity of the support graph: every node reachable from 0 in
// the graph and in its transpose.
bool strongly_connected(const Matrix& q) {
  const int n = static_cast<int>(q.rows());
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        double w = transpose ? q(j, i) : q(i, j);
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

void Distribution::validate(double tol) const {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw DomainError("distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "distribution sums to " << sum;
    throw DomainError(os.str());
  }
}

MarkovChain::MarkovChain(const Matrix& rows, int precompute)
    : q_(rows), cache_(std::make_shared<PowerCache>()) {
  const auto n = q_.rows();
  if (n != q_.cols()) throw DomainError("transition matrix must be square");
  if (n < 2) throw DomainError("transition matrix must have side >= 2");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = q_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") = " << v << " is negative or not finite";
        throw NegativeEntry(os.str());
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = q_(i, j);
      if (v > 1.0) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") = " << v << " exceeds 1";
        throw RowSumError(os.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os << "row " << i << " sums to " << sum;
      throw RowSumError(os.str());
    }
    q_.row(i) /= sum;
  }
  if (!strongly_connected(q_)) {
    throw ReducibleChain("support of the transition matrix is not strongly connected");
  }
  cache_->powers.push_back(std::make_unique<Matrix>(Matrix::Identity(n, n)));
  cache_->powers.push_back(std::make_unique<Matrix>(q_));
  for (int k = 2; k <= precompute; ++k) {
    cache_->powers.push_back(std::make_unique<Matrix>(*cache_->powers.back() * q_));
  }
}

const Matrix& MarkovChain::power(int n) const {
  if (n < 0) throw DomainError("matrix power exponent must be nonnegative");
  auto& cache = *cache_;
  // Eagerly filled entries are never reallocated (unique_ptr), but the
  // vector itself may grow, so every access takes the lock.
  std::lock_guard<std::mutex> lock(cache.mutex);
  while (static_cast<int>(cache.powers.size()) <= n) {
    cache.powers.push_back(std::make_unique<Matrix>(*cache.powers.back() * q_));
  }
  return *cache.powers[n];
}

const Distribution& MarkovChain::stationary() const {
  std::call_once(cache_->nu_once, [this] { cache_->nu = remest::stationary(*this); });
  return cache_->nu;
}

MarkovChain validate_chain(const Matrix& rows) { return MarkovChain(rows); }

MarkovChain validate_chain(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw DomainError("transition matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return MarkovChain(m);
}

Matrix matrix_power(const MarkovChain& chain, int n) { return chain.power(n); }

Distribution stationary_linear_solve(const Matrix& q) {
  const auto n = q.rows();
  // nu (Q - I) = 0  <=>  (Q - I)^T nu^T = 0; replace the last equation by sum = 1.
  Matrix a = (q - Matrix::Identity(n, n)).transpose();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a.row(n - 1).setOnes();
  b(n - 1) = 1.0;
  Eigen::VectorXd nu = a.fullPivLu().solve(b);
  Distribution out;
  out.probs.assign(nu.data(), nu.data() + n);
  for (double& p : out.probs) p = std::max(p, 0.0);
  double s = std::accumulate(out.probs.begin(), out.probs.end(), 0.0);
  for (double& p : out.probs) p /= s;
  return out;
}

Distribution stationary(const MarkovChain& chain) {
  const Matrix& q = chain.matrix();
  const auto n = q.rows();
  Eigen::RowVectorXd nu = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  constexpr double kTol = 1e-14;
  constexpr long kCap = 1'000'000;
  bool converged = false;
  for (long it = 0; it < kCap; ++it) {
    Eigen::RowVectorXd next = nu * q;
    double diff = (next - nu).cwiseAbs().maxCoeff();
    nu = next;
    if (diff <= kTol) {
      converged = true;
      break;
    }
  }
  if (!converged) return stationary_linear_solve(q);
  Distribution out;
  out.probs.assign(nu.data(), nu.data() + n);
  double s = std::accumulate(out.probs.begin(), out.probs.end(), 0.0);
  for (double& p : out.probs) p /= s;
  return out;
}

Matrix symmetric_chain_matrix(int n_states, double sigma) {
  if (n_states < 2) throw DomainError("symmetric chain needs at least 2 states");
  Matrix m = Matrix::Constant(n_states, n_states, sigma);
  m.diagonal().setConstant(1.0 - (n_states - 1) * sigma);
  return m;
}

Matrix symmetric_power_closed_form(int n_states, double sigma, int n) {
  if (n_states < 2) throw DomainError("symmetric chain needs at least 2 states");
  if (!(sigma > 0.0) || sigma > 1.0 / n_states + 1e-15) {
    throw DomainError("sigma must lie in (0, 1/|X|]");
  }
  if (n < 0) throw DomainError("matrix power exponent must be nonnegative");
  const double r = std::pow(1.0 - n_states * sigma, n);
  Matrix m = Matrix::Constant(n_states, n_states, (1.0 - r) / n_states);
  m.diagonal().array() += r;
  return m;
}

Distribution belief(const MarkovChain& chain, int z, int theta) {
  const int n = chain.n_states();
  if (z < 0 || z >= n) throw DomainError("belief: content outside the alphabet");
  if (theta < 0) throw DomainError("belief: age must be nonnegative");
  Distribution out;
  out.probs.assign(n, 0.0);
  if (theta == 0) {
    out.probs[z] = 1.0;
    return out;
  }
  const Matrix& p = chain.power(theta);
  for (int x = 0; x < n; ++x) out.probs[x] = p(z, x);
  return out;
}

double total_variation(const Distribution& a, const Distribution& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace remest
