#pragma once

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <vector>

namespace remest {

using Matrix = Eigen::MatrixXd;

/// Probability vector over a finite alphabet.
struct Distribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
  /// Throws DomainError unless entries are nonnegative and sum to 1 within `tol`.
  void validate(double tol = 1e-12) const;
};

/// Irreducible, row-stochastic transition matrix of a finite Markov source.
///
/// Immutable after construction. Powers Q^0..Q^k are memoized; the first
/// `precompute` powers are filled eagerly so that concurrent readers never
/// touch the lock for ages inside the model's truncation window.
class MarkovChain {
 public:
  /// Validates `rows` (square, side >= 2, entries in [0,1], rows sum to 1
  /// within 1e-9, strongly connected support) and snaps row sums to 1.
  explicit MarkovChain(const Matrix& rows, int precompute = 0);

  int n_states() const { return static_cast<int>(q_.rows()); }
  const Matrix& matrix() const { return q_; }
  double operator()(int i, int j) const { return q_(i, j); }

  /// Q^n, memoized. Q^0 is the identity.
  const Matrix& power(int n) const;

  /// Stationary distribution, computed once on first use.
  const Distribution& stationary() const;

 private:
  struct PowerCache {
    std::mutex mutex;
    std::vector<std::unique_ptr<Matrix>> powers;
    std::once_flag nu_once;
    Distribution nu;
  };

  Matrix q_;
  std::shared_ptr<PowerCache> cache_;
};

MarkovChain validate_chain(const Matrix& rows);
MarkovChain validate_chain(const std::vector<std::vector<double>>& rows);

/// Q^n for the chain; n = 0 gives the identity.
Matrix matrix_power(const MarkovChain& chain, int n);

/// Stationary distribution by power iteration (tol 1e-14, cap 1e6 steps),
/// falling back to the linear system nu (Q - I) = 0, sum(nu) = 1 when the
/// iteration stalls (periodic chains).
Distribution stationary(const MarkovChain& chain);

/// Same fixed point, always by direct linear solve.
Distribution stationary_linear_solve(const Matrix& q);

/// Chain with off-diagonal entries `sigma` and diagonal 1 - (n-1) sigma.
Matrix symmetric_chain_matrix(int n_states, double sigma);

/// Closed form of the n-th power of symmetric_chain_matrix:
/// (1 - n_states*sigma)^n I + (1 - (1 - n_states*sigma)^n) / n_states * 11^T.
/// Requires 0 < sigma <= 1/n_states (DomainError otherwise).
Matrix symmetric_power_closed_form(int n_states, double sigma, int n);

/// Receiver belief over the current source state given the last received
/// content `z` and its age `theta`: point mass at z for theta = 0, row z of
/// Q^theta otherwise.
Distribution belief(const MarkovChain& chain, int z, int theta);

/// Total-variation distance between two distributions of equal length.
double total_variation(const Distribution& a, const Distribution& b);

}  // namespace remest
