#include "fixtures.hpp"
#include "remest/errors.hpp"
#include "remest/markov_chain.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace remest;
using remest::fixtures::kChainA;
using remest::fixtures::kChainB;
using remest::fixtures::kMainChain;

namespace {

// Triple-loop product, independent of Eigen's kernels.
Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

Matrix naive_power(const Matrix& q, int n) {
  Matrix r = Matrix::Identity(q.rows(), q.cols());
  for (int i = 0; i < n; ++i) r = naive_product(r, q);
  return r;
}

}  // namespace

TEST(ValidateChain, AcceptsTwoStateChain) {
  const auto chain = validate_chain(kChainA);
  EXPECT_EQ(chain.n_states(), 2);
  EXPECT_DOUBLE_EQ(chain(0, 1), 0.2);
}

TEST(ValidateChain, RejectsIdentityAsReducible) {
  EXPECT_THROW(validate_chain(std::vector<std::vector<double>>{{1, 0}, {0, 1}}), ReducibleChain);
}

TEST(ValidateChain, RejectsBadRowSum) {
  EXPECT_THROW(validate_chain(std::vector<std::vector<double>>{{0.5, 0.6}, {0.3, 0.7}}), RowSumError);
}

TEST(ValidateChain, RejectsNegativeEntry) {
  EXPECT_THROW(validate_chain(std::vector<std::vector<double>>{{1.1, -0.1}, {0.3, 0.7}}), NegativeEntry);
}

TEST(ValidateChain, RejectsNonSquareAndTiny) {
  EXPECT_THROW(validate_chain(std::vector<std::vector<double>>{{1.0}}), DomainError);
  EXPECT_THROW(validate_chain(std::vector<std::vector<double>>{{0.5, 0.5}, {1.0}}), DomainError);
}

TEST(ValidateChain, RejectsOneWayReachability) {
  // 0 -> 1 but 1 never returns.
  EXPECT_THROW(validate_chain(std::vector<std::vector<double>>{{0.5, 0.5}, {0.0, 1.0}}), ReducibleChain);
}

TEST(ValidateChain, ToleratesSmallRowDrift) {
  const auto chain = validate_chain(std::vector<std::vector<double>>{{0.8 + 5e-10, 0.2}, {0.3, 0.7}});
  EXPECT_NEAR(chain(0, 0) + chain(0, 1), 1.0, 1e-15);
}

TEST(MatrixPower, ZeroIsIdentityAndOneIsQ) {
  const auto chain = validate_chain(kChainA);
  EXPECT_TRUE(matrix_power(chain, 0).isApprox(Matrix::Identity(2, 2)));
  EXPECT_EQ(matrix_power(chain, 1), chain.matrix());
}

TEST(MatrixPower, SquareMatchesHandProduct) {
  const auto chain = validate_chain(kChainA);
  Matrix expected(2, 2);
  expected << 0.70, 0.30, 0.45, 0.55;
  EXPECT_LT((matrix_power(chain, 2) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MatrixPower, LargePowerApproachesStationaryRows) {
  const auto chain = validate_chain(kChainA);
  const Matrix& p = chain.power(50);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(p(i, 0), 0.6, 1e-10);
    EXPECT_NEAR(p(i, 1), 0.4, 1e-10);
  }
}

TEST(MatrixPower, PropertiesOnMainChain) {
  const auto chain = validate_chain(kMainChain);
  for (int n = 0; n <= 40; ++n) {
    const Matrix& p = chain.power(n);
    EXPECT_LT((p - naive_power(chain.matrix(), n)).cwiseAbs().maxCoeff(), 1e-12) << n;
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LE(p.maxCoeff(), 1.0);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
  }
  for (int m = 0; m <= 20; ++m)
    for (int n = 0; n <= 20; ++n)
      EXPECT_LT((chain.power(m + n) - chain.power(m) * chain.power(n)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MatrixPower, NegativeExponentRejected) {
  const auto chain = validate_chain(kChainA);
  EXPECT_THROW(chain.power(-1), DomainError);
}

TEST(Stationary, ChainA) {
  const auto nu = stationary(validate_chain(kChainA));
  EXPECT_NEAR(nu[0], 0.6, 1e-12);
  EXPECT_NEAR(nu[1], 0.4, 1e-12);
}

TEST(Stationary, SymmetricIsUniform) {
  const auto nu = stationary(MarkovChain(symmetric_chain_matrix(3, 0.1)));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(nu[i], 1.0 / 3.0, 1e-12);
}

TEST(Stationary, MainChainMatchesDenseNullSpace) {
  const auto chain = validate_chain(kMainChain);
  const auto nu = chain.stationary();
  // Oracle: null vector of (Q - I)^T from a dense eigen-decomposition.
  Eigen::EigenSolver<Matrix> es(chain.matrix().transpose());
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(es.eigenvalues()[i].real() - 1.0) < std::abs(es.eigenvalues()[k].real() - 1.0)) k = i;
  Eigen::VectorXd v = es.eigenvectors().col(k).real();
  v /= v.sum();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(nu[i], v(i), 1e-12);
  Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(nu.probs.data(), 3);
  EXPECT_LT((row * chain.matrix() - row).cwiseAbs().maxCoeff(), 1e-12);
  nu.validate();
}

TEST(Stationary, PeriodicChainFallsBackToLinearSolve) {
  const auto chain = validate_chain(std::vector<std::vector<double>>{{0, 1}, {1, 0}});
  const auto nu = stationary(chain);
  EXPECT_NEAR(nu[0], 0.5, 1e-12);
  EXPECT_NEAR(nu[1], 0.5, 1e-12);
}

TEST(ClosedForm, SmallCases) {
  const Matrix one = symmetric_power_closed_form(3, 0.1, 1);
  const Matrix two = symmetric_power_closed_form(3, 0.1, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(one(i, j), i == j ? 0.8 : 0.1, 1e-15);
      EXPECT_NEAR(two(i, j), i == j ? 0.66 : 0.17, 1e-15);
    }
  const Matrix far = symmetric_power_closed_form(3, 0.1, 400);
  EXPECT_LT((far - Matrix::Constant(3, 3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ClosedForm, AgreesWithMatrixPower) {
  for (int n : {2, 3, 5}) {
    for (double sigma : {0.05, 0.1, 1.0 / n}) {
      const MarkovChain chain(symmetric_chain_matrix(n, sigma));
      for (int k = 0; k <= 50; ++k) {
        EXPECT_LT((symmetric_power_closed_form(n, sigma, k) - naive_power(chain.matrix(), k)).cwiseAbs().maxCoeff(),
                  1e-12);
      }
    }
  }
}

TEST(ClosedForm, DomainChecked) {
  EXPECT_THROW(symmetric_power_closed_form(3, 0.0, 2), DomainError);
  EXPECT_THROW(symmetric_power_closed_form(3, 0.34, 2), DomainError);
  EXPECT_NO_THROW(symmetric_power_closed_form(3, 1.0 / 3.0, 2));
}

TEST(Belief, PointMassRowAndPower) {
  const auto chain = validate_chain(kChainA);
  auto b0 = belief(chain, 1, 0);
  EXPECT_EQ(b0.probs, (std::vector<double>{0.0, 1.0}));
  auto b1 = belief(chain, 1, 1);
  EXPECT_DOUBLE_EQ(b1[0], 0.3);
  auto b3 = belief(chain, 1, 3);
  EXPECT_NEAR(b3[0], 0.525, 1e-12);
  EXPECT_NEAR(b3[1], 0.475, 1e-12);
}

TEST(Belief, ClosedFormCurveOfChainA) {
  const auto chain = validate_chain(kChainA);
  for (int t = 0; t <= 30; ++t) EXPECT_NEAR(belief(chain, 1, t)[1], 0.4 + 0.6 * std::pow(0.5, t), 1e-12);
}

TEST(Belief, ConvergesToStationaryInTotalVariation) {
  for (const auto& rows : {kChainA, kChainB}) {
    const auto chain = validate_chain(rows);
    double prev = 2.0;
    for (int t = 1; t <= 12; ++t) {
      double tv = 0.0;
      for (int z = 0; z < 2; ++z) tv = std::max(tv, total_variation(belief(chain, z, t), chain.stationary()));
      EXPECT_LE(tv, prev + 1e-15);
      prev = tv;
    }
    EXPECT_LT(prev, 1e-2);
  }
}
