#include "subsel/linalg.hpp"

#include "subsel/barrier.hpp"
#include "subsel/generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace subsel;

namespace {

Matrix gaussian(Index r, Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix A(r, c);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
  return A;
}

void expect_valid_eig(const Matrix& Y, const EigenDecomposition& e) {
  const Index m = Y.rows();
  EXPECT_LE((e.basis.transpose() * e.basis - Matrix::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-10);
  const Matrix rec = e.basis * e.eigenvalues.asDiagonal() * e.basis.transpose();
  const double scale = std::max(1.0, Y.cwiseAbs().maxCoeff());
  EXPECT_LE((rec - Y).cwiseAbs().maxCoeff(), 1e-9 * scale);
  for (Index r = 1; r < m; ++r) EXPECT_GE(e.eigenvalues(r - 1), e.eigenvalues(r));
}

}  // namespace

TEST(SymEig, TrivialMatrices) {
  const EigenDecomposition z = sym_eig(Matrix::Zero(3, 3));
  EXPECT_EQ(z.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
  expect_valid_eig(Matrix::Zero(3, 3), z);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  const EigenDecomposition e = sym_eig(d);
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 3.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 1.0);

  Vector x = gaussian(5, 1, 1).col(0).normalized();
  const Matrix P = x * x.transpose();
  const EigenDecomposition p = sym_eig(P);
  EXPECT_NEAR(p.eigenvalues(0), 1.0, 1e-14);
  for (Index r = 1; r < 5; ++r) EXPECT_NEAR(p.eigenvalues(r), 0.0, 1e-14);
  expect_valid_eig(P, p);
}

TEST(SymEig, RandomSymmetric) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix G = gaussian(7, 7, s);
    const Matrix Y = G + G.transpose();
    expect_valid_eig(Y, sym_eig(Y));
  }
}

TEST(LQ, OrthonormalInputGivesIdentity) {
  const Matrix Q = orthonormal_rows(4, 9, RngSeed{3});
  const LQFactors f = lq(Q);
  EXPECT_LE((f.L - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LQ, RowVector) {
  Matrix v(1, 4);
  v << 3.0, -5.0, 1.0, 4.0;
  const LQFactors f = lq(v);
  EXPECT_NEAR(f.L(0, 0), v.norm(), 1e-14);
  EXPECT_LE((f.Q - v / v.norm()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LQ, RandomReconstruction) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Matrix X = gaussian(3, 7, 100 + s);
    const LQFactors f = lq(X);
    EXPECT_LE((f.L * f.Q - X).cwiseAbs().maxCoeff(), 1e-9 * X.cwiseAbs().maxCoeff());
    EXPECT_LE((f.Q * f.Q.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(f.L.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff(), 0.0);
    for (Index j = 0; j < 3; ++j) EXPECT_GT(f.L(j, j), 0.0);
  }
}

TEST(LQ, RankDeficientInput) {
  Matrix X = gaussian(3, 6, 9);
  X.row(2) = 2.0 * X.row(0) - X.row(1);
  EXPECT_THROW(lq(X), RankError);
  EXPECT_THROW(lq(Matrix::Zero(2, 5)), RankError);
  EXPECT_THROW(lq(gaussian(4, 3, 1)), std::invalid_argument);
}

TEST(LQ, SelectionBoundTransfersFromQ) {
  // ||X_S^+|| / ||X^+|| <= ||Q_S^+||_2 in both norms.
  std::mt19937_64 rng(17);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix X = gaussian(3, 9, 200 + s);
    const Matrix Q = lq(X).Q;
    std::vector<Index> all(9);
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Index> S(all.begin(), all.begin() + 4);
    const double q = std::sqrt(oracle::pinv_spectral_sq(oracle::columns(Q, S)));
    const double r2 = std::sqrt(oracle::pinv_spectral_sq(oracle::columns(X, S)) /
                                oracle::pinv_spectral_sq(X));
    const double rf = std::sqrt(oracle::pinv_frobenius_sq(oracle::columns(X, S)) /
                                oracle::pinv_frobenius_sq(X));
    EXPECT_LE(r2, q * (1 + 1e-10));
    EXPECT_LE(rf, q * (1 + 1e-10));
  }
}

TEST(SmallestSingularValue, Cases) {
  const SingularValueSummary id = smallest_singular_value(Matrix::Identity(3, 3));
  EXPECT_NEAR(id.sigma_min, 1.0, 1e-15);
  EXPECT_FALSE(id.singular);

  Matrix padded = Matrix::Zero(2, 3);
  padded(0, 0) = padded(1, 1) = 1.0;
  EXPECT_NEAR(smallest_singular_value(padded).sigma_min, 1.0, 1e-15);

  Matrix dup(2, 2);
  dup << 1.0, 1.0, 2.0, 2.0;
  EXPECT_TRUE(smallest_singular_value(dup).singular);

  EXPECT_TRUE(smallest_singular_value(Matrix::Identity(3, 2)).singular);
}

TEST(SmallestSingularValue, MatchesGramEigenvalue) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix A = gaussian(4, 10, 300 + s);
    const double sigma = smallest_singular_value(A).sigma_min;
    const double via_gram = std::sqrt(sym_eig(A * A.transpose()).lambda_min());
    EXPECT_NEAR(sigma, via_gram, 1e-8 * via_gram);
  }
}

TEST(Bisect, Identity) {
  EXPECT_NEAR(bisect_root([](double x) { return x; }, 0.0, 1.0, 0.3), 0.3, 1e-9);
}

TEST(Bisect, PotentialLevel) {
  const std::vector<double> e{1.0, 2.0};
  auto f = [&](double l) { return phi(e, l); };
  const double x = bisect_root(f, -10.0, 1.0 - 1e-12, 3.0);
  // Root of 1/(1-l) + 1/(2-l) = 3, from a 40-digit solve.
  EXPECT_NEAR(x, 0.56574145408933512, 1e-9);
  EXPECT_NEAR(f(x), 3.0, 3e-9);

  const Bracket br = bisect_bracket(f, -10.0, 1.0 - 1e-12, 3.0);
  EXPECT_LE(br.f_below, 3.0);
  EXPECT_GE(br.f_above, 3.0);
  EXPECT_LE(std::abs(br.above - br.below), 1e-12);
}

TEST(Bisect, TargetOutsideRange) {
  EXPECT_THROW(bisect_root([](double x) { return x; }, 0.0, 1.0, 2.0), BracketError);
}

TEST(Golden, Parabola) {
  EXPECT_NEAR(golden_max([](double x) { return -(x - 0.7) * (x - 0.7); }, 0.0, 1.0), 0.7, 1e-8);
}

TEST(Golden, ConstantIsDeterministic) {
  auto f = [](double) { return 1.0; };
  const double a = golden_max(f, -2.0, 3.0);
  EXPECT_GE(a, -2.0);
  EXPECT_LE(a, 3.0);
  EXPECT_EQ(a, golden_max(f, -2.0, 3.0));
}
