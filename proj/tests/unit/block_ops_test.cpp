#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tnare/block_ops.hpp"
#include "tnare/low_rank.hpp"

namespace tnare {
namespace {

using testing::orthonormal;
using testing::random_matrix;

TEST(ExtendBasis, ReconstructsInput) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd q = orthonormal(50, 6, rng);
  const Eigen::MatrixXd y = random_matrix(50, 4, rng);
  const BasisExtension ext = extend_basis(q, y);
  ASSERT_EQ(ext.q_hat.cols(), 4);
  Eigen::MatrixXd full(50, 10);
  full << q, ext.q_hat;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(10, 10);
  EXPECT_LE((full.transpose() * full - eye).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::MatrixXd rebuilt = q * ext.s + ext.q_hat * ext.r;
  EXPECT_LE(testing::rel_diff(rebuilt, y), 1e-14);
}

TEST(ExtendBasis, DropsDirectionsInsideSpan) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd q = orthonormal(40, 5, rng);
  Eigen::MatrixXd y(40, 3);
  y << q * random_matrix(5, 2, rng), random_matrix(40, 1, rng);
  const BasisExtension ext = extend_basis(q, y);
  EXPECT_EQ(ext.q_hat.cols(), 1);
  EXPECT_EQ(ext.r.rows(), 1);
  EXPECT_EQ(ext.r.cols(), 3);
  EXPECT_LE(testing::rel_diff(q * ext.s + ext.q_hat * ext.r, y), 1e-14);
}

TEST(ExtendBasis, RankDeficientBlock) {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd base = random_matrix(30, 2, rng);
  Eigen::MatrixXd y(30, 4);
  y << base, base * random_matrix(2, 2, rng);
  const BasisExtension ext = extend_basis(Eigen::MatrixXd(30, 0), y);
  EXPECT_EQ(ext.q_hat.cols(), 2);
  EXPECT_LE(testing::rel_diff(ext.q_hat * ext.r, y), 1e-14);
}

TEST(ExtendBasis, EmptyAndZeroInputs) {
  std::mt19937_64 rng(14);
  const Eigen::MatrixXd q = orthonormal(20, 3, rng);
  const BasisExtension none = extend_basis(q, Eigen::MatrixXd(20, 0));
  EXPECT_EQ(none.q_hat.cols(), 0);
  const BasisExtension zero = extend_basis(q, Eigen::MatrixXd::Zero(20, 2));
  EXPECT_EQ(zero.q_hat.cols(), 0);
  EXPECT_EQ(zero.r.cols(), 2);
}

TEST(ExtendBasis, CountsFlops) {
  std::mt19937_64 rng(15);
  FlopModel fm;
  extend_basis(orthonormal(64, 4, rng), random_matrix(64, 3, rng), &fm);
  EXPECT_GT(fm.pending()[Kernel::orthogonalization], 8.0 * 64 * 4 * 3 - 1.0);
}

TEST(TruncatedSvd, TruncatesRelative) {
  const Eigen::Vector4d s(1.0, 1e-3, 1e-9, 0.0);
  std::mt19937_64 rng(16);
  const Eigen::MatrixXd u = orthonormal(10, 4, rng);
  const Eigen::MatrixXd v = orthonormal(8, 4, rng);
  const Eigen::MatrixXd m = u * s.asDiagonal() * v.transpose();
  EXPECT_EQ(truncated_svd(m, 1e-6).s.size(), 2);
  EXPECT_EQ(truncated_svd(m, 1e-12).s.size(), 3);
  // Exact zeros go even with trunc_rel = 0; roundoff-level values may stay.
  EXPECT_LE(truncated_svd(Eigen::MatrixXd::Zero(5, 5), 0.0).s.size(), 0);
  const TruncatedSvd t = truncated_svd(m, 1e-6);
  EXPECT_NEAR(t.s(0), 1.0, 1e-15);
  EXPECT_NEAR(t.s(1), 1e-3, 1e-15);
}

TEST(TruncatedSvd, SignConvention) {
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd m = random_matrix(12, 5, rng);
  const TruncatedSvd t = truncated_svd(m, 0.0);
  for (Index j = 0; j < t.u.cols(); ++j) {
    Index imax = 0;
    t.u.col(j).cwiseAbs().maxCoeff(&imax);
    EXPECT_GT(t.u(imax, j), 0.0);
  }
  EXPECT_LE(testing::rel_diff(t.u * t.s.asDiagonal() * t.v.transpose(), m), 1e-14);
  const TruncatedSvd flipped = truncated_svd(-m, 0.0);
  EXPECT_LE(testing::rel_diff(flipped.u, t.u), 1e-13);
  EXPECT_LE(testing::rel_diff(flipped.v, -t.v), 1e-13);
}

TEST(LowrankProductNorm, MatchesDense) {
  std::mt19937_64 rng(18);
  const Eigen::MatrixXd y = random_matrix(100, 6, rng);
  const Eigen::MatrixXd z = random_matrix(100, 6, rng);
  EXPECT_NEAR(lowrank_product_norm(y, z), (y * z.transpose()).norm(), 1e-12 * (y * z.transpose()).norm());
  EXPECT_EQ(lowrank_product_norm(Eigen::MatrixXd(100, 0), Eigen::MatrixXd(100, 0)), 0.0);
}

TEST(ThinR, GramMatches) {
  std::mt19937_64 rng(19);
  const Eigen::MatrixXd m = random_matrix(30, 5, rng);
  const Eigen::MatrixXd r = thin_r(m);
  EXPECT_EQ(r.rows(), 5);
  EXPECT_LE(testing::rel_diff(r.transpose() * r, m.transpose() * m), 1e-14);
}

TEST(SignAlignedDistance, IgnoresColumnSigns) {
  std::mt19937_64 rng(20);
  const Eigen::MatrixXd a = random_matrix(10, 3, rng);
  Eigen::MatrixXd b = a;
  b.col(1) *= -1.0;
  EXPECT_EQ(sign_aligned_distance(a, b), 0.0);
  EXPECT_TRUE(std::isinf(sign_aligned_distance(a, Eigen::MatrixXd(10, 2))));
}

TEST(LowRankBilinear, DistanceAndNorm) {
  std::mt19937_64 rng(21);
  const LowRankBilinear x = testing::random_low_rank(40, 4, rng);
  const LowRankBilinear y = testing::random_low_rank(40, 3, rng);
  EXPECT_NEAR(frobenius_distance(x, y), (x.dense() - y.dense()).norm(), 1e-13);
  EXPECT_NEAR(frobenius_norm(x), x.dense().norm(), 1e-14);
  EXPECT_NEAR(x.entry(3, 7), x.dense()(3, 7), 1e-15);
  EXPECT_LE(x.orthonormality_error(), 1e-14);
  EXPECT_TRUE(x.core_is_sorted_nonnegative());
  EXPECT_EQ(x.transposed().dense(), x.dense().transpose());
}

}  // namespace
}  // namespace tnare
