#include <gtest/gtest.h>

#include <cmath>

#include "lu25d/matrix.hpp"

using namespace lu25d;

namespace {

// Textbook unblocked GEPP, kept independent of the library kernels.
struct Unblocked {
  DenseMatrix lu;
  std::vector<std::size_t> orig;
};

Unblocked unblocked_gepp(DenseMatrix a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> orig(n);
  for (std::size_t i = 0; i < n; ++i) orig[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      const double mr = std::fabs(a(r, k)), mb = std::fabs(a(best, k));
      if (mr > mb || (mr == mb && orig[r] < orig[best])) best = r;
    }
    a.swap_rows(k, best);
    std::swap(orig[k], orig[best]);
    for (std::size_t r = k + 1; r < n; ++r) {
      a(r, k) /= a(k, k);
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= a(r, k) * a(k, c);
    }
  }
  return {a, orig};
}

}  // namespace

TEST(RandomMatrix, DeterministicAndInRange) {
  const auto a = random_matrix(20, 42);
  const auto b = random_matrix(20, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, random_matrix(20, 43));
  for (double x : a.data()) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(RandomMatrix, ZeroOrderRejected) { EXPECT_THROW(random_matrix(0, 1), InvalidArgument); }

TEST(DenseMatrix, RejectsNonFiniteAndBadLength) {
  EXPECT_THROW(DenseMatrix(2, 2, {1, 2, 3}), DimensionError);
  EXPECT_THROW(DenseMatrix(1, 2, {1, NAN}), InvalidArgument);
  EXPECT_THROW(DenseMatrix(1, 1, {INFINITY}), InvalidArgument);
}

TEST(Permutation, RowIOfOutputIsRowMapIOfInput) {
  const DenseMatrix a(3, 2, {0, 1, 10, 11, 20, 21});
  const auto b = apply_permutation(a, RowPermutation({2, 0, 1}));
  EXPECT_EQ(b, DenseMatrix(3, 2, {20, 21, 0, 1, 10, 11}));
}

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(RowPermutation({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(RowPermutation({0, 3}), InvalidArgument);
  EXPECT_THROW(apply_permutation(DenseMatrix(3, 3), RowPermutation::identity(2)), DimensionError);
}

TEST(Permutation, InverseAndCompose) {
  const RowPermutation p({2, 0, 3, 1});
  EXPECT_EQ(compose(p, p.inverse()), RowPermutation::identity(4));
  const DenseMatrix a = random_matrix(4, 5);
  const RowPermutation q({1, 3, 0, 2});
  EXPECT_EQ(apply_permutation(apply_permutation(a, p), q), apply_permutation(a, compose(p, q)));
}

TEST(Residual, ScaledIdentityAgainstIdentityFactors) {
  DenseMatrix a(3, 3);
  for (int i = 0; i < 3; ++i) a(i, i) = 2.0;
  const LUFactors f{DenseMatrix::identity(3), DenseMatrix::identity(3), RowPermutation::identity(3)};
  EXPECT_DOUBLE_EQ(residual_norm(a, f), 0.5);
}

TEST(Residual, DimensionMismatchRejected) {
  const LUFactors f{DenseMatrix::identity(2), DenseMatrix::identity(2), RowPermutation::identity(2)};
  EXPECT_THROW(residual_norm(DenseMatrix::identity(3), f), DimensionError);
}

TEST(Oracle, AntiDiagonalSwapsRows) {
  const auto f = blocked_lu_oracle(DenseMatrix(2, 2, {0, 1, 1, 0}), 1);
  EXPECT_EQ(f.perm, RowPermutation({1, 0}));
  EXPECT_EQ(f.l, DenseMatrix::identity(2));
  EXPECT_EQ(f.u, DenseMatrix::identity(2));
}

TEST(Oracle, IdentityFactorsTrivially) {
  for (std::size_t v : {1, 2, 4, 8}) {
    const auto f = blocked_lu_oracle(DenseMatrix::identity(8), v);
    EXPECT_EQ(f.l, DenseMatrix::identity(8));
    EXPECT_EQ(f.u, DenseMatrix::identity(8));
    EXPECT_EQ(f.perm, RowPermutation::identity(8));
  }
}

TEST(Oracle, TiesGoToSmallestOriginalRow) {
  // Column 0 has equal magnitudes in rows 1 and 2; row 1 must win.
  const DenseMatrix a(3, 3, {0.5, 1, 0, -2, 0, 1, 2, 1, 1});
  const auto f = blocked_lu_oracle(a, 1);
  EXPECT_EQ(f.perm[0], 1u);
}

TEST(Oracle, SingularPanelReportsIterationAndColumn) {
  DenseMatrix a = DenseMatrix::identity(4);
  a(2, 2) = 0.0;
  try {
    blocked_lu_oracle(a, 2);
    FAIL() << "expected SingularPanelError";
  } catch (const SingularPanelError& e) {
    EXPECT_EQ(e.iteration(), 1u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(Oracle, RejectsBadShapes) {
  EXPECT_THROW(blocked_lu_oracle(DenseMatrix(2, 3), 1), DimensionError);
  EXPECT_THROW(blocked_lu_oracle(DenseMatrix::identity(6), 4), InvalidArgument);
  EXPECT_THROW(blocked_lu_oracle(DenseMatrix::identity(6), 0), InvalidArgument);
}

TEST(Oracle, MatchesUnblockedPartialPivoting) {
  for (std::size_t v : {1, 2, 4, 8}) {
    const DenseMatrix a = random_matrix(32, 11 + v);
    const auto f = blocked_lu_oracle(a, v);
    const auto ref = unblocked_gepp(a);
    EXPECT_EQ(f.perm.map(), ref.orig) << "v=" << v;
    for (std::size_t i = 0; i < 32; ++i) {
      for (std::size_t j = 0; j < 32; ++j) {
        const double want = ref.lu(i, j);
        const double got = j < i ? f.l(i, j) : f.u(i, j);
        EXPECT_NEAR(got, want, 1e-12) << i << "," << j;
      }
    }
    EXPECT_LE(residual_norm(a, f), 1e-13);
  }
}

TEST(Oracle, UnitBlockEqualsUnblockedExactly) {
  // With v = 1 the blocked schedule performs the same operations in the same order.
  const DenseMatrix a = random_matrix(16, 3);
  const auto f = blocked_lu_oracle(a, 1);
  const auto ref = unblocked_gepp(a);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      EXPECT_EQ(j < i ? f.l(i, j) : f.u(i, j), ref.lu(i, j));
    }
  }
}
