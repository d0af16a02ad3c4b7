#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "lu25d/error.hpp"

namespace lu25d {

/// Pivot magnitudes below this are treated as exact zeros.
inline constexpr double kSingularityThreshold = 1e-300;

/// Bytes per counted word (one 64-bit matrix element).
inline constexpr std::size_t kBytesPerWord = 8;

// Row-major dense matrix of doubles. Entries are finite on construction.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                           " != " + std::to_string(rows_) + "x" +
                           std::to_string(cols_));
    }
    for (double x : data_) {
      if (!std::isfinite(x)) throw InvalidArgument("matrix entries must be finite");
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(row(a).begin(), row(a).end(), row(b).begin());
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Row i of the permuted matrix is row map[i] of the original.
class RowPermutation {
 public:
  RowPermutation() = default;

  explicit RowPermutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t r : map_) {
      if (r >= map_.size() || seen[r]) {
        throw InvalidArgument("row permutation is not a bijection");
      }
      seen[r] = true;
    }
  }

  static RowPermutation identity(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    return RowPermutation(std::move(m));
  }

  std::size_t size() const noexcept { return map_.size(); }
  std::size_t operator[](std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }

  RowPermutation inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
    return RowPermutation(std::move(inv));
  }

  friend bool operator==(const RowPermutation&, const RowPermutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

/// The permutation equivalent to applying `first` and then `second`.
inline RowPermutation compose(const RowPermutation& first, const RowPermutation& second) {
  if (first.size() != second.size()) throw DimensionError("permutation length mismatch");
  std::vector<std::size_t> m(first.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = first[second[i]];
  return RowPermutation(std::move(m));
}

struct LUFactors {
  DenseMatrix l;  // unit lower triangular
  DenseMatrix u;  // upper triangular
  RowPermutation perm;
};

/// n x n matrix with entries uniform in [-1, 1]; identical seeds give identical bits.
inline DenseMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("random_matrix: n must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<double> data(n * n);
  // 53 random mantissa bits mapped onto [0, 1], then onto [-1, 1]. Done by hand
  // so the stream does not depend on the standard library's distributions.
  constexpr double kScale = 1.0 / static_cast<double>((std::uint64_t{1} << 53) - 1);
  for (double& x : data) {
    const double unit = static_cast<double>(gen() >> 11) * kScale;
    x = 2.0 * unit - 1.0;
  }
  return DenseMatrix(n, n, std::move(data));
}

inline DenseMatrix apply_permutation(const DenseMatrix& a, const RowPermutation& p) {
  if (p.size() != a.rows()) {
    throw DimensionError("permutation length " + std::to_string(p.size()) +
                         " != row count " + std::to_string(a.rows()));
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto src = a.row(p[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

/// ||P A - L U||_F / ||A||_F.
inline double residual_norm(const DenseMatrix& a, const LUFactors& f) {
  const std::size_t n = a.rows();
  if (!a.square() || f.l.rows() != n || f.l.cols() != n || f.u.rows() != n ||
      f.u.cols() != n || f.perm.size() != n) {
    throw DimensionError("residual_norm: factor dimensions do not match the matrix");
  }
  const DenseMatrix pa = apply_permutation(a, f.perm);
  double diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      const std::size_t kmax = std::min(i, j);
      for (std::size_t k = 0; k <= kmax; ++k) s += f.l(i, k) * f.u(k, j);
      const double d = pa(i, j) - s;
      diff += d * d;
    }
  }
  const double norm_a = a.frobenius_norm();
  if (norm_a == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff) / norm_a;
}

/// Splits a combined in-place LU (unit L below the diagonal, U on and above) apart.
inline LUFactors split_combined(const DenseMatrix& lu, RowPermutation perm) {
  const std::size_t n = lu.rows();
  DenseMatrix l(n, n), u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i) {
        l(i, j) = lu(i, j);
      } else {
        u(i, j) = lu(i, j);
      }
    }
    l(i, i) = 1.0;
  }
  return {std::move(l), std::move(u), std::move(perm)};
}

namespace detail {

// Shared by the oracle, the tournament, and the engine so the same floating
// point operations happen in the same order everywhere.

/// Larger magnitude wins; equal magnitudes go to the smaller original row index.
inline bool pivot_precedes(double mag_a, std::size_t orig_a, double mag_b,
                           std::size_t orig_b) {
  return mag_a > mag_b || (mag_a == mag_b && orig_a < orig_b);
}

/// Eliminates column j of `row` against `pivot`: stores the multiplier in
/// row[j] and updates row[j+1..].
inline void eliminate_with_pivot(std::span<double> row, std::span<const double> pivot,
                                 std::size_t j) {
  const double l = row[j] / pivot[j];
  row[j] = l;
  for (std::size_t jj = j + 1; jj < row.size(); ++jj) row[jj] -= l * pivot[jj];
}

}  // namespace detail

/// Right-looking blocked LU with partial pivoting over the full trailing panel.
///
/// Each v-wide panel is factored column by column; the pivot for a column is the
/// largest-magnitude entry among the remaining rows, ties going to the smallest
/// original row index. Whole rows are swapped, then the row panel is solved and
/// the trailing matrix updated.
inline LUFactors blocked_lu_oracle(const DenseMatrix& input, std::size_t v) {
  if (!input.square()) throw DimensionError("blocked_lu_oracle: matrix must be square");
  const std::size_t n = input.rows();
  if (v == 0 || n % v != 0) {
    throw InvalidArgument("blocked_lu_oracle: panel width must divide n");
  }
  DenseMatrix a = input;
  std::vector<std::size_t> orig(n);
  std::iota(orig.begin(), orig.end(), std::size_t{0});

  for (std::size_t t = 0; t * v < n; ++t) {
    const std::size_t c0 = t * v;
    for (std::size_t j = 0; j < v; ++j) {
      const std::size_t col = c0 + j;
      std::size_t best = col;
      for (std::size_t r = col + 1; r < n; ++r) {
        if (detail::pivot_precedes(std::abs(a(r, col)), orig[r], std::abs(a(best, col)),
                                   orig[best])) {
          best = r;
        }
      }
      if (std::abs(a(best, col)) < kSingularityThreshold) throw SingularPanelError(t, col);
      a.swap_rows(col, best);
      std::swap(orig[col], orig[best]);
      const auto pivot = a.row(col).subspan(c0, v);
      for (std::size_t r = col + 1; r < n; ++r) {
        detail::eliminate_with_pivot(a.row(r).subspan(c0, v), pivot, j);
      }
    }
    // U01 = L00^{-1} A01
    for (std::size_t c = c0 + v; c < n; ++c) {
      for (std::size_t i = 0; i < v; ++i) {
        for (std::size_t jr = i + 1; jr < v; ++jr) {
          a(c0 + jr, c) -= a(c0 + jr, c0 + i) * a(c0 + i, c);
        }
      }
    }
    // A11 -= L10 U01
    for (std::size_t r = c0 + v; r < n; ++r) {
      for (std::size_t c = c0 + v; c < n; ++c) {
        double x = a(r, c);
        for (std::size_t k = 0; k < v; ++k) x -= a(r, c0 + k) * a(c0 + k, c);
        a(r, c) = x;
      }
    }
  }
  return split_combined(a, RowPermutation(std::move(orig)));
}

}  // namespace lu25d
