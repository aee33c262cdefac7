#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "kim/rational.hpp"

namespace kim {

using MatQ = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using VecQ = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RowQ = Eigen::Matrix<Rational, 1, Eigen::Dynamic>;

namespace linalg {

// Reduced row echelon form over an exact field scalar. Pivots are the first
// nonzero entries scanned left to right, so results are deterministic in the
// declared column order. Returns pivot column indices.
template <typename Mat>
std::vector<Eigen::Index> rref_in_place(Mat& a) {
  using Scalar = typename Mat::Scalar;
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index pr = -1;
    for (Eigen::Index r = row; r < a.rows(); ++r)
      if (!(a(r, col) == Scalar(0))) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    if (pr != row) a.row(pr).swap(a.row(row));
    Scalar inv = Scalar(1) / a(row, col);
    a.row(row) *= inv;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (r == row) continue;
      if (!(a(r, col) == Scalar(0))) a.row(r) -= a(r, col) * a.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename Mat>
Eigen::Index rank(Mat a) {
  return static_cast<Eigen::Index>(rref_in_place(a).size());
}

// Basis of the right kernel {x : a x = 0}, columns of the result.
template <typename Mat>
Mat kernel_basis(Mat a) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index n = a.cols();
  auto pivots = rref_in_place(a);
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;
  Mat k(n, n - static_cast<Eigen::Index>(pivots.size()));
  Eigen::Index kc = 0;
  for (Eigen::Index free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    for (Eigen::Index i = 0; i < n; ++i) k(i, kc) = Scalar(0);
    k(free, kc) = Scalar(1);
    for (size_t pi = 0; pi < pivots.size(); ++pi) k(pivots[pi], kc) = -a(pi, free);
    ++kc;
  }
  return k;
}

// Solves a x = b exactly; nullopt when inconsistent. When the system is
// underdetermined the free coordinates are set to zero.
template <typename Mat, typename Vec>
std::optional<Vec> solve(const Mat& a, const Vec& b) {
  using Scalar = typename Mat::Scalar;
  Mat aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  auto pivots = rref_in_place(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  Vec x(a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) x(i) = Scalar(0);
  for (size_t pi = 0; pi < pivots.size(); ++pi) x(pivots[pi]) = aug(pi, a.cols());
  return x;
}

// Row space membership: true iff v lies in the span of the rows of a.
template <typename Mat, typename Row>
bool in_row_space(Mat a, const Row& v) {
  Eigen::Index r0 = rank(a);
  Mat b(a.rows() + 1, a.cols());
  b.topRows(a.rows()) = a;
  b.row(a.rows()) = v;
  return rank(b) == r0;
}

// Deterministic complement: rows of `sub` extended by those rows of `space`
// that add new pivots. Both are row-bases inside the same coordinate space.
template <typename Mat>
Mat complement_rows(const Mat& sub, const Mat& space) {
  Mat work = sub;
  std::vector<Eigen::Index> keep;
  Eigen::Index r = rank(work);
  for (Eigen::Index i = 0; i < space.rows(); ++i) {
    Mat cand(work.rows() + 1, space.cols());
    cand.topRows(work.rows()) = work;
    cand.row(work.rows()) = space.row(i);
    if (rank(cand) > r) {
      work = cand;
      ++r;
      keep.push_back(i);
    }
  }
  Mat out(static_cast<Eigen::Index>(keep.size()), space.cols());
  for (size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = space.row(keep[i]);
  return out;
}

}  // namespace linalg
}  // namespace kim
