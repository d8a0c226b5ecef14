#pragma once
#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

namespace creinn {

// Dense row-major matrix of doubles. Rows are samples (or output units for
// weights), columns are features (or input units).
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a((size_t)r * c, fill) {}

  double& at(int r, int c) { return a[(size_t)r * cols + c]; }
  double at(int r, int c) const { return a[(size_t)r * cols + c]; }
  double* row(int r) { return a.data() + (size_t)r * cols; }
  const double* row(int r) const { return a.data() + (size_t)r * cols; }
  size_t size() const { return a.size(); }
  void zero() { std::fill(a.begin(), a.end(), 0.0); }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

// Interval matrix: elementwise [lo, hi] with lo <= hi.
struct IvMat {
  Mat lo, hi;

  IvMat() = default;
  IvMat(int r, int c) : lo(r, c), hi(r, c) {}
  explicit IvMat(const Mat& point) : lo(point), hi(point) {}

  int rows() const { return lo.rows; }
  int cols() const { return lo.cols; }
  bool degenerate() const { return lo.a == hi.a; }
};

inline double mn(double x) { return x < 0.0 ? x : 0.0; }  // min(x, 0)
inline double mx(double x) { return x > 0.0 ? x : 0.0; }  // max(x, 0)

}  // namespace creinn
