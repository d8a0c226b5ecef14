#include "interval.h"

#include <algorithm>
#include <cassert>

namespace creinn {

IvMat degenerate(const Mat& x) {
  IvMat out;
  out.lo = x;
  out.hi = x;
  return out;
}

static void check_shapes(const IvMat& a, const IvMat& W, const IvMat& b) {
  assert(W.cols() == a.cols());
  assert(b.cols() == W.rows() && b.rows() == 1);
  (void)a; (void)W; (void)b;
}

IvMat interval_linear_general(const IvMat& a, const IvMat& W, const IvMat& b) {
  check_shapes(a, W, b);
  const int B = a.rows(), n = a.cols(), m = W.rows();
  IvMat out(B, m);
  for (int i = 0; i < B; ++i) {
    const double* alo = a.lo.row(i);
    const double* ahi = a.hi.row(i);
    for (int k = 0; k < m; ++k) {
      const double* wlo = W.lo.row(k);
      const double* whi = W.hi.row(k);
      double acc_lo = b.lo.at(0, k);
      double acc_hi = b.hi.at(0, k);
      for (int j = 0; j < n; ++j) {
        double p1 = wlo[j] * alo[j];
        double p2 = wlo[j] * ahi[j];
        double p3 = whi[j] * alo[j];
        double p4 = whi[j] * ahi[j];
        acc_lo += std::min(std::min(p1, p2), std::min(p3, p4));
        acc_hi += std::max(std::max(p1, p2), std::max(p3, p4));
      }
      out.lo.at(i, k) = acc_lo;
      out.hi.at(i, k) = acc_hi;
    }
  }
  return out;
}

IvMat interval_linear_nonneg(const IvMat& a, const IvMat& W, const IvMat& b) {
  check_shapes(a, W, b);
#ifndef NDEBUG
  for (double v : a.lo.a) assert(v >= 0.0);
#endif
  const int B = a.rows(), n = a.cols(), m = W.rows();
  IvMat out(B, m);
  for (int i = 0; i < B; ++i) {
    const double* alo = a.lo.row(i);
    const double* ahi = a.hi.row(i);
    for (int k = 0; k < m; ++k) {
      const double* wlo = W.lo.row(k);
      const double* whi = W.hi.row(k);
      double acc_lo = b.lo.at(0, k);
      double acc_hi = b.hi.at(0, k);
      for (int j = 0; j < n; ++j) {
        acc_lo += mn(wlo[j]) * ahi[j] + mx(wlo[j]) * alo[j];
        acc_hi += mx(whi[j]) * ahi[j] + mn(whi[j]) * alo[j];
      }
      out.lo.at(i, k) = acc_lo;
      out.hi.at(i, k) = acc_hi;
    }
  }
  return out;
}

IvMat interval_relu(const IvMat& a) {
  IvMat out(a.rows(), a.cols());
  for (size_t t = 0; t < a.lo.size(); ++t) {
    out.lo.a[t] = std::max(a.lo.a[t], 0.0);
    out.hi.a[t] = std::max(a.hi.a[t], 0.0);
  }
  return out;
}

}  // namespace creinn
