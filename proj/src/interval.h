#pragma once
#include "mat.h"

namespace creinn {

// Wrap a point matrix as a zero-width interval matrix.
IvMat degenerate(const Mat& x);

// Affine map of an interval batch through an interval weight matrix and bias:
// out[i,k] = sum_j W[k,j] * a[i,j] + b[k], all interval-valued.
//
// General kernel: per element takes min/max of the four endpoint products.
// Valid for any input sign.
IvMat interval_linear_general(const IvMat& a, const IvMat& W, const IvMat& b);

// Fast path requiring a.lo >= 0 elementwise (holds everywhere in the model:
// inputs live in [0,1] and hidden activations are post-ReLU):
//   lo[i,k] = sum_j min(Wlo,0)*ahi + max(Wlo,0)*alo + blo
//   hi[i,k] = sum_j max(Whi,0)*ahi + min(Whi,0)*alo + bhi
// Asserts the precondition in debug builds.
IvMat interval_linear_nonneg(const IvMat& a, const IvMat& W, const IvMat& b);

// Elementwise max(x, 0) on both endpoints.
IvMat interval_relu(const IvMat& a);

}  // namespace creinn
