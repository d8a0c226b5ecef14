#pragma once
#include <vector>

#include "mat.h"

namespace creinn {

// 1/ln(2); used so loss gradients and values agree bit-for-bit between the
// interval model and the point reference.
inline constexpr double kInvLn2 = 1.44269504088896340735992468100;

// ---- parameter blocks ----
// A linear layer stores centers and radii; endpoints Wlo = Wc - Wr and
// Whi = Wc + Wr are derived each forward pass. Radii are kept >= 0 by the
// optimizer's projection step.
struct LinearParams {
  Mat Wc, Wr;  // out x in
  Mat bc, br;  // 1 x out
};
struct LinearGrads {
  Mat gWlo, gWhi, gblo, gbhi;  // endpoint gradients, merged into centers/radii
  Mat gWc, gWr, gbc, gbr;
  void init(const LinearParams& p);
  void zero();
  void merge();  // gWc = gWlo + gWhi, gWr = gWhi - gWlo, same for biases
};

// Interval batch normalization: centers and radii are normalized separately
// over the batch (biased variance), each with its own affine transform, and
// the result is re-assembled as [c - |r|, c + |r|]. Running statistics follow
// run = momentum * run + (1 - momentum) * batch_stat.
struct IbnParams {
  Mat gamma_c, beta_c, gamma_r, beta_r;          // 1 x features
  Mat run_mc, run_vc, run_mr, run_vr;            // 1 x features
};
struct IbnGrads {
  Mat ggamma_c, gbeta_c, ggamma_r, gbeta_r;
  void init(const IbnParams& p);
  void zero();
};

// ---- caches ----
struct IbnCache {
  Mat c, r, chat, rhat, ro;          // batch x features
  std::vector<double> inv_sc, inv_sr;  // per feature
  bool train = true;
};

struct SoftmaxCache {
  Mat ql, qh;      // batch x classes
  Mat Dl, Dh, Em;  // denominators and midpoint exponentials (shifted)
};

struct InterCache {
  Mat q;                       // batch x classes
  std::vector<double> alpha, width;
  std::vector<uint8_t> fixed;  // alpha clamped or width <= 0: no alpha gradient
};

// ---- kernels ----
// Interval affine map, non-negative-input fast path (asserts a.lo >= 0 in
// debug builds). Endpoints of W/b are taken as given.
void linear_nonneg_fwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                       const Mat& blo, const Mat& bhi, IvMat& out);
void linear_nonneg_bwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                       const IvMat& gout, IvMat& ga, LinearGrads& g);

// General interval affine map (any input sign): four endpoint products per
// element. Backward resolves min/max choices by recomputation; ties take the
// earliest product in the order (lo*lo, lo*hi, hi*lo, hi*hi).
void linear_general_fwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                        const Mat& blo, const Mat& bhi, IvMat& out);
void linear_general_bwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                        const IvMat& gout, IvMat& ga, LinearGrads& g);

void relu_fwd(const IvMat& a, IvMat& out);
void relu_bwd(const IvMat& a, const IvMat& gout, IvMat& ga);

// Interval batch norm. In train mode uses batch statistics and (optionally)
// updates running statistics in-place; in eval mode uses running statistics.
void ibn_fwd(const IvMat& a, IbnParams& p, double eps, double momentum,
             bool train, bool update_running, IbnCache& cache, IvMat& out);
// Train-mode backward only (eval-mode outputs are never differentiated).
void ibn_bwd(const IvMat& a, const IbnParams& p, const IbnCache& cache,
             const IvMat& gout, IvMat& ga, IbnGrads& g);

// Interval softmax head. For logits [lo_k, hi_k] with midpoints m_j:
//   ql_k = e^{lo_k} / (e^{lo_k} + sum_{j != k} e^{m_j})
//   qh_k = e^{hi_k} / (e^{hi_k} + sum_{j != k} e^{m_j})
// Exponentials are shifted by the midpoint maximum, which cancels exactly.
// Guarantees sum(ql) <= 1 <= sum(qh) up to roundoff.
void isoftmax_fwd(const IvMat& o, SoftmaxCache& c);
void isoftmax_bwd(const SoftmaxCache& c, const IvMat& gq, IvMat& go);

// Closed-form Jacobian of the head for one sample; independent of the
// backward kernel, used to cross-check it. Each output is C x C with
// d out_k / d in_j at (k, j).
void isoftmax_jacobian(const std::vector<double>& olo,
                       const std::vector<double>& ohi,
                       Mat& dql_dolo, Mat& dql_dohi,
                       Mat& dqh_dolo, Mat& dqh_dohi);

// Tightening of probability intervals by the simplex:
//   l*_k = max(ql_k, 1 - sum_{j != k} qh_j),  u*_k = min(qh_k, 1 - sum_{j != k} ql_j)
// If every interval has exactly zero width the input is copied unchanged.
// Raw arithmetic otherwise (no renormalization); used inside the training
// loss. `shortcut` reports the zero-width copy.
void reach_fwd(const IvMat& q, IvMat& out, bool& shortcut);
void reach_bwd(const IvMat& q, const IvMat& gout, IvMat& gq, bool shortcut);

// Single distribution from a probability-interval box:
//   q_k = l_k + alpha * (u_k - l_k),  alpha = (1 - sum l) / sum (u - l)
// alpha is clamped to [0, 1]; zero total width gives alpha = 0 (q = l).
void intersect_fwd(const IvMat& r, InterCache& c);
void intersect_bwd(const IvMat& r, const InterCache& c, const Mat& gq, IvMat& gr);

// Mean cross-entropy in bits of q[i, y_i], clamped below at 1e-12.
double ce_fwd(const Mat& q, const std::vector<int>& y);
void ce_bwd(const Mat& q, const std::vector<int>& y, Mat& gq);

}  // namespace creinn
