#include "kernels.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace creinn {

void LinearGrads::init(const LinearParams& p) {
  gWlo = Mat(p.Wc.rows, p.Wc.cols);
  gWhi = Mat(p.Wc.rows, p.Wc.cols);
  gblo = Mat(1, p.bc.cols);
  gbhi = Mat(1, p.bc.cols);
  gWc = Mat(p.Wc.rows, p.Wc.cols);
  gWr = Mat(p.Wc.rows, p.Wc.cols);
  gbc = Mat(1, p.bc.cols);
  gbr = Mat(1, p.bc.cols);
}
void LinearGrads::zero() {
  gWlo.zero(); gWhi.zero(); gblo.zero(); gbhi.zero();
  gWc.zero(); gWr.zero(); gbc.zero(); gbr.zero();
}
void LinearGrads::merge() {
  for (size_t t = 0; t < gWc.size(); ++t) {
    gWc.a[t] = gWlo.a[t] + gWhi.a[t];
    gWr.a[t] = gWhi.a[t] - gWlo.a[t];
  }
  for (size_t t = 0; t < gbc.size(); ++t) {
    gbc.a[t] = gblo.a[t] + gbhi.a[t];
    gbr.a[t] = gbhi.a[t] - gblo.a[t];
  }
}

void IbnGrads::init(const IbnParams& p) {
  ggamma_c = Mat(1, p.gamma_c.cols);
  gbeta_c = Mat(1, p.gamma_c.cols);
  ggamma_r = Mat(1, p.gamma_c.cols);
  gbeta_r = Mat(1, p.gamma_c.cols);
}
void IbnGrads::zero() {
  ggamma_c.zero(); gbeta_c.zero(); ggamma_r.zero(); gbeta_r.zero();
}

// ---- linear, non-negative inputs ----

void linear_nonneg_fwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                       const Mat& blo, const Mat& bhi, IvMat& out) {
  const int B = a.rows(), n = a.cols(), m = Wlo.rows;
#ifndef NDEBUG
  for (double v : a.lo.a) assert(v >= 0.0);
#endif
  out = IvMat(B, m);
  for (int i = 0; i < B; ++i) {
    const double* alo = a.lo.row(i);
    const double* ahi = a.hi.row(i);
    for (int k = 0; k < m; ++k) {
      const double* wl = Wlo.row(k);
      const double* wh = Whi.row(k);
      double acc_lo = blo.at(0, k);
      double acc_hi = bhi.at(0, k);
      for (int j = 0; j < n; ++j) {
        acc_lo += mn(wl[j]) * ahi[j] + mx(wl[j]) * alo[j];
        acc_hi += mx(wh[j]) * ahi[j] + mn(wh[j]) * alo[j];
      }
      out.lo.at(i, k) = acc_lo;
      out.hi.at(i, k) = acc_hi;
    }
  }
}

void linear_nonneg_bwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                       const IvMat& gout, IvMat& ga, LinearGrads& g) {
  const int B = a.rows(), n = a.cols(), m = Wlo.rows;
  for (int i = 0; i < B; ++i) {
    const double* alo = a.lo.row(i);
    const double* ahi = a.hi.row(i);
    double* galo = ga.lo.row(i);
    double* gahi = ga.hi.row(i);
    for (int k = 0; k < m; ++k) {
      const double glo = gout.lo.at(i, k);
      const double ghi = gout.hi.at(i, k);
      const double* wl = Wlo.row(k);
      const double* wh = Whi.row(k);
      double* gwl = g.gWlo.row(k);
      double* gwh = g.gWhi.row(k);
      for (int j = 0; j < n; ++j) {
        gahi[j] += glo * mn(wl[j]) + ghi * mx(wh[j]);
        galo[j] += glo * mx(wl[j]) + ghi * mn(wh[j]);
        // One-sided derivative wrt the endpoint weight (exclusive branches so
        // an exactly-zero weight is not counted twice).
        gwl[j] += glo * (wl[j] < 0.0 ? ahi[j] : alo[j]);
        gwh[j] += ghi * (wh[j] >= 0.0 ? ahi[j] : alo[j]);
      }
      g.gblo.at(0, k) += glo;
      g.gbhi.at(0, k) += ghi;
    }
  }
}

// ---- linear, general inputs ----

void linear_general_fwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                        const Mat& blo, const Mat& bhi, IvMat& out) {
  const int B = a.rows(), n = a.cols(), m = Wlo.rows;
  out = IvMat(B, m);
  for (int i = 0; i < B; ++i) {
    const double* alo = a.lo.row(i);
    const double* ahi = a.hi.row(i);
    for (int k = 0; k < m; ++k) {
      const double* wl = Wlo.row(k);
      const double* wh = Whi.row(k);
      double acc_lo = blo.at(0, k);
      double acc_hi = bhi.at(0, k);
      for (int j = 0; j < n; ++j) {
        const double p[4] = {wl[j] * alo[j], wl[j] * ahi[j],
                             wh[j] * alo[j], wh[j] * ahi[j]};
        acc_lo += std::min(std::min(p[0], p[1]), std::min(p[2], p[3]));
        acc_hi += std::max(std::max(p[0], p[1]), std::max(p[2], p[3]));
      }
      out.lo.at(i, k) = acc_lo;
      out.hi.at(i, k) = acc_hi;
    }
  }
}

void linear_general_bwd(const IvMat& a, const Mat& Wlo, const Mat& Whi,
                        const IvMat& gout, IvMat& ga, LinearGrads& g) {
  const int B = a.rows(), n = a.cols(), m = Wlo.rows;
  for (int i = 0; i < B; ++i) {
    const double* alo = a.lo.row(i);
    const double* ahi = a.hi.row(i);
    double* galo = ga.lo.row(i);
    double* gahi = ga.hi.row(i);
    for (int k = 0; k < m; ++k) {
      const double glo = gout.lo.at(i, k);
      const double ghi = gout.hi.at(i, k);
      const double* wl = Wlo.row(k);
      const double* wh = Whi.row(k);
      for (int j = 0; j < n; ++j) {
        const double p[4] = {wl[j] * alo[j], wl[j] * ahi[j],
                             wh[j] * alo[j], wh[j] * ahi[j]};
        int lo_idx = 0, hi_idx = 0;
        for (int t = 1; t < 4; ++t) {
          if (p[t] < p[lo_idx]) lo_idx = t;
          if (p[t] > p[hi_idx]) hi_idx = t;
        }
        // product index -> (weight endpoint, input endpoint)
        auto route = [&](int idx, double gv) {
          const bool w_hi = idx >= 2, a_hi = (idx & 1) != 0;
          const double wv = w_hi ? wh[j] : wl[j];
          const double av = a_hi ? ahi[j] : alo[j];
          (w_hi ? g.gWhi : g.gWlo).at(k, j) += gv * av;
          (a_hi ? gahi : galo)[j] += gv * wv;
        };
        route(lo_idx, glo);
        route(hi_idx, ghi);
      }
      g.gblo.at(0, k) += glo;
      g.gbhi.at(0, k) += ghi;
    }
  }
}

// ---- relu ----

void relu_fwd(const IvMat& a, IvMat& out) {
  out = IvMat(a.rows(), a.cols());
  for (size_t t = 0; t < a.lo.size(); ++t) {
    out.lo.a[t] = std::max(a.lo.a[t], 0.0);
    out.hi.a[t] = std::max(a.hi.a[t], 0.0);
  }
}

void relu_bwd(const IvMat& a, const IvMat& gout, IvMat& ga) {
  // max(x, 0) with ties to the first operand: gradient 1 when x >= 0.
  for (size_t t = 0; t < a.lo.size(); ++t) {
    if (a.lo.a[t] >= 0.0) ga.lo.a[t] += gout.lo.a[t];
    if (a.hi.a[t] >= 0.0) ga.hi.a[t] += gout.hi.a[t];
  }
}

// ---- interval batch norm ----

void ibn_fwd(const IvMat& a, IbnParams& p, double eps, double momentum,
             bool train, bool update_running, IbnCache& cache, IvMat& out) {
  const int B = a.rows(), F = a.cols();
  cache.c = Mat(B, F);
  cache.r = Mat(B, F);
  cache.chat = Mat(B, F);
  cache.rhat = Mat(B, F);
  cache.ro = Mat(B, F);
  cache.inv_sc.assign(F, 0.0);
  cache.inv_sr.assign(F, 0.0);
  cache.train = train;
  out = IvMat(B, F);

  for (int f = 0; f < F; ++f) {
    for (int i = 0; i < B; ++i) {
      cache.c.at(i, f) = (a.lo.at(i, f) + a.hi.at(i, f)) * 0.5;
      cache.r.at(i, f) = (a.hi.at(i, f) - a.lo.at(i, f)) * 0.5;
    }
    double mu_c, var_c, mu_r, var_r;
    if (train) {
      mu_c = 0.0; mu_r = 0.0;
      for (int i = 0; i < B; ++i) { mu_c += cache.c.at(i, f); mu_r += cache.r.at(i, f); }
      mu_c /= B; mu_r /= B;
      var_c = 0.0; var_r = 0.0;
      for (int i = 0; i < B; ++i) {
        const double dc = cache.c.at(i, f) - mu_c;
        const double dr = cache.r.at(i, f) - mu_r;
        var_c += dc * dc;
        var_r += dr * dr;
      }
      var_c /= B; var_r /= B;  // biased, matching what the running stats store
      if (update_running) {
        p.run_mc.at(0, f) = momentum * p.run_mc.at(0, f) + (1.0 - momentum) * mu_c;
        p.run_vc.at(0, f) = momentum * p.run_vc.at(0, f) + (1.0 - momentum) * var_c;
        p.run_mr.at(0, f) = momentum * p.run_mr.at(0, f) + (1.0 - momentum) * mu_r;
        p.run_vr.at(0, f) = momentum * p.run_vr.at(0, f) + (1.0 - momentum) * var_r;
      }
    } else {
      mu_c = p.run_mc.at(0, f);
      var_c = p.run_vc.at(0, f);
      mu_r = p.run_mr.at(0, f);
      var_r = p.run_vr.at(0, f);
    }
    const double inv_sc = 1.0 / std::sqrt(var_c + eps);
    const double inv_sr = 1.0 / std::sqrt(var_r + eps);
    cache.inv_sc[f] = inv_sc;
    cache.inv_sr[f] = inv_sr;
    const double gc = p.gamma_c.at(0, f), bc = p.beta_c.at(0, f);
    const double gr = p.gamma_r.at(0, f), br = p.beta_r.at(0, f);
    for (int i = 0; i < B; ++i) {
      const double ch = (cache.c.at(i, f) - mu_c) * inv_sc;
      const double rh = (cache.r.at(i, f) - mu_r) * inv_sr;
      cache.chat.at(i, f) = ch;
      cache.rhat.at(i, f) = rh;
      const double co = gc * ch + bc;
      const double ro = gr * rh + br;
      cache.ro.at(i, f) = ro;
      const double w = std::fabs(ro);  // |.| keeps the output a valid interval
      out.lo.at(i, f) = co - w;
      out.hi.at(i, f) = co + w;
    }
  }
}

void ibn_bwd(const IvMat& a, const IbnParams& p, const IbnCache& cache,
             const IvMat& gout, IvMat& ga, IbnGrads& g) {
  assert(cache.train);
  (void)a;
  const int B = cache.c.rows, F = cache.c.cols;
  std::vector<double> g_c(B), g_r(B);
  for (int f = 0; f < F; ++f) {
    const double gamma_c = p.gamma_c.at(0, f);
    const double gamma_r = p.gamma_r.at(0, f);
    double sum_gch = 0.0, sum_gch_x = 0.0, sum_grh = 0.0, sum_grh_x = 0.0;
    for (int i = 0; i < B; ++i) {
      const double g_co = gout.lo.at(i, f) + gout.hi.at(i, f);
      const double s = cache.ro.at(i, f) >= 0.0 ? 1.0 : -1.0;
      const double g_ro = (gout.hi.at(i, f) - gout.lo.at(i, f)) * s;
      g.gbeta_c.at(0, f) += g_co;
      g.ggamma_c.at(0, f) += g_co * cache.chat.at(i, f);
      g.gbeta_r.at(0, f) += g_ro;
      g.ggamma_r.at(0, f) += g_ro * cache.rhat.at(i, f);
      const double g_ch = g_co * gamma_c;
      const double g_rh = g_ro * gamma_r;
      g_c[i] = g_ch;  // reuse buffers for the normalized-value gradients
      g_r[i] = g_rh;
      sum_gch += g_ch;
      sum_gch_x += g_ch * cache.chat.at(i, f);
      sum_grh += g_rh;
      sum_grh_x += g_rh * cache.rhat.at(i, f);
    }
    const double mean_gch = sum_gch / B, mean_gch_x = sum_gch_x / B;
    const double mean_grh = sum_grh / B, mean_grh_x = sum_grh_x / B;
    for (int i = 0; i < B; ++i) {
      const double gc_i = cache.inv_sc[f] *
          (g_c[i] - mean_gch - cache.chat.at(i, f) * mean_gch_x);
      const double gr_i = cache.inv_sr[f] *
          (g_r[i] - mean_grh - cache.rhat.at(i, f) * mean_grh_x);
      ga.lo.at(i, f) += 0.5 * gc_i - 0.5 * gr_i;
      ga.hi.at(i, f) += 0.5 * gc_i + 0.5 * gr_i;
    }
  }
}

// ---- interval softmax ----

void isoftmax_fwd(const IvMat& o, SoftmaxCache& c) {
  const int B = o.rows(), C = o.cols();
  c.ql = Mat(B, C); c.qh = Mat(B, C);
  c.Dl = Mat(B, C); c.Dh = Mat(B, C); c.Em = Mat(B, C);
  std::vector<double> m(C);
  for (int i = 0; i < B; ++i) {
    const double* lo = o.lo.row(i);
    const double* hi = o.hi.row(i);
    double M = -1e300;
    for (int j = 0; j < C; ++j) {
      m[j] = (lo[j] + hi[j]) * 0.5;
      if (m[j] > M) M = m[j];
    }
    double S = 0.0;
    for (int j = 0; j < C; ++j) {
      const double e = std::exp(m[j] - M);
      c.Em.at(i, j) = e;
      S += e;
    }
    for (int k = 0; k < C; ++k) {
      const double rest = S - c.Em.at(i, k);  // opponents at their midpoints
      const double el = std::exp(lo[k] - M);
      const double eh = std::exp(hi[k] - M);
      const double dl = el + rest;
      const double dh = eh + rest;
      c.Dl.at(i, k) = dl;
      c.Dh.at(i, k) = dh;
      c.ql.at(i, k) = el / dl;
      c.qh.at(i, k) = eh / dh;
    }
  }
}

void isoftmax_bwd(const SoftmaxCache& c, const IvMat& gq, IvMat& go) {
  const int B = c.ql.rows, C = c.ql.cols;
  std::vector<double> T(C);
  for (int i = 0; i < B; ++i) {
    double Tsum = 0.0;
    for (int k = 0; k < C; ++k) {
      T[k] = (gq.lo.at(i, k) * c.ql.at(i, k)) / c.Dl.at(i, k) +
             (gq.hi.at(i, k) * c.qh.at(i, k)) / c.Dh.at(i, k);
      Tsum += T[k];
    }
    for (int k = 0; k < C; ++k) {
      const double cross = 0.5 * c.Em.at(i, k) * (Tsum - T[k]);
      go.lo.at(i, k) +=
          gq.lo.at(i, k) * (c.ql.at(i, k) * (1.0 - c.ql.at(i, k))) - cross;
      go.hi.at(i, k) +=
          gq.hi.at(i, k) * (c.qh.at(i, k) * (1.0 - c.qh.at(i, k))) - cross;
    }
  }
}

void isoftmax_jacobian(const std::vector<double>& olo,
                       const std::vector<double>& ohi,
                       Mat& dql_dolo, Mat& dql_dohi,
                       Mat& dqh_dolo, Mat& dqh_dohi) {
  const int C = (int)olo.size();
  dql_dolo = Mat(C, C); dql_dohi = Mat(C, C);
  dqh_dolo = Mat(C, C); dqh_dohi = Mat(C, C);
  std::vector<double> m(C), Em(C);
  double M = -1e300;
  for (int j = 0; j < C; ++j) {
    m[j] = 0.5 * (olo[j] + ohi[j]);
    M = std::max(M, m[j]);
  }
  double S = 0.0;
  for (int j = 0; j < C; ++j) { Em[j] = std::exp(m[j] - M); S += Em[j]; }
  for (int k = 0; k < C; ++k) {
    const double rest = S - Em[k];
    const double el = std::exp(olo[k] - M), eh = std::exp(ohi[k] - M);
    const double Dl = el + rest, Dh = eh + rest;
    const double ql = el / Dl, qh = eh / Dh;
    dql_dolo.at(k, k) = ql * (1.0 - ql);
    dqh_dohi.at(k, k) = qh * (1.0 - qh);
    // dql_k/dohi_k = dqh_k/dolo_k = 0: the own midpoint drops out of the rest
    // term, so the opposite endpoint never enters.
    for (int j = 0; j < C; ++j) {
      if (j == k) continue;
      const double cl = -0.5 * ql * Em[j] / Dl;
      const double ch = -0.5 * qh * Em[j] / Dh;
      dql_dolo.at(k, j) = cl;
      dql_dohi.at(k, j) = cl;
      dqh_dolo.at(k, j) = ch;
      dqh_dohi.at(k, j) = ch;
    }
  }
}

// ---- reach / intersection / loss ----

void reach_fwd(const IvMat& q, IvMat& out, bool& shortcut) {
  const int B = q.rows(), C = q.cols();
  if (q.degenerate()) {
    out = q;
    shortcut = true;
    return;
  }
  shortcut = false;
  out = IvMat(B, C);
  for (int i = 0; i < B; ++i) {
    const double* ql = q.lo.row(i);
    const double* qh = q.hi.row(i);
    double Sl = 0.0, Sh = 0.0;
    for (int k = 0; k < C; ++k) { Sl += ql[k]; Sh += qh[k]; }
    for (int k = 0; k < C; ++k) {
      const double cl = 1.0 - (Sh - qh[k]);
      const double cu = 1.0 - (Sl - ql[k]);
      out.lo.at(i, k) = std::max(ql[k], cl);
      out.hi.at(i, k) = std::min(qh[k], cu);
    }
  }
}

void reach_bwd(const IvMat& q, const IvMat& gout, IvMat& gq, bool shortcut) {
  const int B = q.rows(), C = q.cols();
  if (shortcut) {
    for (size_t t = 0; t < gq.lo.size(); ++t) {
      gq.lo.a[t] += gout.lo.a[t];
      gq.hi.a[t] += gout.hi.a[t];
    }
    return;
  }
  for (int i = 0; i < B; ++i) {
    const double* ql = q.lo.row(i);
    const double* qh = q.hi.row(i);
    double* gl = gq.lo.row(i);
    double* gh = gq.hi.row(i);
    double Sl = 0.0, Sh = 0.0;
    for (int k = 0; k < C; ++k) { Sl += ql[k]; Sh += qh[k]; }
    for (int k = 0; k < C; ++k) {
      const double cl = 1.0 - (Sh - qh[k]);
      const double cu = 1.0 - (Sl - ql[k]);
      const double glo = gout.lo.at(i, k);
      const double ghi = gout.hi.at(i, k);
      if (ql[k] >= cl) {  // max with tie to first operand
        gl[k] += glo;
      } else {
        for (int j = 0; j < C; ++j)
          if (j != k) gh[j] -= glo;
      }
      if (qh[k] <= cu) {  // min with tie to first operand
        gh[k] += ghi;
      } else {
        for (int j = 0; j < C; ++j)
          if (j != k) gl[j] -= ghi;
      }
    }
  }
}

void intersect_fwd(const IvMat& r, InterCache& c) {
  const int B = r.rows(), C = r.cols();
  c.q = Mat(B, C);
  c.alpha.assign(B, 0.0);
  c.width.assign(B, 0.0);
  c.fixed.assign(B, 0);
  for (int i = 0; i < B; ++i) {
    const double* l = r.lo.row(i);
    const double* u = r.hi.row(i);
    double Sl = 0.0, W = 0.0;
    for (int k = 0; k < C; ++k) {
      Sl += l[k];
      W += u[k] - l[k];
    }
    double alpha;
    uint8_t fixed;
    if (W > 0.0) {
      alpha = (1.0 - Sl) / W;
      fixed = 0;
      if (alpha < 0.0) { alpha = 0.0; fixed = 1; }
      else if (alpha > 1.0) { alpha = 1.0; fixed = 1; }
    } else {
      alpha = 0.0;
      fixed = 1;
    }
    c.alpha[i] = alpha;
    c.width[i] = W;
    c.fixed[i] = fixed;
    for (int k = 0; k < C; ++k)
      c.q.at(i, k) = l[k] + alpha * (u[k] - l[k]);
  }
}

void intersect_bwd(const IvMat& r, const InterCache& c, const Mat& gq, IvMat& gr) {
  const int B = r.rows(), C = r.cols();
  for (int i = 0; i < B; ++i) {
    const double* l = r.lo.row(i);
    const double* u = r.hi.row(i);
    double* gl = gr.lo.row(i);
    double* gu = gr.hi.row(i);
    const double alpha = c.alpha[i];
    double galpha = 0.0;
    for (int k = 0; k < C; ++k) {
      const double g = gq.at(i, k);
      gl[k] += g * (1.0 - alpha);
      gu[k] += g * alpha;
      galpha += g * (u[k] - l[k]);
    }
    if (!c.fixed[i]) {
      // alpha = (1 - sum l) / W: d/dl_j = (alpha - 1)/W, d/du_j = -alpha/W.
      const double W = c.width[i];
      const double da_l = galpha * ((alpha - 1.0) / W);
      const double da_u = galpha * (-(alpha / W));
      for (int j = 0; j < C; ++j) {
        gl[j] += da_l;
        gu[j] += da_u;
      }
    }
  }
}

double ce_fwd(const Mat& q, const std::vector<int>& y) {
  const int B = q.rows;
  double acc = 0.0;
  for (int i = 0; i < B; ++i) {
    const double qv = q.at(i, y[i]);
    const double qc = qv >= 1e-12 ? qv : 1e-12;
    acc += -std::log2(qc);
  }
  return acc / (double)B;
}

void ce_bwd(const Mat& q, const std::vector<int>& y, Mat& gq) {
  const int B = q.rows;
  for (int i = 0; i < B; ++i) {
    const double qv = q.at(i, y[i]);
    if (qv >= 1e-12)
      gq.at(i, y[i]) += (-kInvLn2 / qv) / (double)B;
  }
}

}  // namespace creinn
